"""Constants shared by both kernel backends."""

TEAM = 5
N_FILL = 2 * TEAM - 2

SCHEME_CLASSIC = 0
SCHEME_PERFORMANCE = 1
SCHEME_PROPOSED = 2

K_BASE = 35.0
K_STEP = 5.0
K_BAND = 400.0


def block_width(core_attempts: int) -> int:
    """Uniforms consumed per match: core picks, 2x5 lane keys, one outcome."""
    return core_attempts + 2 * TEAM + 1
