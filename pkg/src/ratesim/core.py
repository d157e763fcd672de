"""Rating mathematics: expectancy, K value, update rules and performance score.

Every function here is pure and works on plain floats. The simulation kernels
in :mod:`ratesim._kernels` inline the same arithmetic for speed; the test
suite replays kernel output through these functions as an audit.
"""

from __future__ import annotations

import math

from .errors import DomainError

WIN = 1
LOSS = 0

K_BASE = 35.0
K_STEP = 5.0
K_BAND = 400.0
DEFAULT_K_MIN = 5.0
DEFAULT_BASE_GAIN = 20.0


def _finite(*values: float) -> None:
    for x in values:
        if not math.isfinite(x):
            raise DomainError(f"non-finite rating input: {x!r}")


def _outcome(s: int) -> int:
    if s not in (WIN, LOSS):
        raise DomainError(f"game outcome must be 0 or 1, got {s!r}")
    return int(s)


def floor_rating(value: float) -> float:
    """Clamp a rating to the non-negative range."""
    return value if value > 0.0 else 0.0


def display_round(value: float) -> int:
    """Round half-up to an integer for display and export."""
    return int(math.floor(value + 0.5))


def expected_score(r_a: float, r_b: float) -> float:
    """Probability that a player rated ``r_a`` beats one rated ``r_b``.

    >>> round(expected_score(2100, 2000), 4)
    0.6401
    """
    _finite(r_a, r_b)
    return 1.0 / (1.0 + 10.0 ** ((r_b - r_a) / 400.0))


def k_value(elo: float, k_min: float = DEFAULT_K_MIN) -> float:
    """Step-function K factor derived from the hidden ELO score.

    ``35 - 5 * floor(elo / 400)``, clamped below at ``k_min``.
    """
    _finite(elo)
    if elo < 0:
        raise DomainError(f"elo must be non-negative, got {elo!r}")
    k = K_BASE - K_STEP * math.floor(elo / K_BAND)
    return k if k > k_min else float(k_min)


def ladder_update_elo(ladder: float, k: float, s: int, e: float) -> float:
    """Classic update ``R + K * (S - E)``, floored at zero."""
    _finite(ladder, k, e)
    s = _outcome(s)
    if k <= 0:
        raise DomainError(f"k must be positive, got {k!r}")
    if not 0.0 < e < 1.0:
        raise DomainError(f"expectancy must lie in (0, 1), got {e!r}")
    return floor_rating(ladder + k * (s - e))


def performance_score(s: float, s_oppo: float) -> float:
    """Lane strength scaled by its dominance coefficient ``s / s_oppo``.

    >>> performance_score(1000, 2000)
    500.0
    """
    _finite(s, s_oppo)
    if s <= 0 or s_oppo <= 0:
        raise DomainError(f"strengths must be positive, got {s!r}, {s_oppo!r}")
    return s * (s / s_oppo)


def dominance_coefficient(s: float, s_oppo: float) -> float:
    _finite(s, s_oppo)
    if s_oppo <= 0:
        raise DomainError("opponent strength must be positive")
    return s / s_oppo


def _check_ps(ps: float, ps_t: float) -> None:
    _finite(ps, ps_t)
    if ps <= 0 or ps_t <= 0:
        raise DomainError(f"performance scores must be positive, got {ps!r}, {ps_t!r}")


def elo_update_performance(
    elo: float, k: float, s: int, e: float, ps: float, ps_t: float
) -> float:
    """Hidden-ELO update weighted by the player's share of team performance.

    A win scales the classic delta by ``ps / ps_t``; a loss scales it by
    ``ps_t / ps``, so a strong performer gains more and loses less.
    """
    _check_ps(ps, ps_t)
    _finite(elo, k, e)
    s = _outcome(s)
    if k <= 0:
        raise DomainError(f"k must be positive, got {k!r}")
    if not 0.0 < e < 1.0:
        raise DomainError(f"expectancy must lie in (0, 1), got {e!r}")
    ratio = ps / ps_t if s == WIN else ps_t / ps
    return floor_rating(elo + ratio * k * (s - e))


def proposed_ladder_update(
    ladder: float,
    ps: float,
    ps_t: float,
    s: int,
    base_gain: float = DEFAULT_BASE_GAIN,
) -> float:
    """Effort-based ladder update: ``+base_gain*ps/ps_t`` on a win,
    ``-base_gain*ps_t/ps`` on a loss."""
    _check_ps(ps, ps_t)
    _finite(ladder, base_gain)
    s = _outcome(s)
    if s == WIN:
        return floor_rating(ladder + base_gain * (ps / ps_t))
    return floor_rating(ladder - base_gain * (ps_t / ps))


def team_win_probability(team_a_ps_mean: float, team_b_ps_mean: float) -> float:
    """Win probability of team A from the two teams' mean performance scores."""
    _finite(team_a_ps_mean, team_b_ps_mean)
    if team_a_ps_mean <= 0 or team_b_ps_mean <= 0:
        raise DomainError("team performance means must be positive")
    return expected_score(team_a_ps_mean, team_b_ps_mean)
