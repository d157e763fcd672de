"""Team rating-system simulator: classic ELO ladder, performance-weighted
hidden ELO and an effort-based ladder, with 5v5 matchmaking."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    display_round,
    elo_update_performance,
    expected_score,
    k_value,
    ladder_update_elo,
    performance_score,
    proposed_ladder_update,
    team_win_probability,
)
from .config import SimConfig, load_config  # noqa: E402
from .engine import (  # noqa: E402
    Population,
    SchemePolicy,
    init_population,
    make_rng,
    play_match,
    run_simulation,
)
from .matchmaking import MatchPolicy, MatchSetup, find_match, relax_threshold  # noqa: E402
from .metrics import convergence_report, motion_report, velocity  # noqa: E402

__all__ = [
    "MatchPolicy", "MatchSetup", "Population", "SchemePolicy", "SimConfig",
    "convergence_report", "display_round", "elo_update_performance", "expected_score",
    "find_match", "init_population", "k_value", "ladder_update_elo", "load_config",
    "make_rng", "motion_report", "performance_score", "play_match",
    "proposed_ladder_update", "relax_threshold", "run_simulation",
    "team_win_probability", "velocity",
]
