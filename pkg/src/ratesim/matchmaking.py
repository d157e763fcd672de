"""5v5 matchmaking by score proximity with a relaxing threshold."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import TEAM
from .errors import ConfigValueError, MatchmakingError

LANES = ("Top", "Jungle", "Mid", "Bottom", "Support")
MATCHING_SCORES = ("elo", "ladder")


@dataclass(frozen=True)
class MatchPolicy:
    """How the matchmaker picks and widens its acceptance window.

    ``core_attempts`` is the number of random core players tried per match
    before giving up; each attempt relaxes from ``initial_threshold``.
    """

    matching_score: str = "elo"
    initial_threshold: float = 0.0
    relax_step: float = 5.0
    relax_after: int = 1
    max_threshold: float = 400.0
    core_attempts: int = 8

    def __post_init__(self):
        if self.matching_score not in MATCHING_SCORES:
            raise ConfigValueError(f"matching_score must be one of {MATCHING_SCORES}")
        if self.initial_threshold < 0:
            raise ConfigValueError("initial_threshold must be >= 0")
        if self.relax_step <= 0:
            raise ConfigValueError("relax_step must be > 0")
        if self.relax_after < 1:
            raise ConfigValueError("relax_after must be >= 1")
        if self.max_threshold < self.initial_threshold:
            raise ConfigValueError("max_threshold must be >= initial_threshold")
        if self.core_attempts < 1:
            raise ConfigValueError("core_attempts must be >= 1")

    @property
    def block_width(self) -> int:
        return _kernels.block_width(self.core_attempts)


@dataclass(frozen=True)
class MatchSetup:
    """Two lane-ordered teams; ``team_a[i]`` faces ``team_b[i]`` in lane ``LANES[i]``."""

    team_a: tuple[int, ...]
    team_b: tuple[int, ...]
    threshold: float
    core_diff: float

    def __post_init__(self):
        if len(self.team_a) != TEAM or len(self.team_b) != TEAM:
            raise ValueError("each team needs exactly five players")
        if len(set(self.team_a) | set(self.team_b)) != 2 * TEAM:
            raise ValueError("match players must be distinct")

    @property
    def lane_pairs(self) -> list[tuple[str, int, int]]:
        return list(zip(LANES, self.team_a, self.team_b))


def relax_threshold(current: float, policy: MatchPolicy, failed_scans: int) -> float:
    """Acceptance window after ``failed_scans`` unsuccessful scans.

    ``current`` is ignored; the schedule is a pure function of the scan count
    so that the same window is reproduced regardless of call history.
    """
    if failed_scans < 0:
        raise ValueError("failed_scans must be >= 0")
    t = policy.initial_threshold + policy.relax_step * (failed_scans // policy.relax_after)
    return min(t, policy.max_threshold)


def find_match(pool, policy: MatchPolicy, rng: np.random.Generator, *, backend=None) -> MatchSetup:
    """Assemble one match from ``pool`` (a :class:`~ratesim.engine.Population`).

    A random core player is paired with the nearest-scored player, then eight
    fillers nearest to the cores' mean alternate between the teams. The window
    widens until both the core gap and the eighth filler fit inside it.
    Consumes ``policy.block_width - 1`` uniforms from ``rng``.
    """
    scores = pool.ladder if policy.matching_score == "ladder" else pool.elo
    if scores.shape[0] < 2 * TEAM:
        raise MatchmakingError(f"pool has {scores.shape[0]} players, need {2 * TEAM}")
    k = _kernels.load_backend(backend)
    u = rng.random(policy.block_width - 1)
    team_a = np.empty(TEAM, dtype=np.int64)
    team_b = np.empty(TEAM, dtype=np.int64)
    n_cores = policy.core_attempts
    t, diff, _ = k.select_match(
        scores, u[:n_cores], u[n_cores:], float(policy.initial_threshold),
        float(policy.relax_step), int(policy.relax_after), float(policy.max_threshold),
        team_a, team_b,
    )
    if t < 0:
        raise MatchmakingError(
            f"no match within max_threshold={policy.max_threshold} after "
            f"{n_cores} core attempts"
        )
    return MatchSetup(tuple(int(x) for x in team_a), tuple(int(x) for x in team_b),
                      float(t), float(diff))
