"""Experience (velocity, mass, momentum, energy) quantities and convergence statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import DomainError, UndefinedCorrelationError

HIST_BIN_WIDTH = 0.1
HIST_MAX = 3.0


@dataclass(frozen=True)
class ExperienceSample:
    player_id: int
    match_index: int
    velocity: float
    won: bool

    def __post_init__(self):
        if self.velocity < 0 or (not self.won and self.velocity != 0):
            raise DomainError("velocity must be >= 0, and 0 for a loss")


def velocity(ps: float, ps_t: float, points_earned: float, avg_points_earned: float,
             won: bool) -> float:
    """Experience velocity of one player in one match; zero on a loss."""
    if not won:
        return 0.0
    if ps_t <= 0:
        raise DomainError("team performance mean must be positive")
    if avg_points_earned <= 0:
        raise DomainError(
            f"average points earned by winners must be positive, got {avg_points_earned!r}"
        )
    return (ps / ps_t) * (points_earned / avg_points_earned)


def match_velocities(log) -> np.ndarray:
    """Velocities for every (match, side, lane) slot of a :class:`MatchLog`.

    Points earned are the ladder gains; the average is taken over the five
    winners of the same match.
    """
    n = len(log)
    out = np.zeros(log.ids.shape)
    if n == 0:
        return out
    rows = np.arange(n)
    w = log.winner
    gains = log.ladder_delta[rows, w]  # (n, 5)
    avg = gains.mean(axis=1)
    if np.any(avg <= 0):
        bad = int(np.flatnonzero(avg <= 0)[0])
        raise DomainError(f"match {bad}: winners' mean ladder gain is not positive")
    ratio = log.ps[rows, w] / log.team_ps_mean[rows, w][:, None]
    out[rows, w] = ratio * (gains / avg[:, None])
    return out


def experience_samples(log) -> list[ExperienceSample]:
    v = match_velocities(log)
    won = log.won()
    return [
        ExperienceSample(int(log.ids[i, s, j]), i, float(v[i, s, j]), bool(won[i, s, j]))
        for i in range(len(log)) for s in range(2) for j in range(v.shape[2])
    ]


@dataclass(frozen=True)
class MotionReport:
    velocity: float
    mass: float
    momentum: float
    potential_energy: float

    @classmethod
    def from_velocity(cls, v: float) -> "MotionReport":
        m = 1.0 - v
        return cls(v, m, m * v, 2.0 * m * v ** 2)

    def row(self) -> str:
        return f"{self.velocity:.3f},{self.mass:.3f},{self.momentum:.3f},{self.potential_energy:.3f}"


def motion_report(samples: Iterable[ExperienceSample] | Sequence[float] | np.ndarray) -> MotionReport:
    """Pooled experience summary; losses count as zero velocity."""
    if isinstance(samples, np.ndarray):
        v = samples.ravel()
    else:
        samples = list(samples)
        v = np.array([s.velocity if isinstance(s, ExperienceSample) else s for s in samples],
                     dtype=np.float64)
    if v.size == 0:
        raise DomainError("motion report needs at least one sample")
    return MotionReport.from_velocity(float(v.mean()))


def velocity_histogram(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Counts over fixed 0.1-wide bins on [0, 3] plus one overflow bin.

    Returns ``(edges, counts)``; ``counts[-1]`` counts values >= 3.
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    nbins = int(round(HIST_MAX / HIST_BIN_WIDTH))
    edges = np.round(np.arange(nbins + 1) * HIST_BIN_WIDTH, 10)
    idx = np.floor(v / HIST_BIN_WIDTH + 1e-9).astype(np.int64)
    idx = np.clip(idx, 0, nbins)
    counts = np.bincount(idx, minlength=nbins + 1)
    return edges, counts


@dataclass(frozen=True)
class ConvergenceReport:
    checkpoint: int
    matches: int
    spearman_ladder: float
    pearson_ladder: float
    rmse_ladder: float
    spearman_elo: float | None = None
    pearson_elo: float | None = None
    rmse_elo: float | None = None


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0:
        raise UndefinedCorrelationError("correlation undefined for a constant series")
    return max(-1.0, min(1.0, float(xc @ yc) / denom))


def spearman(x, y) -> float:
    """Rank correlation with average ranks for ties."""
    return _pearson(rankdata(x), rankdata(y))


def pearson(x, y) -> float:
    return _pearson(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))


def affine_rmse(x, y) -> float:
    """RMS residual of ``y`` after a least-squares fit ``y ~ a*x + b``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    a, b = np.polyfit(x, y, 1)
    r = y - (a * x + b)
    return float(np.sqrt(np.mean(r * r)))


def _triple(strength, score):
    return spearman(strength, score), pearson(strength, score), affine_rmse(strength, score)


def convergence_report(snapshot, *, include_elo: bool = True, checkpoint: int = 0) -> ConvergenceReport:
    """How well ladder (and optionally hidden ELO) track latent strength."""
    strength = np.asarray(snapshot.strength, dtype=np.float64)
    if strength.shape[0] < 2 or np.all(strength == strength[0]):
        raise UndefinedCorrelationError("need at least two players with distinct strengths")
    s_l, p_l, r_l = _triple(strength, snapshot.ladder)
    if include_elo:
        s_e, p_e, r_e = _triple(strength, snapshot.elo)
        return ConvergenceReport(checkpoint, snapshot.matches, s_l, p_l, r_l, s_e, p_e, r_e)
    return ConvergenceReport(checkpoint, snapshot.matches, s_l, p_l, r_l)


def history_reports(history) -> list[ConvergenceReport]:
    include = history.scheme.tracks_elo
    return [convergence_report(s, include_elo=include, checkpoint=i)
            for i, s in enumerate(history.snapshots)]


def history_motion(history) -> MotionReport | None:
    if len(history.log) == 0:
        return None
    return motion_report(match_velocities(history.log))
