"""Population generation, the match loop and run history."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels import TEAM
from .config import SimConfig
from .core import DEFAULT_BASE_GAIN, DEFAULT_K_MIN
from .errors import ConfigValueError, MatchmakingError
from .matchmaking import MatchPolicy, MatchSetup, find_match

log = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.PCG64"

_SCHEME_CODES = {
    "classic-elo": _kernels.SCHEME_CLASSIC,
    "performance-elo": _kernels.SCHEME_PERFORMANCE,
    "proposed": _kernels.SCHEME_PROPOSED,
}


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class SchemePolicy:
    """Which update rule drives which score table.

    Both ELO schemes update the ladder with the classic rule and the hidden
    ELO with the performance-weighted rule; the proposed scheme only touches
    the ladder.
    """

    name: str = "classic-elo"
    base_gain: float = DEFAULT_BASE_GAIN
    k_min: float = DEFAULT_K_MIN

    def __post_init__(self):
        if self.name not in _SCHEME_CODES:
            raise ConfigValueError(f"unknown scheme {self.name!r}")

    @property
    def code(self) -> int:
        return _SCHEME_CODES[self.name]

    @property
    def tracks_elo(self) -> bool:
        return self.name != "proposed"

    @classmethod
    def from_config(cls, config: SimConfig) -> "SchemePolicy":
        return cls(config.scheme, config.base_gain, config.k_min)


@dataclass(frozen=True)
class Player:
    id: int
    strength: float
    ladder: float
    elo: float
    games_played: int
    wins: int


@dataclass
class Population:
    """Struct-of-arrays player pool. Player ids are array indices."""

    strength: np.ndarray
    ladder: np.ndarray
    elo: np.ndarray
    games_played: np.ndarray
    wins: np.ndarray

    def __post_init__(self):
        self.strength = np.ascontiguousarray(self.strength, dtype=np.float64)
        self.ladder = np.ascontiguousarray(self.ladder, dtype=np.float64)
        self.elo = np.ascontiguousarray(self.elo, dtype=np.float64)
        self.games_played = np.ascontiguousarray(self.games_played, dtype=np.int64)
        self.wins = np.ascontiguousarray(self.wins, dtype=np.int64)

    @classmethod
    def from_scores(cls, strength, ladder=None, elo=None) -> "Population":
        strength = np.asarray(strength, dtype=np.float64)
        n = strength.shape[0]
        return cls(
            strength,
            strength.copy() if ladder is None else ladder,
            strength.copy() if elo is None else elo,
            np.zeros(n, dtype=np.int64),
            np.zeros(n, dtype=np.int64),
        )

    def __len__(self) -> int:
        return self.strength.shape[0]

    def __getitem__(self, i: int) -> Player:
        return Player(int(i), float(self.strength[i]), float(self.ladder[i]),
                      float(self.elo[i]), int(self.games_played[i]), int(self.wins[i]))

    def copy(self) -> "Population":
        return Population(self.strength.copy(), self.ladder.copy(), self.elo.copy(),
                          self.games_played.copy(), self.wins.copy())

    def snapshot(self, matches: int) -> "Snapshot":
        return Snapshot.from_arrays(matches, self.strength, self.ladder, self.elo,
                                    self.games_played, self.wins)


@dataclass(frozen=True)
class Snapshot:
    """Immutable copy of the pool after ``matches`` matches."""

    matches: int
    strength: np.ndarray
    ladder: np.ndarray
    elo: np.ndarray
    games_played: np.ndarray
    wins: np.ndarray

    @classmethod
    def from_arrays(cls, matches, strength, ladder, elo, games_played, wins) -> "Snapshot":
        arrays = []
        for a, dt in ((strength, np.float64), (ladder, np.float64), (elo, np.float64),
                      (games_played, np.int64), (wins, np.int64)):
            a = np.array(a, dtype=dt, copy=True)
            a.flags.writeable = False
            arrays.append(a)
        return cls(int(matches), *arrays)

    @property
    def player_id(self) -> np.ndarray:
        return np.arange(self.strength.shape[0])

    def __len__(self) -> int:
        return self.strength.shape[0]


@dataclass(frozen=True)
class MatchRecord:
    """One played match. Index 0 is team A, index 1 team B; lanes in order."""

    index: int
    ids: np.ndarray  # (2, 5) player ids
    ps: np.ndarray  # (2, 5)
    team_ps_mean: np.ndarray  # (2,)
    expectancy_a: float
    winner: int  # 0 = team A, 1 = team B
    ladder_delta: np.ndarray  # (2, 5)
    elo_delta: np.ndarray  # (2, 5)
    threshold: float


@dataclass
class MatchLog:
    """Columnar store of match records."""

    ids: np.ndarray
    ps: np.ndarray
    team_ps_mean: np.ndarray
    expectancy_a: np.ndarray
    winner: np.ndarray
    ladder_delta: np.ndarray
    elo_delta: np.ndarray
    threshold: np.ndarray

    @classmethod
    def empty(cls, n: int) -> "MatchLog":
        return cls(
            ids=np.zeros((n, 2, TEAM), dtype=np.int64),
            ps=np.zeros((n, 2, TEAM)),
            team_ps_mean=np.zeros((n, 2)),
            expectancy_a=np.zeros(n),
            winner=np.zeros(n, dtype=np.int64),
            ladder_delta=np.zeros((n, 2, TEAM)),
            elo_delta=np.zeros((n, 2, TEAM)),
            threshold=np.zeros(n),
        )

    def __len__(self) -> int:
        return self.expectancy_a.shape[0]

    def __getitem__(self, i: int) -> MatchRecord:
        return MatchRecord(int(i), self.ids[i], self.ps[i], self.team_ps_mean[i],
                           float(self.expectancy_a[i]), int(self.winner[i]),
                           self.ladder_delta[i], self.elo_delta[i], float(self.threshold[i]))

    def won(self) -> np.ndarray:
        """Boolean (n, 2, 5) mask of players on the winning side."""
        side = np.arange(2)[None, :, None]
        return np.broadcast_to(side == self.winner[:, None, None], self.ids.shape)

    def slice(self, start: int, stop: int) -> "MatchLog":
        return MatchLog(*(getattr(self, f)[start:stop] for f in self.__dataclass_fields__))


@dataclass
class RunHistory:
    config: SimConfig
    snapshots: list[Snapshot]
    log: MatchLog
    backend: str = "numpy"
    initial: Population = field(default=None, repr=False)

    @property
    def scheme(self) -> SchemePolicy:
        return SchemePolicy.from_config(self.config)


def _draw_strengths(config: SimConfig, rng: np.random.Generator) -> np.ndarray:
    n, lo, hi = config.player_count, config.strength_min, config.strength_max
    if config.strength_distribution == "uniform":
        return rng.uniform(lo, hi, n)
    # rejection sampling keeps the normal shape inside [lo, hi]
    if not lo <= config.mean <= hi:
        raise ConfigValueError("strength_mean must lie within the strength bounds")
    kept = []
    total = 0
    while total < n:
        x = rng.normal(config.mean, config.sd, n)
        x = x[(x >= lo) & (x <= hi)]
        kept.append(x)
        total += x.shape[0]
    return np.concatenate(kept)[:n]


def init_population(config: SimConfig, rng: np.random.Generator) -> Population:
    """Draw strengths, then ladder and hidden ELO as strength plus an
    independent integer offset in ``[-delta_range, delta_range]``, floored at 0."""
    strength = _draw_strengths(config, rng)
    d = config.delta_range
    n = config.player_count
    ladder = strength + rng.integers(-d, d, size=n, endpoint=True)
    elo = strength + rng.integers(-d, d, size=n, endpoint=True)
    return Population.from_scores(strength, np.maximum(ladder, 0.0), np.maximum(elo, 0.0))


def _as_scheme(scheme) -> SchemePolicy:
    return scheme if isinstance(scheme, SchemePolicy) else SchemePolicy(scheme)


def play_match(pool: Population, setup: MatchSetup, scheme, rng: np.random.Generator,
               *, index: int = 0, backend=None) -> MatchRecord:
    """Sample the winner of ``setup`` and apply the scheme's updates to ``pool``.

    Consumes one uniform from ``rng``.
    """
    scheme = _as_scheme(scheme)
    k = _kernels.load_backend(backend)
    u = float(rng.random())
    ids = np.array([setup.team_a, setup.team_b], dtype=np.int64)
    ps = np.zeros((2, TEAM))
    means = np.zeros(2)
    ldelta = np.zeros((2, TEAM))
    edelta = np.zeros((2, TEAM))
    e_a, winner = k.apply_match(ids[0], ids[1], pool.strength, pool.ladder, pool.elo,
                                pool.games_played, pool.wins, u, scheme.code,
                                float(scheme.base_gain), float(scheme.k_min),
                                ps, means, ldelta, edelta)
    return MatchRecord(index, ids, ps, means, float(e_a), int(winner), ldelta, edelta,
                       setup.threshold)


def find_match_and_play(pool: Population, config: SimConfig, rng: np.random.Generator,
                        *, index: int = 0, backend=None) -> MatchRecord:
    """One iteration of the run loop outside the compiled chunk runner."""
    setup = find_match(pool, config.match_policy(), rng, backend=backend)
    return play_match(pool, setup, SchemePolicy.from_config(config), rng, index=index,
                      backend=backend)


def checkpoints(total: int, interval: int) -> list[int]:
    marks = list(range(0, total + 1, interval))
    if marks[-1] != total:
        marks.append(total)
    return marks


def run_matches(pool: Population, log: MatchLog, start: int, stop: int,
                policy: MatchPolicy, scheme: SchemePolicy, rng: np.random.Generator,
                kernels) -> None:
    """Play matches ``start..stop`` into ``log``, mutating ``pool``."""
    n = stop - start
    if n <= 0:
        return
    uniforms = rng.random((n, policy.block_width))
    sl = slice(start, stop)
    done = kernels.run_matches(
        pool.strength, pool.ladder, pool.elo, pool.games_played, pool.wins, uniforms,
        policy.matching_score == "ladder", scheme.code, float(scheme.base_gain),
        float(scheme.k_min), float(policy.initial_threshold), float(policy.relax_step),
        int(policy.relax_after), float(policy.max_threshold),
        log.ids[sl], log.ps[sl], log.team_ps_mean[sl], log.expectancy_a[sl],
        log.winner[sl], log.ladder_delta[sl], log.elo_delta[sl], log.threshold[sl],
    )
    if done != n:
        raise MatchmakingError(
            f"match {start + done}: no acceptable match after {policy.core_attempts} "
            f"core attempts at max_threshold={policy.max_threshold}; run aborted"
        )


def run_simulation(config: SimConfig, *, backend=None) -> RunHistory:
    """Run ``config.total_matches`` matches from a fresh population.

    All randomness comes from one PCG64 generator seeded with
    ``config.rng_seed``: first the population, then one fixed-width block of
    uniforms per match.
    """
    kernels = _kernels.load_backend(backend)
    rng = make_rng(config.rng_seed)
    pool = init_population(config, rng)
    initial = pool.copy()
    policy = config.match_policy()
    scheme = SchemePolicy.from_config(config)
    log_ = MatchLog.empty(config.total_matches)
    marks = checkpoints(config.total_matches, config.checkpoint_interval)
    snapshots = [pool.snapshot(0)]
    for lo, hi in zip(marks[:-1], marks[1:]):
        run_matches(pool, log_, lo, hi, policy, scheme, rng, kernels)
        snapshots.append(pool.snapshot(hi))
        log.debug("checkpoint %d/%d", hi, config.total_matches)
    return RunHistory(config, snapshots, log_, _kernels.backend_name(kernels), initial)
