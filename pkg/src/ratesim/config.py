"""Simulation configuration and its TOML loader."""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import DEFAULT_BASE_GAIN, DEFAULT_K_MIN
from .errors import ConfigNotFoundError, ConfigParseError, ConfigValueError
from .matchmaking import MATCHING_SCORES, MatchPolicy

SCHEMES = ("classic-elo", "performance-elo", "proposed")
DISTRIBUTIONS = ("truncated-normal", "uniform")
MIN_PLAYERS = 10


@dataclass(frozen=True)
class SimConfig:
    player_count: int = 2000
    strength_min: float = 210.0
    strength_max: float = 2000.0
    strength_distribution: str = "truncated-normal"
    # None derives mean (min+max)/2 and sd (max-min)/6
    strength_mean: float | None = None
    strength_sd: float | None = None
    delta_range: int = 500
    scheme: str = "classic-elo"
    total_matches: int = 10000
    checkpoint_interval: int = 1000
    rng_seed: int = 0
    # "auto": hidden ELO for the ELO schemes, ladder for the proposed scheme
    matching_score: str = "auto"
    initial_threshold: float = 0.0
    relax_step: float = 5.0
    relax_after: int = 1
    max_threshold: float = 400.0
    core_attempts: int = 8
    base_gain: float = DEFAULT_BASE_GAIN
    k_min: float = DEFAULT_K_MIN

    def __post_init__(self):
        _check(self.player_count >= MIN_PLAYERS,
               f"player_count must be >= {MIN_PLAYERS} (one match needs ten players)")
        _check(self.strength_min > 0, "strength_min must be > 0")
        _check(self.strength_max > self.strength_min, "strength_max must exceed strength_min")
        _check(self.strength_distribution in DISTRIBUTIONS,
               f"strength_distribution must be one of {DISTRIBUTIONS}")
        if self.strength_sd is not None:
            _check(self.strength_sd > 0, "strength_sd must be > 0")
        _check(self.delta_range >= 0, "delta_range must be >= 0")
        _check(self.scheme in SCHEMES, f"scheme must be one of {SCHEMES}")
        _check(self.total_matches >= 0, "total_matches must be >= 0")
        _check(self.checkpoint_interval > 0, "checkpoint_interval must be > 0")
        _check(0 <= self.rng_seed < 2**64, "rng_seed must fit in 64 unsigned bits")
        _check(self.matching_score in ("auto",) + MATCHING_SCORES,
               "matching_score must be auto, elo or ladder")
        _check(self.base_gain > 0, "base_gain must be > 0")
        _check(self.k_min > 0, "k_min must be > 0")
        for name in ("strength_min", "strength_max", "initial_threshold", "relax_step",
                     "max_threshold", "base_gain", "k_min"):
            _check(math.isfinite(getattr(self, name)), f"{name} must be finite")
        self.match_policy()

    @property
    def mean(self) -> float:
        if self.strength_mean is not None:
            return self.strength_mean
        return (self.strength_min + self.strength_max) / 2

    @property
    def sd(self) -> float:
        if self.strength_sd is not None:
            return self.strength_sd
        return (self.strength_max - self.strength_min) / 6

    def match_policy(self) -> MatchPolicy:
        score = self.matching_score
        if score == "auto":
            score = "ladder" if self.scheme == "proposed" else "elo"
        return MatchPolicy(
            matching_score=score,
            initial_threshold=self.initial_threshold,
            relax_step=self.relax_step,
            relax_after=self.relax_after,
            max_threshold=self.max_threshold,
            core_attempts=self.core_attempts,
        )

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}


def _check(ok: bool, msg: str) -> None:
    if not ok:
        raise ConfigValueError(msg)


def config_fields() -> list[dataclasses.Field]:
    return list(dataclasses.fields(SimConfig))


def _coerce(name: str, typ: str, value):
    if isinstance(value, bool):
        raise ConfigValueError(f"{name}: booleans are not accepted")
    if typ == "int":
        if not isinstance(value, int):
            raise ConfigValueError(f"{name}: expected integer, got {value!r}")
        return value
    if typ == "str":
        if not isinstance(value, str):
            raise ConfigValueError(f"{name}: expected string, got {value!r}")
        return value
    # float, possibly optional
    if not isinstance(value, (int, float)):
        raise ConfigValueError(f"{name}: expected number, got {value!r}")
    return float(value)


def from_mapping(data: dict) -> SimConfig:
    """Build a validated config from a flat mapping; unknown keys are rejected."""
    known = {f.name: f for f in config_fields()}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigValueError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in data.items():
        typ = str(known[key].type)
        if value is None and "None" in typ:
            kwargs[key] = None
            continue
        base = "int" if typ.startswith("int") else "str" if typ.startswith("str") else "float"
        kwargs[key] = _coerce(key, base, value)
    return SimConfig(**kwargs)


def load_config(path) -> SimConfig:
    """Read a flat TOML file (``key = value`` with ``#`` comments)."""
    path = Path(path)
    if not path.is_file():
        raise ConfigNotFoundError(f"config file not found: {path}")
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ConfigValueError(f"config must be flat; tables not allowed: {', '.join(nested)}")
    return from_mapping(data)
