"""CSV/JSON artifacts: snapshots, metrics, match log, histogram and manifest.

Every writer is deterministic: fixed column order, ``.`` decimals, ``\\n``
line endings, no timestamps.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import display_round
from .engine import RNG_ALGORITHM, RunHistory, Snapshot
from .matchmaking import LANES
from .metrics import (
    ConvergenceReport,
    MotionReport,
    history_motion,
    history_reports,
    match_velocities,
    velocity_histogram,
)

SNAPSHOT_HEADER = ["player_id", "strength", "ladder", "elo", "games_played", "wins"]
SORTED_HEADER = ["rank", "strength", "ladder", "elo"]
METRICS_HEADER = ["checkpoint", "matches", "spearman_ladder", "pearson_ladder", "rmse_ladder",
                  "spearman_elo", "pearson_elo", "rmse_elo"]
MATCHES_HEADER = ["match", "team", "lane", "player_id", "ps", "team_ps_mean", "expectancy_a",
                  "winner", "ladder_delta", "elo_delta", "threshold"]
HIST_HEADER = ["bin_lo", "bin_hi", "count"]
MANIFEST_NAME = "manifest.json"


class CsvFormatError(ValueError):
    pass


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _open_w(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("w", newline="", encoding="ascii")


def _f(x: float, digits: int = 6) -> str:
    s = f"{x:.{digits}f}"
    return "0." + "0" * digits if s == "-0." + "0" * digits else s


def export_snapshot(snapshot: Snapshot, path) -> Path:
    path = Path(path)
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(SNAPSHOT_HEADER)
        for i in range(len(snapshot)):
            w.writerow([i, _f(snapshot.strength[i]), display_round(snapshot.ladder[i]),
                        display_round(snapshot.elo[i]), int(snapshot.games_played[i]),
                        int(snapshot.wins[i])])
    return path


def export_sorted(snapshot: Snapshot, path) -> Path:
    """Plot-ready curve: players ranked by latent strength (ties by id)."""
    path = Path(path)
    order = np.lexsort((np.arange(len(snapshot)), snapshot.strength))
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(SORTED_HEADER)
        for rank, i in enumerate(order, start=1):
            w.writerow([rank, _f(snapshot.strength[i]), display_round(snapshot.ladder[i]),
                        display_round(snapshot.elo[i])])
    return path


def _strict_rows(path: Path, header: list[str]):
    with Path(path).open(newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh, strict=True))
    if not rows or rows[0] != header:
        raise CsvFormatError(f"{path}: header mismatch")
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CsvFormatError(f"{path}:{n}: expected {len(header)} fields, got {len(row)}")
    return rows[1:]


def read_snapshot(path, matches: int = 0) -> Snapshot:
    """Parse a snapshot CSV; ladder and elo come back as their exported integers."""
    rows = _strict_rows(Path(path), SNAPSHOT_HEADER)
    try:
        ids = [int(r[0]) for r in rows]
        cols = [[float(r[1]) for r in rows], [int(r[2]) for r in rows],
                [int(r[3]) for r in rows], [int(r[4]) for r in rows], [int(r[5]) for r in rows]]
    except ValueError as exc:
        raise CsvFormatError(f"{path}: {exc}") from exc
    if ids != list(range(len(ids))):
        raise CsvFormatError(f"{path}: player ids must be 0..n-1 in order")
    return Snapshot.from_arrays(matches, *cols)


def _opt(x: float | None) -> str:
    return "" if x is None else _f(x)


def export_metrics(reports: list[ConvergenceReport], motion: MotionReport | None, path) -> Path:
    path = Path(path)
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(METRICS_HEADER)
        for r in reports:
            w.writerow([r.checkpoint, r.matches, _f(r.spearman_ladder), _f(r.pearson_ladder),
                        _f(r.rmse_ladder), _opt(r.spearman_elo), _opt(r.pearson_elo),
                        _opt(r.rmse_elo)])
        if motion is None:
            w.writerow(["motion", "", "", "", ""])
        else:
            w.writerow(["motion"] + motion.row().split(","))
    return path


def read_metrics(path) -> tuple[list[dict], dict | None]:
    """Return ``(checkpoint rows, motion)``; motion keys are v, m, p, Ep."""
    with Path(path).open(newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh, strict=True))
    if not rows or rows[0] != METRICS_HEADER:
        raise CsvFormatError(f"{path}: header mismatch")
    if not rows[-1] or rows[-1][0] != "motion" or len(rows[-1]) != 5:
        raise CsvFormatError(f"{path}: missing trailing motion record")
    out = []
    for row in rows[1:-1]:
        if len(row) != len(METRICS_HEADER):
            raise CsvFormatError(f"{path}: ragged metrics row")
        rec = {"checkpoint": int(row[0]), "matches": int(row[1])}
        for k, v in zip(METRICS_HEADER[2:], row[2:]):
            rec[k] = float(v) if v else None
        out.append(rec)
    m = rows[-1][1:]
    motion = None if m[0] == "" else dict(zip(("v", "m", "p", "Ep"), map(float, m)))
    return out, motion


def export_matches(history: RunHistory, path) -> Path:
    """Long-format match log: one row per player per match."""
    path = Path(path)
    lg = history.log
    tracks_elo = history.scheme.tracks_elo
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(MATCHES_HEADER)
        for i in range(len(lg)):
            e_a = _f(lg.expectancy_a[i], 9)
            winner = "AB"[lg.winner[i]]
            thr = _f(lg.threshold[i], 3)
            for side in range(2):
                mean = _f(lg.team_ps_mean[i, side])
                for j, lane in enumerate(LANES):
                    w.writerow([i, "AB"[side], lane, int(lg.ids[i, side, j]),
                                _f(lg.ps[i, side, j]), mean, e_a, winner,
                                _f(lg.ladder_delta[i, side, j]),
                                _f(lg.elo_delta[i, side, j]) if tracks_elo else "", thr])
    return path


def export_histogram(velocities: np.ndarray, path) -> Path:
    path = Path(path)
    edges, counts = velocity_histogram(velocities)
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(HIST_HEADER)
        for k in range(len(edges) - 1):
            w.writerow([f"{edges[k]:.1f}", f"{edges[k + 1]:.1f}", int(counts[k])])
        w.writerow([f"{edges[-1]:.1f}", "inf", int(counts[-1])])
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    config: dict
    rng_seed: int
    backend: str
    artifacts: dict[str, str] = field(default_factory=dict)  # relative path -> sha256
    checkpoints: list[dict] = field(default_factory=list)
    tool_version: str = __version__
    rng: str = RNG_ALGORITHM

    def to_json(self) -> str:
        doc = {
            "tool": "ratesim",
            "tool_version": self.tool_version,
            "rng": self.rng,
            "rng_seed": self.rng_seed,
            "backend": self.backend,
            "config": self.config,
            "checkpoints": self.checkpoints,
            "artifacts": self.artifacts,
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    @classmethod
    def load(cls, path) -> "RunManifest":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if doc.get("tool") != "ratesim":
            raise ValueError(f"{path}: not a ratesim manifest")
        return cls(config=doc["config"], rng_seed=doc["rng_seed"], backend=doc["backend"],
                   artifacts=doc["artifacts"], checkpoints=doc["checkpoints"],
                   tool_version=doc["tool_version"], rng=doc["rng"])


def write_run(history: RunHistory, out_dir) -> RunManifest:
    """Write every artifact of ``history`` under ``out_dir`` plus ``manifest.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    index = []
    width = max(6, len(str(history.config.total_matches)))
    for k, snap in enumerate(history.snapshots):
        stem = f"snapshots/snapshot_{snap.matches:0{width}d}"
        p1 = export_snapshot(snap, out / f"{stem}.csv")
        p2 = export_sorted(snap, out / f"{stem}_sorted.csv")
        written += [p1, p2]
        index.append({"index": k, "matches": snap.matches,
                      "snapshot": f"{stem}.csv", "sorted": f"{stem}_sorted.csv"})
    motion = history_motion(history)
    written.append(export_metrics(history_reports(history), motion, out / "metrics.csv"))
    written.append(export_matches(history, out / "matches.csv"))
    written.append(export_histogram(match_velocities(history.log), out / "velocity_hist.csv"))
    manifest = RunManifest(
        config=history.config.to_dict(),
        rng_seed=history.config.rng_seed,
        backend=history.backend,
        artifacts={p.relative_to(out).as_posix(): sha256_file(p) for p in written},
        checkpoints=index,
    )
    (out / MANIFEST_NAME).write_text(manifest.to_json(), encoding="utf-8")
    return manifest


def verify_artifacts(manifest: RunManifest, run_dir) -> list[str]:
    """Problems found checking that each referenced file exists, parses and
    matches its recorded hash. Empty list means the run is intact."""
    problems = []
    run_dir = Path(run_dir)
    for rel, digest in manifest.artifacts.items():
        p = run_dir / rel
        if not p.is_file():
            problems.append(f"missing: {rel}")
            continue
        if sha256_file(p) != digest:
            problems.append(f"hash mismatch: {rel}")
    for cp in manifest.checkpoints:
        try:
            read_snapshot(run_dir / cp["snapshot"], cp["matches"])
            _strict_rows(run_dir / cp["sorted"], SORTED_HEADER)
        except (OSError, CsvFormatError, ValueError) as exc:
            problems.append(f"unparseable checkpoint {cp['index']}: {exc}")
    if "metrics.csv" in manifest.artifacts:
        try:
            read_metrics(run_dir / "metrics.csv")
        except (OSError, CsvFormatError, ValueError) as exc:
            problems.append(f"unparseable metrics: {exc}")
    return problems
