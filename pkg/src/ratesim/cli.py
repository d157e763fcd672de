"""Command-line entry point: ``ratesim simulate | compare | replay``.

Exit codes: 0 success, 1 usage, 2 config, 3 runtime, 4 replay mismatch.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import SCHEMES, SimConfig, config_fields, from_mapping, load_config
from .engine import run_simulation
from .errors import ConfigError, RatesimError
from .export import MANIFEST_NAME, RunManifest, verify_artifacts, write_run
from .metrics import convergence_report, history_motion

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME, EXIT_MISMATCH = 0, 1, 2, 3, 4
OUT_ENV = "RATESIM_OUT"
COMPARE_HEADER = ["seed", "classic_spearman_ladder", "classic_spearman_elo",
                  "proposed_spearman_ladder", "classic_velocity", "proposed_velocity",
                  "proposed_beats_classic"]

log = logging.getLogger("ratesim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _defaults_epilog() -> str:
    lines = ["config keys (flat TOML, '#' comments) and defaults:"]
    for f in config_fields():
        lines.append(f"  {f.name} = {f.default!r}")
    lines.append(f"output directory defaults to ${OUT_ENV}, else ./ratesim_out")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    p = _Parser(prog="ratesim", description=__doc__, formatter_class=fmt,
                epilog=_defaults_epilog())
    p.add_argument("--version", action="version", version=f"ratesim {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run one scheme and export artifacts",
                         formatter_class=fmt, epilog=_defaults_epilog())
    sim.add_argument("--config", type=Path)
    sim.add_argument("--scheme", choices=SCHEMES)
    sim.add_argument("--matches", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", type=Path)
    sim.add_argument("--backend", choices=("numba", "numpy"))

    cmp_ = sub.add_parser("compare", help="classic ELO vs proposed on paired seeds",
                          formatter_class=fmt, epilog=_defaults_epilog())
    cmp_.add_argument("--config", type=Path)
    cmp_.add_argument("--matches", type=int)
    cmp_.add_argument("--seeds", type=int, default=10)
    cmp_.add_argument("--seed", type=int, help="base seed; run i uses seed + i")
    cmp_.add_argument("--out", type=Path)
    cmp_.add_argument("--jobs", type=int, default=1)
    cmp_.add_argument("--backend", choices=("numba", "numpy"))

    rep = sub.add_parser("replay", help="re-run a manifest and verify identical output")
    rep.add_argument("--manifest", type=Path, required=True)
    return p


def _out_dir(arg: Path | None) -> Path:
    if arg is not None:
        return arg
    return Path(os.environ.get(OUT_ENV) or "ratesim_out")


def _base_config(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    changes = {}
    if getattr(args, "scheme", None):
        changes["scheme"] = args.scheme
    if args.matches is not None:
        changes["total_matches"] = args.matches
    if args.seed is not None:
        changes["rng_seed"] = args.seed
    return cfg.replace(**changes) if changes else cfg


def cmd_simulate(args) -> int:
    cfg = _base_config(args)
    out = _out_dir(args.out)
    history = run_simulation(cfg, backend=args.backend)
    manifest = write_run(history, out)
    final = history.snapshots[-1]
    rep = convergence_report(final, include_elo=history.scheme.tracks_elo)
    msg = f"{cfg.scheme}: {cfg.total_matches} matches, spearman(ladder)={rep.spearman_ladder:.3f}"
    if rep.spearman_elo is not None:
        msg += f", spearman(elo)={rep.spearman_elo:.3f}"
    print(msg)
    print(f"wrote {len(manifest.artifacts)} files + {out / MANIFEST_NAME}")
    return EXIT_OK


def compare_one(cfg: SimConfig, seed: int, backend=None) -> list:
    """One paired row of the ordering table."""
    classic = run_simulation(cfg.replace(scheme="classic-elo", rng_seed=seed), backend=backend)
    proposed = run_simulation(cfg.replace(scheme="proposed", rng_seed=seed), backend=backend)
    rc = convergence_report(classic.snapshots[-1])
    rp = convergence_report(proposed.snapshots[-1], include_elo=False)
    vc = history_motion(classic)
    vp = history_motion(proposed)
    return [seed, rc.spearman_ladder, rc.spearman_elo, rp.spearman_ladder,
            vc.velocity if vc else float("nan"), vp.velocity if vp else float("nan"),
            int(rp.spearman_ladder > rc.spearman_ladder)]


def cmd_compare(args) -> int:
    cfg = _base_config(args)
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    seeds = [cfg.rng_seed + i for i in range(args.seeds)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(compare_one, [cfg] * len(seeds), seeds,
                               [args.backend] * len(seeds)))
    else:
        rows = [compare_one(cfg, s, args.backend) for s in seeds]
    out = _out_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "compare.csv"
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARE_HEADER)
        for r in rows:
            w.writerow([r[0]] + [f"{x:.6f}" for x in r[1:6]] + [r[6]])
    wins = sum(r[6] for r in rows)
    print(f"proposed > classic (spearman ladder) in {wins}/{len(rows)} seeds "
          f"at {cfg.total_matches} matches")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_replay(args) -> int:
    manifest_path = args.manifest
    run_dir = manifest_path.parent
    try:
        manifest = RunManifest.load(manifest_path)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read manifest: {exc}") from exc
    problems = verify_artifacts(manifest, run_dir)
    if problems:
        for msg in problems:
            print(f"replay: {msg}", file=sys.stderr)
        return EXIT_MISMATCH
    cfg = from_mapping(manifest.config)
    with tempfile.TemporaryDirectory() as tmp:
        history = run_simulation(cfg, backend=manifest.backend)
        fresh = write_run(history, tmp)
    diff = sorted(set(fresh.artifacts.items()) ^ set(manifest.artifacts.items()))
    if diff:
        for rel in sorted({rel for rel, _ in diff}):
            print(f"replay: output differs: {rel}", file=sys.stderr)
        return EXIT_MISMATCH
    print(f"replay ok: {len(fresh.artifacts)} artifacts identical")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "compare": cmd_compare, "replay": cmd_replay}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RatesimError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
