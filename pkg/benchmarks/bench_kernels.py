"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--players 2000] [--matches 10000] [--repeat 3]

Both backends must produce identical match logs; the script exits non-zero
if they do not.
"""

import argparse
import sys
import time

import numpy as np

from ratesim import _kernels
from ratesim.config import SCHEMES, SimConfig
from ratesim.engine import MatchLog, run_simulation


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same_log(a: MatchLog, b: MatchLog) -> bool:
    return all(np.array_equal(getattr(a, f), getattr(b, f)) for f in MatchLog.__dataclass_fields__)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--players", type=int, default=2000)
    ap.add_argument("--matches", type=int, default=10000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    try:
        _kernels.load_backend("numba")
    except ImportError:
        print("numba is not installed; nothing to compare", file=sys.stderr)
        return 1

    ok = True
    print(f"{'scheme':<16}{'numpy s':>10}{'numba s':>10}{'speedup':>9}  identical")
    for scheme in SCHEMES:
        cfg = SimConfig(player_count=args.players, total_matches=args.matches,
                        rng_seed=args.seed, scheme=scheme)
        run_simulation(cfg.replace(total_matches=10), backend="numba")  # compile / load cache
        t_np, h_np = best_of(lambda: run_simulation(cfg, backend="numpy"), args.repeat)
        t_nb, h_nb = best_of(lambda: run_simulation(cfg, backend="numba"), args.repeat)
        same = same_log(h_np.log, h_nb.log)
        ok &= same
        print(f"{scheme:<16}{t_np:>10.3f}{t_nb:>10.3f}{t_np / t_nb:>8.1f}x  {same}")
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
