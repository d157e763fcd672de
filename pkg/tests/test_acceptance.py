"""Exit criteria, one test per criterion at its stated tolerance.

Run ``pytest tests/test_acceptance.py`` to see the PASS/FAIL table in the
terminal summary.
"""

import time

import numpy as np
import pytest

from ratesim.cli import run_cli
from ratesim.config import SimConfig
from ratesim.core import (
    LOSS,
    WIN,
    display_round,
    expected_score,
    ladder_update_elo,
    performance_score,
    team_win_probability,
)
from ratesim.engine import run_simulation
from ratesim.metrics import MotionReport, convergence_report, history_motion

import test_properties as props

LANE_A = [1600, 1750, 1000, 1300, 1300]
LANE_B = [1400, 1500, 2000, 1000, 1000]
REF_PS_A = [1829, 2041, 500, 1690, 1690]
REF_PS_B = [1225, 1286, 4000, 769, 769]


def test_c01_worked_examples(criterion):
    e = expected_score(2100, 2000)
    a1 = display_round(ladder_update_elo(2100, 10, LOSS, e))
    b1 = display_round(ladder_update_elo(2000, 10, WIN, expected_score(2000, 2100)))
    e2 = expected_score(2100, 1700)
    a2 = display_round(ladder_update_elo(2100, 10, LOSS, e2))
    b2 = display_round(ladder_update_elo(1700, 40, WIN, expected_score(1700, 2100)))
    ok = abs(e - 0.6401) <= 1e-3 and (a1, b1, a2, b2) == (2094, 2006, 2091, 1736)
    criterion(1, ok, f"worked examples: E={e:.4f}, {a1}/{b1}, {a2}/{b2}")
    assert ok


def test_c02_lane_example(criterion):
    ps_a = [performance_score(a, b) for a, b in zip(LANE_A, LANE_B)]
    ps_b = [performance_score(b, a) for a, b in zip(LANE_A, LANE_B)]
    lanes_ok = all(abs(round(x) - y) <= 1 for x, y in zip(ps_a + ps_b, REF_PS_A + REF_PS_B))
    mean_a, mean_b = sum(ps_a) / 5, sum(ps_b) / 5
    ok = lanes_ok and abs(mean_b - 1609.8) <= 0.1 and abs(mean_a - 1550.0) <= 0.1
    criterion(2, ok, f"lane example: scores within +-1, team means "
                     f"A={mean_a:.2f} B={mean_b:.2f}")
    assert ok


def test_c03_methods_expectancy(criterion):
    # Required value is 0.627. Under the expectancy formula team A (weaker)
    # gets 0.373; 0.627 is team B's. Kept as stated, so this one fails.
    p = team_win_probability(1527.2, 1617.4)
    ok = abs(p - 0.627) <= 1e-3
    criterion(3, ok, f"team_win_probability(1527.2, 1617.4) = {p:.4f}, stated 0.627 +-1e-3 "
                     f"(mirror value {team_win_probability(1617.4, 1527.2):.4f})")
    assert ok


def test_c04_motion_identities(criterion):
    rows = [(0.558, 0.442, 0.218), (0.404, 0.596, 0.287)]
    ok = True
    for m, v, ep in rows:
        r = MotionReport.from_velocity(v)
        ok &= abs(r.potential_energy - ep) <= 5e-4 and r.mass + r.velocity == 1.0
        ok &= abs(2 * m * v * v - ep) <= 5e-4 and m + v == 1.0
    criterion(4, ok, "motion rows: E_p = 2mv^2 within 5e-4, m + v = 1 for both rows")
    assert ok


def test_c05_proposed_conservation(criterion):
    t0 = time.perf_counter()
    hist = run_simulation(SimConfig(scheme="proposed", total_matches=1000, rng_seed=5))
    lg = hist.log
    rows = np.arange(len(lg))
    gains = lg.ladder_delta[rows, lg.winner].sum(axis=1)
    err = float(np.max(np.abs(gains - 100.0)))
    dt = time.perf_counter() - t0
    ok = len(lg) == 1000 and err <= 1e-9 and dt < 10
    criterion(5, ok, f"winning-team gain = 100 over 1000 matches, max err {err:.1e}, {dt:.1f}s")
    assert ok


def test_c06_outcome_calibration(criterion):
    t0 = time.perf_counter()
    hist = run_simulation(SimConfig(total_matches=20000, rng_seed=6))
    e = hist.log.expectancy_a
    won_a = (hist.log.winner == 0).astype(float)
    edges = np.quantile(e, np.linspace(0, 1, 11))
    idx = np.clip(np.searchsorted(edges, e, side="right") - 1, 0, 9)
    worst = 0.0
    for b in range(10):
        sel = idx == b
        n = sel.sum()
        se = np.sqrt(np.sum(e[sel] * (1 - e[sel]))) / n
        worst = max(worst, abs(won_a[sel].mean() - e[sel].mean()) / se)
    dt = time.perf_counter() - t0
    ok = worst <= 3.0 and dt < 60
    criterion(6, ok, f"calibration over 20000 matches, 10 deciles: worst |z| = {worst:.2f}, {dt:.1f}s")
    assert ok


SEEDS = range(10)


@pytest.fixture(scope="module")
def paired():
    t0 = time.perf_counter()
    rows = []
    for seed in SEEDS:
        base = SimConfig(player_count=500, total_matches=10000, rng_seed=seed)
        classic = run_simulation(base.replace(scheme="classic-elo"))
        proposed = run_simulation(base.replace(scheme="proposed"))
        rc = convergence_report(classic.snapshots[-1])
        rp = convergence_report(proposed.snapshots[-1], include_elo=False)
        rows.append(dict(classic_ladder=rc.spearman_ladder, classic_elo=rc.spearman_elo,
                         proposed_ladder=rp.spearman_ladder,
                         v_classic=history_motion(classic).velocity,
                         v_proposed=history_motion(proposed).velocity))
    return rows, time.perf_counter() - t0


def test_c07_convergence_ordering(criterion, paired):
    rows, dt = paired
    mean = {k: np.mean([r[k] for r in rows]) for k in rows[0]}
    n1 = sum(r["proposed_ladder"] > r["classic_ladder"] for r in rows)
    n2 = sum(r["classic_elo"] > r["classic_ladder"] for r in rows)
    ok = (mean["proposed_ladder"] > mean["classic_ladder"]
          and mean["classic_elo"] > mean["classic_ladder"] and n1 >= 8 and n2 >= 8 and dt < 300)
    criterion(7, ok, f"spearman means: proposed ladder {mean['proposed_ladder']:.3f}, "
                     f"classic elo {mean['classic_elo']:.3f}, classic ladder "
                     f"{mean['classic_ladder']:.3f}; seeds {n1}/10 and {n2}/10, {dt:.1f}s")
    assert ok


def test_c08_experience_direction(criterion, paired):
    rows, _ = paired
    vc = float(np.mean([r["v_classic"] for r in rows]))
    vp = float(np.mean([r["v_proposed"] for r in rows]))
    in_range = all(0.3 < r[k] < 0.8 for r in rows for k in ("v_classic", "v_proposed"))
    ok = vp > vc and in_range
    criterion(8, ok, f"pooled velocity proposed {vp:.3f} > ELO {vc:.3f}, all in (0.3, 0.8)")
    assert ok


def test_c09_determinism(criterion, tmp_path):
    t0 = time.perf_counter()
    args = ["simulate", "--matches", "10000", "--scheme", "performance-elo", "--seed", "42"]
    rc_a = run_cli(args + ["--out", str(tmp_path / "a")])
    rc_b = run_cli(args + ["--out", str(tmp_path / "b")])
    snaps = sorted((tmp_path / "a" / "snapshots").glob("snapshot_*[0-9].csv"))
    identical = all(p.read_bytes() == (tmp_path / "b" / "snapshots" / p.name).read_bytes()
                    for p in snaps)
    rc_replay = run_cli(["replay", "--manifest", str(tmp_path / "a" / "manifest.json")])
    dt = time.perf_counter() - t0
    ok = rc_a == rc_b == rc_replay == 0 and len(snaps) == 11 and identical and dt < 120
    criterion(9, ok, f"replay exit {rc_replay}, {len(snaps)} byte-identical snapshots, {dt:.1f}s")
    assert ok


PROPERTY_TESTS = [
    props.test_expectancy_symmetry,
    props.test_expectancy_monotone,
    props.test_performance_score_homogeneous,
    props.test_one_v_one_zero_sum,
    props.test_performance_update_reduces_to_classic,
    props.test_k_value_bounds_and_monotone,
]


def test_c10_property_suite(criterion):
    t0 = time.perf_counter()
    failed = []
    for prop in PROPERTY_TESTS:
        try:
            prop()
        except Exception as exc:  # noqa: BLE001
            failed.append(f"{prop.__name__}: {type(exc).__name__}")
    dt = time.perf_counter() - t0
    ok = not failed and dt < 30 and props.N >= 1000
    criterion(10, ok, f"{len(PROPERTY_TESTS)} properties x {props.N} cases, "
                      f"{len(failed)} failed, {dt:.1f}s")
    assert ok, failed
