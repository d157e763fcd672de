"""Pure-numpy kernels. Reference path and fallback when numba is disabled.

Must stay bit-identical to :mod:`._numba`; sums over the five lanes are
accumulated left to right in both.
"""

import numpy as np

from .layout import N_FILL, TEAM, SCHEME_PROPOSED, K_BASE, K_STEP, K_BAND


def accept_threshold(need, initial, step, after, max_t):
    k = 0
    while True:
        t = min(initial + step * (k // after), max_t)
        if t >= need:
            return t
        if t >= max_t:
            return -1.0
        k += 1


def select_match(scores, core_u, lane_u, initial, step, after, max_t, team_a, team_b):
    """Fill ``team_a``/``team_b`` (lane order) and return
    ``(threshold, core_diff, attempt)``; threshold is -1 on failure."""
    n = scores.shape[0]
    for attempt in range(core_u.shape[0]):
        a = min(int(core_u[attempt] * n), n - 1)
        sa = scores[a]
        d = np.abs(scores - sa)
        d[a] = np.inf
        b = int(np.argmin(d))
        diff = float(d[b])
        mean = (sa + scores[b]) * 0.5
        dm = np.abs(scores - mean)
        dm[a] = np.inf
        dm[b] = np.inf
        kth = np.partition(dm, N_FILL - 1)[N_FILL - 1]
        cand = np.flatnonzero(dm <= kth)
        fill = cand[np.argsort(dm[cand], kind="stable")[:N_FILL]]
        need = max(diff, float(dm[fill[N_FILL - 1]]))
        t = accept_threshold(need, initial, step, after, max_t)
        if t < 0:
            continue
        members_a = np.array([a, fill[0], fill[2], fill[4], fill[6]], dtype=np.int64)
        members_b = np.array([b, fill[1], fill[3], fill[5], fill[7]], dtype=np.int64)
        team_a[:] = members_a[np.argsort(lane_u[:TEAM], kind="stable")]
        team_b[:] = members_b[np.argsort(lane_u[TEAM:2 * TEAM], kind="stable")]
        return t, diff, attempt
    return -1.0, 0.0, core_u.shape[0]


def _seq_sum(x):
    s = 0.0
    for v in x:
        s += v
    return s


def k_values(elo, k_min):
    k = K_BASE - K_STEP * np.floor(elo / K_BAND)
    return np.where(k > k_min, k, k_min)


def apply_match(team_a, team_b, strength, ladder, elo, games, wins, u_outcome,
                scheme, base_gain, k_min, ps_out, mean_out, ladder_out, elo_out):
    """Play one match in place; returns ``(expectancy_a, winner)``."""
    sa = strength[team_a]
    sb = strength[team_b]
    ps_out[0] = sa * (sa / sb)
    ps_out[1] = sb * (sb / sa)
    mean_out[0] = _seq_sum(ps_out[0]) / TEAM
    mean_out[1] = _seq_sum(ps_out[1]) / TEAM
    e_a = 1.0 / (1.0 + 10.0 ** ((float(mean_out[1]) - float(mean_out[0])) / 400.0))
    winner = 0 if u_outcome < e_a else 1
    exp = np.array([e_a, 1.0 - e_a])
    for side, team in ((0, team_a), (1, team_b)):
        won = side == winner
        s = 1.0 if won else 0.0
        ps = ps_out[side]
        pst = mean_out[side]
        old_ladder = ladder[team]
        if scheme == SCHEME_PROPOSED:
            if won:
                new_ladder = old_ladder + base_gain * (ps / pst)
            else:
                new_ladder = old_ladder - base_gain * (pst / ps)
            new_ladder = np.where(new_ladder > 0.0, new_ladder, 0.0)
            ladder_out[side] = new_ladder - old_ladder
            elo_out[side] = 0.0
        else:
            old_elo = elo[team]
            k = k_values(old_elo, k_min)
            surprise = s - exp[side]
            new_ladder = old_ladder + k * surprise
            new_ladder = np.where(new_ladder > 0.0, new_ladder, 0.0)
            ratio = ps / pst if won else pst / ps
            new_elo = old_elo + ratio * k * surprise
            new_elo = np.where(new_elo > 0.0, new_elo, 0.0)
            ladder_out[side] = new_ladder - old_ladder
            elo_out[side] = new_elo - old_elo
            elo[team] = new_elo
        ladder[team] = new_ladder
        games[team] += 1
        if won:
            wins[team] += 1
    return e_a, winner


def run_matches(strength, ladder, elo, games, wins, uniforms, match_on_ladder,
                scheme, base_gain, k_min, initial, step, after, max_t,
                ids, ps, means, expectancy, winners, ladder_delta, elo_delta,
                thresholds):
    """Run ``len(uniforms)`` matches; returns how many completed."""
    n_cores = uniforms.shape[1] - 2 * TEAM - 1
    scores = ladder if match_on_ladder else elo
    for i in range(uniforms.shape[0]):
        u = uniforms[i]
        t, _, _ = select_match(scores, u[:n_cores], u[n_cores:n_cores + 2 * TEAM],
                               initial, step, after, max_t, ids[i, 0], ids[i, 1])
        if t < 0:
            return i
        thresholds[i] = t
        e_a, w = apply_match(ids[i, 0], ids[i, 1], strength, ladder, elo, games, wins,
                             u[-1], scheme, base_gain, k_min, ps[i], means[i],
                             ladder_delta[i], elo_delta[i])
        expectancy[i] = e_a
        winners[i] = w
    return uniforms.shape[0]
