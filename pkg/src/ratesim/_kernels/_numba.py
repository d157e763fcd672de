"""numba-compiled kernels; loop-form twins of :mod:`._numpy`."""

import numpy as np
from numba import njit

from .layout import N_FILL, TEAM, SCHEME_PROPOSED, K_BASE, K_STEP, K_BAND


@njit(cache=True)
def accept_threshold(need, initial, step, after, max_t):
    k = 0
    while True:
        t = min(initial + step * (k // after), max_t)
        if t >= need:
            return t
        if t >= max_t:
            return -1.0
        k += 1


@njit(cache=True)
def _lane_order(keys, out):
    # stable insertion argsort of five keys
    for i in range(TEAM):
        out[i] = i
    for i in range(1, TEAM):
        j = i
        while j > 0 and keys[out[j - 1]] > keys[out[j]]:
            tmp = out[j - 1]
            out[j - 1] = out[j]
            out[j] = tmp
            j -= 1


@njit(cache=True)
def select_match(scores, core_u, lane_u, initial, step, after, max_t, team_a, team_b):
    n = scores.shape[0]
    fill = np.empty(N_FILL, dtype=np.int64)
    fill_d = np.empty(N_FILL, dtype=np.float64)
    members_a = np.empty(TEAM, dtype=np.int64)
    members_b = np.empty(TEAM, dtype=np.int64)
    order = np.empty(TEAM, dtype=np.int64)
    for attempt in range(core_u.shape[0]):
        a = min(int(core_u[attempt] * n), n - 1)
        sa = scores[a]
        b = -1
        diff = np.inf
        for i in range(n):
            if i == a:
                continue
            d = abs(scores[i] - sa)
            if d < diff:
                diff = d
                b = i
        mean = (sa + scores[b]) * 0.5
        count = 0
        for i in range(n):
            if i == a or i == b:
                continue
            d = abs(scores[i] - mean)
            if count == N_FILL and d >= fill_d[N_FILL - 1]:
                continue
            j = count if count < N_FILL else N_FILL - 1
            while j > 0 and fill_d[j - 1] > d:
                if j < N_FILL:
                    fill_d[j] = fill_d[j - 1]
                    fill[j] = fill[j - 1]
                j -= 1
            fill_d[j] = d
            fill[j] = i
            if count < N_FILL:
                count += 1
        need = max(diff, fill_d[N_FILL - 1])
        t = accept_threshold(need, initial, step, after, max_t)
        if t < 0:
            continue
        members_a[0] = a
        members_b[0] = b
        for j in range(1, TEAM):
            members_a[j] = fill[2 * j - 2]
            members_b[j] = fill[2 * j - 1]
        _lane_order(lane_u[:TEAM], order)
        for j in range(TEAM):
            team_a[j] = members_a[order[j]]
        _lane_order(lane_u[TEAM:2 * TEAM], order)
        for j in range(TEAM):
            team_b[j] = members_b[order[j]]
        return t, diff, attempt
    return -1.0, 0.0, core_u.shape[0]


@njit(cache=True)
def apply_match(team_a, team_b, strength, ladder, elo, games, wins, u_outcome,
                scheme, base_gain, k_min, ps_out, mean_out, ladder_out, elo_out):
    for j in range(TEAM):
        sa = strength[team_a[j]]
        sb = strength[team_b[j]]
        ps_out[0, j] = sa * (sa / sb)
        ps_out[1, j] = sb * (sb / sa)
    for side in range(2):
        acc = 0.0
        for j in range(TEAM):
            acc += ps_out[side, j]
        mean_out[side] = acc / TEAM
    e_a = 1.0 / (1.0 + 10.0 ** ((mean_out[1] - mean_out[0]) / 400.0))
    winner = 0 if u_outcome < e_a else 1
    for side in range(2):
        team = team_a if side == 0 else team_b
        won = side == winner
        s = 1.0 if won else 0.0
        e = e_a if side == 0 else 1.0 - e_a
        pst = mean_out[side]
        for j in range(TEAM):
            p = team[j]
            ps = ps_out[side, j]
            old_ladder = ladder[p]
            if scheme == SCHEME_PROPOSED:
                if won:
                    new_ladder = old_ladder + base_gain * (ps / pst)
                else:
                    new_ladder = old_ladder - base_gain * (pst / ps)
                new_ladder = new_ladder if new_ladder > 0.0 else 0.0
                elo_out[side, j] = 0.0
            else:
                old_elo = elo[p]
                k = K_BASE - K_STEP * np.floor(old_elo / K_BAND)
                k = k if k > k_min else k_min
                surprise = s - e
                new_ladder = old_ladder + k * surprise
                new_ladder = new_ladder if new_ladder > 0.0 else 0.0
                ratio = ps / pst if won else pst / ps
                new_elo = old_elo + ratio * k * surprise
                new_elo = new_elo if new_elo > 0.0 else 0.0
                elo_out[side, j] = new_elo - old_elo
                elo[p] = new_elo
            ladder_out[side, j] = new_ladder - old_ladder
            ladder[p] = new_ladder
            games[p] += 1
            if won:
                wins[p] += 1
    return e_a, winner


@njit(cache=True)
def run_matches(strength, ladder, elo, games, wins, uniforms, match_on_ladder,
                scheme, base_gain, k_min, initial, step, after, max_t,
                ids, ps, means, expectancy, winners, ladder_delta, elo_delta,
                thresholds):
    n_cores = uniforms.shape[1] - 2 * TEAM - 1
    for i in range(uniforms.shape[0]):
        u = uniforms[i]
        scores = ladder if match_on_ladder else elo
        t, _, _ = select_match(scores, u[:n_cores], u[n_cores:n_cores + 2 * TEAM],
                               initial, step, after, max_t, ids[i, 0], ids[i, 1])
        if t < 0:
            return i
        thresholds[i] = t
        e_a, w = apply_match(ids[i, 0], ids[i, 1], strength, ladder, elo, games, wins,
                             u[u.shape[0] - 1], scheme, base_gain, k_min, ps[i],
                             means[i], ladder_delta[i], elo_delta[i])
        expectancy[i] = e_a
        winners[i] = w
    return uniforms.shape[0]
