"""Compiled event cores for the continuous-time dynamics.

All cores simulate the exact Markov chains by thinning: every vertex carries
a unit-rate clock (contact-process vertices carry a ``1 + lam*deg`` clock)
and proposed events are accepted with probability equal to the true rate
divided by the bound.  Null events do not change the state, so the law of
the jump chain and of all jump times is exactly that of the target process,
at O(1)-ish cost per clock ring even on dense graphs.

Observables are sampled last-event-holds on a fixed grid.  Observable codes:
0 = ones fraction, 1 = discordant edge fraction, 2 = magnetisation (mean
spin, states stored as 0/1).
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .rng import next_below, next_exp, next_unit

OBS_ONES = 0
OBS_DISCORDANT = 1
OBS_MAGNETISATION = 2


@njit(cache=True, inline="always")
def _discordant_count(states, edge_u, edge_v):
    c = 0
    for e in range(edge_u.shape[0]):
        if states[edge_u[e]] != states[edge_v[e]]:
            c += 1
    return c


@njit(cache=True)
def _record(out, si, obs_codes, states, ones, n, edge_u, edge_v):
    for oi in range(obs_codes.shape[0]):
        code = obs_codes[oi]
        if code == OBS_ONES:
            out[oi, si] = ones / n
        elif code == OBS_MAGNETISATION:
            out[oi, si] = (2.0 * ones - n) / n
        else:
            m = edge_u.shape[0]
            out[oi, si] = _discordant_count(states, edge_u, edge_v) / m if m > 0 else 0.0


# ---------------------------------------------------------------------------
# Voter model
# ---------------------------------------------------------------------------


@njit(cache=True)
def vm_run(indptr, targets, states, t_end, sample_ts, obs_codes, out,
           edge_u, edge_v, st, ev_t, ev_v, record_ev):
    n = indptr.shape[0] - 1
    m = edge_u.shape[0]
    ones = 0
    for i in range(n):
        ones += states[i]
    t = 0.0
    t_lastflip = 0.0
    si = 0
    n_ev = 0
    overflow = False
    absorbed = ones == 0 or ones == n
    t_abs = 0.0
    while True:
        if absorbed:
            while si < sample_ts.shape[0] and sample_ts[si] <= t_abs:
                _record(out, si, obs_codes, states, ones, n, edge_u, edge_v)
                si += 1
            return absorbed, t_abs, si, n_ev, overflow
        t_next = t + next_exp(st) / n
        while si < sample_ts.shape[0] and sample_ts[si] < t_next:
            _record(out, si, obs_codes, states, ones, n, edge_u, edge_v)
            # a standstill with mixed opinions means the chain froze earlier
            if 0 < ones < n and m > 0 and _discordant_count(states, edge_u, edge_v) == 0:
                return True, t_lastflip, si + 1, n_ev, overflow
            si += 1
        if t_next > t_end:
            if 0 < ones < n and m > 0 and _discordant_count(states, edge_u, edge_v) == 0:
                return True, t_lastflip, si, n_ev, overflow
            return False, 0.0, si, n_ev, overflow
        t = t_next
        v = next_below(st, n)
        deg = indptr[v + 1] - indptr[v]
        if deg == 0:
            continue
        j = targets[indptr[v] + next_below(st, deg)]
        if states[j] != states[v]:
            ones += 1 if states[j] == 1 else -1
            states[v] = states[j]
            t_lastflip = t
            if record_ev:
                if n_ev < ev_t.shape[0]:
                    ev_t[n_ev] = t
                    ev_v[n_ev] = v
                    n_ev += 1
                else:
                    overflow = True
            if ones == 0 or ones == n:
                absorbed = True
                t_abs = t


# ---------------------------------------------------------------------------
# Contact process
# ---------------------------------------------------------------------------


@njit(cache=True)
def cp_run(indptr, targets, states, lam, t_end, sample_ts, obs_codes, out,
           edge_u, edge_v, st, ev_t, ev_v, record_ev):
    n = indptr.shape[0] - 1
    inf_list = np.empty(n, dtype=np.int64)
    inf_pos = np.full(n, -1, dtype=np.int64)
    n_inf = 0
    degmax = 0
    for v in range(n):
        d = indptr[v + 1] - indptr[v]
        if d > degmax:
            degmax = d
        if states[v] == 1:
            inf_list[n_inf] = v
            inf_pos[v] = n_inf
            n_inf += 1
    bound = 1.0 + lam * degmax
    t = 0.0
    si = 0
    n_ev = 0
    overflow = False
    while True:
        if n_inf == 0:
            while si < sample_ts.shape[0] and sample_ts[si] <= t:
                _record(out, si, obs_codes, states, 0, n, edge_u, edge_v)
                si += 1
            return True, t, si, n_ev, overflow
        t_next = t + next_exp(st) / (n_inf * bound)
        while si < sample_ts.shape[0] and sample_ts[si] < t_next:
            _record(out, si, obs_codes, states, n_inf, n, edge_u, edge_v)
            si += 1
        if t_next > t_end:
            return False, 0.0, si, n_ev, overflow
        t = t_next
        v = inf_list[next_below(st, n_inf)]
        deg = indptr[v + 1] - indptr[v]
        r = next_unit(st) * bound
        if r < 1.0:
            # recovery
            p = inf_pos[v]
            last = inf_list[n_inf - 1]
            inf_list[p] = last
            inf_pos[last] = p
            inf_pos[v] = -1
            n_inf -= 1
            states[v] = 0
            if record_ev:
                if n_ev < ev_t.shape[0]:
                    ev_t[n_ev] = t
                    ev_v[n_ev] = v
                    n_ev += 1
                else:
                    overflow = True
        elif r < 1.0 + lam * deg:
            k = np.int64((r - 1.0) / lam)
            if k >= deg:
                k = deg - 1
            w = targets[indptr[v] + k]
            if states[w] == 0:
                states[w] = 1
                inf_list[n_inf] = w
                inf_pos[w] = n_inf
                n_inf += 1
                if record_ev:
                    if n_ev < ev_t.shape[0]:
                        ev_t[n_ev] = t
                        ev_v[n_ev] = w
                        n_ev += 1
                    else:
                        overflow = True


# ---------------------------------------------------------------------------
# Glauber spin dynamics (states stored as 0/1, spin = 2s - 1)
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _sim_delta_h(indptr, targets, j_stub, states, h, v):
    field = 0.0
    for p in range(indptr[v], indptr[v + 1]):
        w = targets[p]
        if w != v:
            field += j_stub[p] * (2.0 * states[w] - 1.0)
    return 2.0 * (2.0 * states[v] - 1.0) * (field + h)


@njit(cache=True)
def sim_run(indptr, targets, j_stub, states, beta, h, t_end, sample_ts,
            obs_codes, out, edge_u, edge_v, st, stop_ones, ev_t, ev_v, record_ev):
    """stop_ones >= 0 turns the run into a hitting-time run for that ones count;
    returns absorbed=True with the exact hit time."""
    n = indptr.shape[0] - 1
    ones = 0
    for i in range(n):
        ones += states[i]
    t = 0.0
    si = 0
    n_ev = 0
    overflow = False
    if stop_ones >= 0 and ones == stop_ones:
        while si < sample_ts.shape[0] and sample_ts[si] <= 0.0:
            _record(out, si, obs_codes, states, ones, n, edge_u, edge_v)
            si += 1
        return True, 0.0, si, n_ev, overflow
    while True:
        t_next = t + next_exp(st) / n
        while si < sample_ts.shape[0] and sample_ts[si] < t_next:
            _record(out, si, obs_codes, states, ones, n, edge_u, edge_v)
            si += 1
        if t_next > t_end:
            return False, 0.0, si, n_ev, overflow
        t = t_next
        v = next_below(st, n)
        dh = _sim_delta_h(indptr, targets, j_stub, states, h, v)
        if dh > 0.0 and next_unit(st) >= np.exp(-beta * dh):
            continue
        ones += 1 if states[v] == 0 else -1
        states[v] = 1 - states[v]
        if record_ev:
            if n_ev < ev_t.shape[0]:
                ev_t[n_ev] = t
                ev_v[n_ev] = v
                n_ev += 1
            else:
                overflow = True
        if stop_ones >= 0 and ones == stop_ones:
            while si < sample_ts.shape[0] and sample_ts[si] <= t:
                _record(out, si, obs_codes, states, ones, n, edge_u, edge_v)
                si += 1
            return True, t, si, n_ev, overflow


# ---------------------------------------------------------------------------
# Coupled runs sharing one graphical randomness
# ---------------------------------------------------------------------------


@njit(cache=True)
def vm_coupled_run(indptr, targets, lo, hi, t_end, sample_ts, obs_codes,
                   out_lo, out_hi, edge_u, edge_v, st):
    n = indptr.shape[0] - 1
    ones_lo = 0
    ones_hi = 0
    for i in range(n):
        ones_lo += lo[i]
        ones_hi += hi[i]
    t = 0.0
    si = 0
    ordered = True
    while True:
        done_lo = ones_lo == 0 or ones_lo == n
        done_hi = ones_hi == 0 or ones_hi == n
        if done_lo and done_hi:
            while si < sample_ts.shape[0] and sample_ts[si] <= t:
                _record(out_lo, si, obs_codes, lo, ones_lo, n, edge_u, edge_v)
                _record(out_hi, si, obs_codes, hi, ones_hi, n, edge_u, edge_v)
                si += 1
            return ordered, si
        t_next = t + next_exp(st) / n
        while si < sample_ts.shape[0] and sample_ts[si] < t_next:
            _record(out_lo, si, obs_codes, lo, ones_lo, n, edge_u, edge_v)
            _record(out_hi, si, obs_codes, hi, ones_hi, n, edge_u, edge_v)
            si += 1
        if t_next > t_end:
            return ordered, si
        t = t_next
        v = next_below(st, n)
        deg = indptr[v + 1] - indptr[v]
        if deg == 0:
            continue
        j = targets[indptr[v] + next_below(st, deg)]
        if lo[j] != lo[v]:
            ones_lo += 1 if lo[j] == 1 else -1
            lo[v] = lo[j]
        if hi[j] != hi[v]:
            ones_hi += 1 if hi[j] == 1 else -1
            hi[v] = hi[j]
        if lo[v] > hi[v]:
            ordered = False


@njit(cache=True)
def cp_coupled_run(indptr, targets, stub_owner, lo, hi, lam, t_end,
                   sample_ts, obs_codes, out_lo, out_hi, edge_u, edge_v, st):
    n = indptr.shape[0] - 1
    s_total = targets.shape[0]
    ones_lo = 0
    ones_hi = 0
    for i in range(n):
        ones_lo += lo[i]
        ones_hi += hi[i]
    rate = n + lam * s_total
    t = 0.0
    si = 0
    ordered = True
    while True:
        if ones_hi == 0 and ones_lo == 0:
            while si < sample_ts.shape[0] and sample_ts[si] <= t:
                _record(out_lo, si, obs_codes, lo, ones_lo, n, edge_u, edge_v)
                _record(out_hi, si, obs_codes, hi, ones_hi, n, edge_u, edge_v)
                si += 1
            return ordered, si
        t_next = t + next_exp(st) / rate
        while si < sample_ts.shape[0] and sample_ts[si] < t_next:
            _record(out_lo, si, obs_codes, lo, ones_lo, n, edge_u, edge_v)
            _record(out_hi, si, obs_codes, hi, ones_hi, n, edge_u, edge_v)
            si += 1
        if t_next > t_end:
            return ordered, si
        t = t_next
        r = next_unit(st) * rate
        if r < n:
            # recovery mark at vertex v, applied in both copies
            v = np.int64(r)
            if v >= n:
                v = n - 1
            if lo[v] == 1:
                lo[v] = 0
                ones_lo -= 1
            if hi[v] == 1:
                hi[v] = 0
                ones_hi -= 1
            if lo[v] > hi[v]:
                ordered = False
        else:
            # infection arrow along stub p, fires wherever its source is infected
            p = np.int64((r - n) / lam)
            if p >= s_total:
                p = s_total - 1
            u = stub_owner[p]
            w = targets[p]
            if lo[u] == 1 and lo[w] == 0:
                lo[w] = 1
                ones_lo += 1
            if hi[u] == 1 and hi[w] == 0:
                hi[w] = 1
                ones_hi += 1
            if lo[w] > hi[w]:
                ordered = False


# ---------------------------------------------------------------------------
# Dynamics with edge rewiring (degree-preserving double swaps)
# ---------------------------------------------------------------------------

MODEL_VM = 0
MODEL_CP = 1
MODEL_SIM = 2


@njit(cache=True, inline="always")
def _do_swap(targets, stub_edge, estub0, estub1, edge_u, edge_v, e1, e2, alt):
    a = edge_u[e1]
    b = edge_v[e1]
    c = edge_u[e2]
    d = edge_v[e2]
    pa = estub0[e1]
    pb = estub1[e1]
    pc = estub0[e2]
    pd = estub1[e2]
    if alt:
        # {a,b},{c,d} -> {a,c},{b,d}
        targets[pa] = c
        targets[pc] = a
        stub_edge[pc] = e1
        targets[pb] = d
        stub_edge[pb] = e2
        targets[pd] = b
        edge_u[e1] = a
        edge_v[e1] = c
        estub0[e1] = pa
        estub1[e1] = pc
        edge_u[e2] = b
        edge_v[e2] = d
        estub0[e2] = pb
        estub1[e2] = pd
    else:
        # {a,b},{c,d} -> {a,d},{b,c}
        targets[pa] = d
        targets[pd] = a
        stub_edge[pd] = e1
        targets[pb] = c
        stub_edge[pb] = e2
        targets[pc] = b
        edge_u[e1] = a
        edge_v[e1] = d
        estub0[e1] = pa
        estub1[e1] = pd
        edge_u[e2] = b
        edge_v[e2] = c
        estub0[e2] = pb
        estub1[e2] = pc


@njit(cache=True)
def rewire_run(model_code, indptr, targets, stub_edge, estub0, estub1,
               edge_u, edge_v, states, lam, beta, h, j_scalar, nu,
               t_end, sample_ts, obs_codes, out, st, out_deg, track_deg):
    n = indptr.shape[0] - 1
    m = edge_u.shape[0]
    rw_rate = nu * (m - 1) / 2.0 if m >= 2 else 0.0
    ones = 0
    for i in range(n):
        ones += states[i]
    degmax = 0
    for v in range(n):
        d = indptr[v + 1] - indptr[v]
        if d > degmax:
            degmax = d
    cp_bound = 1.0 + lam * degmax
    # contact-process infected list (degrees are preserved, so the bound is fixed)
    inf_list = np.empty(n, dtype=np.int64)
    inf_pos = np.full(n, -1, dtype=np.int64)
    n_inf = 0
    if model_code == MODEL_CP:
        for v in range(n):
            if states[v] == 1:
                inf_list[n_inf] = v
                inf_pos[v] = n_inf
                n_inf += 1
    t = 0.0
    si = 0
    tagged_hits = 0
    j_stub = np.full(targets.shape[0], j_scalar)
    while True:
        if model_code == MODEL_VM:
            dyn_rate = float(n)
        elif model_code == MODEL_CP:
            dyn_rate = n_inf * cp_bound
        else:
            dyn_rate = float(n)
        total = dyn_rate + rw_rate
        if total <= 0.0:
            while si < sample_ts.shape[0] and sample_ts[si] <= t_end:
                _record(out, si, obs_codes, states, ones, n, edge_u, edge_v)
                if track_deg:
                    for v in range(n):
                        out_deg[si, v] = indptr[v + 1] - indptr[v]
                si += 1
            return si, tagged_hits
        t_next = t + next_exp(st) / total
        while si < sample_ts.shape[0] and sample_ts[si] < t_next:
            _record(out, si, obs_codes, states, ones, n, edge_u, edge_v)
            if track_deg:
                for v in range(n):
                    out_deg[si, v] = indptr[v + 1] - indptr[v]
            si += 1
        if t_next > t_end:
            return si, tagged_hits
        t = t_next
        if next_unit(st) * total < rw_rate:
            e1 = next_below(st, m)
            e2 = next_below(st, m - 1)
            if e2 >= e1:
                e2 += 1
            if e1 == 0 or e2 == 0:
                tagged_hits += 1
            _do_swap(targets, stub_edge, estub0, estub1, edge_u, edge_v,
                     e1, e2, next_unit(st) < 0.5)
            continue
        if model_code == MODEL_VM:
            v = next_below(st, n)
            deg = indptr[v + 1] - indptr[v]
            if deg == 0:
                continue
            j = targets[indptr[v] + next_below(st, deg)]
            if states[j] != states[v]:
                ones += 1 if states[j] == 1 else -1
                states[v] = states[j]
        elif model_code == MODEL_CP:
            if n_inf == 0:
                continue
            v = inf_list[next_below(st, n_inf)]
            deg = indptr[v + 1] - indptr[v]
            r = next_unit(st) * cp_bound
            if r < 1.0:
                p = inf_pos[v]
                last = inf_list[n_inf - 1]
                inf_list[p] = last
                inf_pos[last] = p
                inf_pos[v] = -1
                n_inf -= 1
                states[v] = 0
                ones -= 1
            elif r < 1.0 + lam * deg:
                k = np.int64((r - 1.0) / lam)
                if k >= deg:
                    k = deg - 1
                w = targets[indptr[v] + k]
                if states[w] == 0:
                    states[w] = 1
                    inf_list[n_inf] = w
                    inf_pos[w] = n_inf
                    n_inf += 1
                    ones += 1
        else:
            v = next_below(st, n)
            dh = _sim_delta_h(indptr, targets, j_stub, states, h, v)
            if dh > 0.0 and next_unit(st) >= np.exp(-beta * dh):
                continue
            ones += 1 if states[v] == 0 else -1
            states[v] = 1 - states[v]


# ---------------------------------------------------------------------------
# Coalescing random walks
# ---------------------------------------------------------------------------


@njit(cache=True)
def coalescing_run(indptr, targets, positions, t_end, st, ev_t, ev_surv, ev_abs):
    """Walkers jump at rate 1 to a uniform incident stub and merge on meeting
    (lower id survives).  Walkers on isolated vertices never move.  Mutates
    ``positions`` in place and returns (n_events, n_alive, t_reached)."""
    n = indptr.shape[0] - 1
    w = positions.shape[0]
    occ = np.full(n, -1, dtype=np.int64)
    alive = np.empty(w, dtype=np.int64)
    n_alive = 0
    n_ev = 0
    # walkers placed on an occupied vertex merge at time 0
    for i in range(w):
        v = positions[i]
        if occ[v] >= 0:
            ev_t[n_ev] = 0.0
            ev_surv[n_ev] = occ[v]
            ev_abs[n_ev] = i
            n_ev += 1
        else:
            occ[v] = i
            alive[n_alive] = i
            n_alive += 1
    t = 0.0
    while n_alive > 1:
        movable = 0
        for k in range(n_alive):
            v = positions[alive[k]]
            if indptr[v + 1] - indptr[v] > 0:
                movable += 1
        if movable == 0:
            return n_ev, n_alive, t_end
        t_next = t + next_exp(st) / n_alive
        if t_next > t_end:
            return n_ev, n_alive, t_end
        t = t_next
        k = next_below(st, n_alive)
        wid = alive[k]
        v = positions[wid]
        deg = indptr[v + 1] - indptr[v]
        if deg == 0:
            continue
        v_new = targets[indptr[v] + next_below(st, deg)]
        if v_new == v:
            continue
        other = occ[v_new]
        occ[v] = -1
        if other >= 0:
            if other < wid:
                surv, dead = other, wid
            else:
                surv, dead = wid, other
            positions[surv] = v_new
            occ[v_new] = surv
            ev_t[n_ev] = t
            ev_surv[n_ev] = surv
            ev_abs[n_ev] = dead
            n_ev += 1
            # drop the dead walker from the alive list
            for k2 in range(n_alive):
                if alive[k2] == dead:
                    alive[k2] = alive[n_alive - 1]
                    n_alive -= 1
                    break
        else:
            positions[wid] = v_new
            occ[v_new] = wid
    return n_ev, n_alive, t


@njit(cache=True)
def pair_meeting_run(indptr, targets, x, y, t_cap, st):
    """First meeting time of two independent walkers; (met, tau)."""
    if x == y:
        return True, 0.0
    t = 0.0
    px = x
    py = y
    while True:
        degx = indptr[px + 1] - indptr[px]
        degy = indptr[py + 1] - indptr[py]
        movers = (1 if degx > 0 else 0) + (1 if degy > 0 else 0)
        if movers == 0:
            return False, t_cap
        t_next = t + next_exp(st) / 2.0
        if t_next > t_cap:
            return False, t_cap
        t = t_next
        if next_unit(st) < 0.5:
            if degx > 0:
                px = targets[indptr[px] + next_below(st, degx)]
        else:
            if degy > 0:
                py = targets[indptr[py] + next_below(st, degy)]
        if px == py:
            return True, t


# ---------------------------------------------------------------------------
# Annealed meeting on the configuration model (discrete asynchronous steps)
# ---------------------------------------------------------------------------


@njit(cache=True)
def annealed_meeting_runs(vindptr, stub_owner, match, t_max, non_backtracking,
                          distinct_starts, reps, st):
    """Simultaneous lazy stub-matching and asynchronous walk moves.

    Per move: a fair coin picks the mover; the mover draws a uniform stub at
    its site (strict non-backtracking excludes the arrival stub when degree
    permits); unmatched stubs are matched to a uniform unmatched partner on
    demand.  Returns counts over reps of (tau <= t_max, tau == t_max,
    tau == t_max with the designated first walker moving first).
    """
    n = vindptr.shape[0] - 1
    s_total = stub_owner.shape[0]
    cnt_le = 0
    cnt_eq = 0
    cnt_eq_xfirst = 0
    touched = np.empty(2 * t_max + 4, dtype=np.int64)
    for _ in range(reps):
        o = next_below(st, n)
        px = o
        py = o
        if distinct_starts:
            py = next_below(st, n - 1)
            if py >= o:
                py += 1
        ax = np.int64(-1)  # arrival stub of walker X
        ay = np.int64(-1)
        n_touched = 0
        tau = -1
        x_first = False
        for step in range(1, t_max + 1):
            mover_is_x = next_unit(st) < 0.5
            if step == 1:
                x_first = mover_is_x
            v = px if mover_is_x else py
            arr = ax if mover_is_x else ay
            deg = vindptr[v + 1] - vindptr[v]
            if deg == 0:
                continue
            if non_backtracking and arr >= 0 and deg > 1:
                idx_prev = arr - vindptr[v]
                j = next_below(st, deg - 1)
                if j >= idx_prev:
                    j += 1
            else:
                j = next_below(st, deg)
            pos = vindptr[v] + j
            if match[pos] == -1:
                q = next_below(st, s_total)
                while match[q] != -1 or q == pos:
                    q = next_below(st, s_total)
                match[pos] = q
                match[q] = pos
                touched[n_touched] = pos
                touched[n_touched + 1] = q
                n_touched += 2
            partner = match[pos]
            w = stub_owner[partner]
            if mover_is_x:
                px = w
                ax = partner
            else:
                py = w
                ay = partner
            if px == py:
                tau = step
                break
        for k in range(n_touched):
            match[touched[k]] = -1
        if tau >= 1 and tau <= t_max:
            cnt_le += 1
            if tau == t_max:
                cnt_eq += 1
                if x_first:
                    cnt_eq_xfirst += 1
    return cnt_le, cnt_eq, cnt_eq_xfirst
