import math
from fractions import Fraction

import numpy as np
import pytest

from ipslab import analytics as an
from ipslab import dual
from ipslab import dynamics as dyn
from ipslab import graphgen as gg
from ipslab import obsstats as obs
from ipslab import rng
from ipslab.errors import DomainError, PreconditionError
from ipslab.models import VM

U = np.uint64


def seeds(master, n):
    return [int(rng.derive_seed(U(master), U(k))) for k in range(n)]


def test_single_walker_never_coalesces():
    g = gg.generate(gg.Complete(5), 0)
    ws = dual.coalescing_walks(g, [2], 10.0, 3)
    assert ws.events == [] and ws.alive.sum() == 1


def test_same_start_merges_at_zero():
    g = gg.generate(gg.Complete(5), 0)
    ws = dual.coalescing_walks(g, [2, 2], 10.0, 3)
    assert ws.events[0][0] == 0.0
    assert ws.events[0][1:] == (0, 1)


def test_walker_count_monotone_and_connected_limit():
    g = gg.generate(gg.Regular(30, 3), 1)
    for s in seeds(5, 20):
        ws = dual.coalescing_walks(g, np.arange(30), 1e9, s)
        assert ws.alive.sum() == 1
        ts = [t for t, _, _ in ws.events]
        assert all(a <= b for a, b in zip(ts, ts[1:]))


def test_complete_pair_meeting_mean():
    g = gg.generate(gg.Complete(5), 0)
    taus = [dual.meeting_time(g, 0, 3, seed=s).tau for s in seeds(7, 30_000)]
    se = np.std(taus, ddof=1) / math.sqrt(len(taus))
    assert abs(np.mean(taus) - 2.0) < 3 * se


def test_meeting_trivials():
    g = gg.generate(gg.Complete(5), 0)
    assert dual.meeting_time(g, 2, 2, seed=0).tau == 0.0
    disc = gg.Graph(4, False, [(0, 1), (2, 3)])
    res = dual.meeting_time(disc, 0, 2, seed=1, time_cap=50.0)
    assert res.capped and res.tau == 50.0


def test_meeting_time_symmetry():
    g = gg.generate(gg.Torus(1, 12), 0)
    a = np.sort([dual.meeting_time(g, 1, 4, seed=s).tau for s in seeds(8, 10_000)])
    b = np.sort([dual.meeting_time(g, 4, 1, seed=s).tau for s in seeds(9, 10_000)])
    # two-sample KS distance
    grid = np.unique(np.concatenate([a, b]))
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    assert np.abs(fa - fb).max() < 0.02


def test_stationary_pair_draws_by_degree():
    g = gg.Graph(3, False, [(0, 1), (0, 1), (0, 2)])
    res = dual.meeting_time(g, stationary_pair=True, seed=4)
    assert res.tau >= 0.0


def test_coalescence_full_small_complete():
    g = gg.generate(gg.Complete(4), 0)
    taus = [dual.coalescence_time_full(g, s).tau for s in seeds(11, 30_000)]
    # mean is ((n-1)/2) * sum_{i=2..n} 1/binom(i,2) = 1.5 * 1.5
    assert abs(np.mean(taus) - 2.25) < 0.05 * 2.25
    assert dual.coalescence_time_full(gg.Graph(1, False, []), 0).tau == 0.0


def test_kingman_ratio_exact_and_bounds():
    assert dual.kingman_ratio(2) == 1
    assert dual.kingman_ratio(4) == Fraction(3, 2)
    prev = Fraction(0)
    for n in range(2, 60):
        r = dual.kingman_ratio(n)
        assert Fraction(1) <= r < Fraction(2)
        assert r > prev
        prev = r
    with pytest.raises(DomainError):
        dual.kingman_ratio(1)


def test_trace_back_empty_rep_identity():
    g = gg.Graph(4, False, [])
    rep = dyn.build_graphical_rep(g, 2.0, 0)
    init = np.array([3, 1, 4, 1])
    assert np.array_equal(dual.trace_back(rep, init), init)


def test_duality_identity_random_multigraphs():
    pmf = {1: 0.25, 2: 0.25, 3: 0.3, 4: 0.2}
    for trial in range(20):
        seq = gg.sample_degrees(pmf, 20, 500 + trial)
        g = gg.generate(gg.ConfigModel(seq.degrees), 600 + trial)
        init = np.arange(20)
        for s in seeds(700 + trial, 5):
            rep = dyn.build_graphical_rep(g, 3.0, s)
            assert np.array_equal(dyn.evolve_forward(rep, init),
                                  dual.trace_back(rep, init))


def test_cycle_clusters_are_arcs():
    # with every vertex holding its own opinion, the surviving opinions tile
    # the cycle in contiguous arcs
    n = 8
    g = gg.generate(gg.Torus(1, n), 0)
    for s in seeds(31, 50):
        rep = dyn.build_graphical_rep(g, 2.0, s)
        final = dyn.evolve_forward(rep, np.arange(n))
        for op in np.unique(final):
            idx = np.where(final == op)[0]
            gaps = np.diff(np.concatenate([idx, [idx[0] + n]]))
            assert (gaps > 1).sum() <= 1


def test_consensus_coalescence_sandwich():
    n, u = 100, 0.5
    g = gg.generate(gg.Complete(n), 0)
    coal = np.array([dual.coalescence_time_full(g, s).tau for s in seeds(41, 500)])
    cons = []
    for s in seeds(42, 500):
        st = rng.state_from(s)
        init = np.array([1 if rng.next_unit(st) < u else 0 for _ in range(n)],
                        dtype=np.uint8)
        cons.append(dyn.run_to_absorption(g, VM(), init, s ^ 0xF00D, 1e7).tau)
    cons = np.array(cons)
    se_cons = cons.std(ddof=1) / math.sqrt(len(cons))
    se_coal = coal.std(ddof=1) / math.sqrt(len(coal))
    lo = 2 * u * (1 - u) * coal.mean()
    assert lo <= cons.mean() + 2 * math.hypot(se_cons, 2 * u * (1 - u) * se_coal)
    assert cons.mean() <= coal.mean() + 2 * math.hypot(se_cons, se_coal)


def test_meeting_survival_matches_profile_on_regular_graph():
    g = gg.generate(gg.Regular(1000, 3), 77)
    indptr, targets, _ = g.csr()
    x = 0
    y = int(targets[indptr[0]])
    tgrid = np.arange(0.5, 5.1, 0.5)
    taus = np.array([dual.meeting_time(g, x, y, seed=s, time_cap=5.5).tau
                     for s in seeds(55, 10_000)])
    for t in tgrid:
        surv = float((taus > t).mean())
        assert abs(surv - an.profile_f_d(3, float(t))) < 0.02


# --- annealed meeting ---------------------------------------------------------


def test_annealed_t0():
    est = dual.annealed_meeting_cm({3: 1.0}, 1000, 0, True, 0, 10,
                                   distinct_starts=True)
    assert est.p_le_t == 0.0


def test_annealed_formula_values():
    assert abs(dual.annealed_meet4_formula({3: 1.0}) - 1.0 / 96.0) < 1e-15
    # hand evaluation for a two-point pmf
    pmf = {2: 0.5, 4: 0.5}
    val = (1 / 16) * (0.5 / 2 + 0.5 / 4) * ((2 * 0.5 / 3) / 1 + (4 * 0.5 / 3) / 3)
    assert abs(dual.annealed_meet4_formula(pmf) - val) < 1e-15


def test_annealed_monte_carlo_matches_formula():
    pmf = {3: 1.0}
    formula = dual.annealed_meet4_formula(pmf)
    est = dual.annealed_meeting_cm(pmf, 100_000, 4, True, 13, 200_000)
    assert abs(est.p_eq_t_first_mover - formula) <= 3 * est.se(formula)
    assert abs(est.p_eq_t - 2 * formula) <= 3 * est.se(2 * formula)
    assert est.local_limit_ok


def test_annealed_backtracking_walk_atom():
    est = dual.annealed_meeting_cm({3: 1.0}, 100_000, 4, False, 14, 100_000)
    target = 2.0 / 27.0
    assert abs(est.p_eq_t - target) <= 3 * est.se(target)


def test_annealed_warns_on_long_horizon():
    est = dual.annealed_meeting_cm({3: 1.0}, 100, 40, True, 0, 10)
    assert not est.local_limit_ok


def test_annealed_needs_degree_one():
    with pytest.raises(PreconditionError):
        dual.annealed_meeting_cm({0: 0.5, 3: 0.5}, 100, 2, True, 0, 10)


def test_tree_survival_monotone():
    tgrid = np.array([0.0, 1.0, 3.0])
    surv = dual.tree_meeting_survival(3, tgrid, 1, 5000)
    assert surv[0] == 1.0
    assert surv[0] >= surv[1] >= surv[2]
