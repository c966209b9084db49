import json
import math

import numpy as np
import pytest

from ipslab import graphgen as gg
from ipslab.errors import DomainError, ParameterError, PreconditionError


def test_complete_counts():
    g = gg.generate(gg.Complete(4), 1)
    assert g.num_edges == 6
    assert list(g.degrees()) == [3, 3, 3, 3]


def test_torus_counts():
    g = gg.generate(gg.Torus(2, 3), 1)
    assert g.n == 9 and g.num_edges == 18
    assert np.all(g.degrees() == 4)


def test_torus_side_two_is_doubled():
    g = gg.generate(gg.Torus(1, 2), 0)
    assert g.num_edges == 2 and np.all(g.degrees() == 2)


def test_config_model_degree_exactness():
    degs = (1, 3, 1, 3, 2, 4)
    for seed in range(25):
        g = gg.generate(gg.ConfigModel(degs), seed)
        assert g.num_edges == 7
        assert tuple(g.degrees()) == degs


def test_reproducibility():
    for spec in (gg.ER(50, 0.3), gg.ConfigModel((2,) * 10), gg.PrefAttach(30, 2, 0.5),
                 gg.DirectedCM((1, 2, 1), (2, 1, 1))):
        a = gg.generate(spec, 99)
        b = gg.generate(spec, 99)
        assert a.edges == b.edges


def test_er_edge_count_within_4_sd():
    g = gg.generate(gg.ER(1000, 0.01), 3)
    mean = 1000 * 999 / 2 * 0.01
    sd = math.sqrt(1000 * 999 / 2 * 0.01 * 0.99)
    assert abs(g.num_edges - mean) < 4 * sd


def test_er_extremes():
    full = gg.generate(gg.ER(8, 1.0), 0)
    complete = gg.generate(gg.Complete(8), 0)
    assert sorted(map(tuple, full.edges)) == sorted(map(tuple, complete.edges))
    assert gg.generate(gg.ER(8, 0.0), 0).num_edges == 0


def test_graphon_constant_kernel_matches_er():
    n, p = 300, 0.05
    counts_g, counts_e = [], []
    for seed in range(200):
        counts_g.append(gg.generate(gg.Graphon(n, kernel=lambda x, y: p), seed).num_edges)
        counts_e.append(gg.generate(gg.ER(n, p), 10_000 + seed).num_edges)
    cg, ce = np.array(counts_g), np.array(counts_e)
    pooled = math.sqrt(cg.var(ddof=1) / 200 + ce.var(ddof=1) / 200)
    assert abs(cg.mean() - ce.mean()) < 4 * pooled


def test_graphon_rank1_clipping():
    # products above 1 are clipped, so high-weight pairs are always present
    v = np.full(6, 1.5)
    g = gg.generate(gg.Graphon(6, rank1=v), 4)
    assert g.num_edges == 15


def test_pref_attach_edge_count():
    n, m = 40, 3
    g = gg.generate(gg.PrefAttach(n, m, 0.2), 8)
    n0 = m + 1
    assert g.num_edges == m * (n - n0) + n0 * (n0 - 1) // 2
    assert g.n == n


def test_directed_cm_exact_in_out():
    din, dout = (2, 0, 1, 1), (1, 1, 1, 1)
    g = gg.generate(gg.DirectedCM(din, dout), 5)
    assert tuple(g.degrees()) == dout
    assert tuple(g.in_degrees()) == din


def test_sample_degrees_delta():
    seq = gg.sample_degrees({3: 1.0}, 10, 0)
    assert seq.degrees == (3,) * 10


def test_sample_degrees_even_sum_always():
    f = {1: 0.5, 2: 0.25, 3: 0.25}
    for seed in range(50):
        assert sum(gg.sample_degrees(f, 11, seed).degrees) % 2 == 0


def test_sample_degrees_power_law_mean():
    ks = np.arange(3, 101)
    w = ks ** -2.5
    f = {int(k): float(x) for k, x in zip(ks, w / w.sum())}
    mean = float((ks * w).sum() / w.sum())
    var = float((ks**2 * w).sum() / w.sum() - mean**2)
    seq = gg.sample_degrees(f, 10_000, 17)
    se = math.sqrt(var / 10_000)
    assert abs(np.mean(seq.degrees) - mean) < 3 * se


def test_sample_degrees_rejects_unnormalized():
    with pytest.raises(ParameterError):
        gg.sample_degrees({1: 0.5, 2: 0.5001}, 5, 0)


def test_degree_stats_examples():
    from fractions import Fraction

    s = gg.degree_stats(gg.generate(gg.Complete(4), 0))
    assert (s.d_min, s.d_max, s.m1, s.m2) == (3, 3, Fraction(3), Fraction(9))
    s = gg.degree_stats(gg.generate(gg.ConfigModel((1, 3, 1, 3, 2, 4)), 1))
    assert s.d_ave == Fraction(14, 6)
    s = gg.degree_stats(gg.generate(gg.Regular(10, 4), 2))
    assert s.m2 == Fraction(16)


def test_degree_stats_directed_and_empty():
    out_s, in_s = gg.degree_stats(gg.generate(gg.DirectedCM((2, 0), (1, 1)), 0))
    assert out_s.d_min == 1 and in_s.d_max == 2
    with pytest.raises(DomainError):
        gg.degree_stats(gg.Graph(0, False, []))


def test_graph_json_round_trip(tmp_path):
    g = gg.generate(gg.ConfigModel((2, 2, 4)), 3)  # loops/multi-edges likely
    path = tmp_path / "g.json"
    gg.save_graph(g, str(path))
    doc = json.loads(path.read_text())
    assert doc["format"] == "ipslab-graph-v1"
    g2 = gg.load_graph(str(path))
    assert g2.edges == g.edges and g2.n == g.n and g2.directed == g.directed


def test_invalid_specs_raise():
    with pytest.raises(ParameterError):
        gg.ER(10, 1.5)
    with pytest.raises(ParameterError):
        gg.Regular(5, 3)
    with pytest.raises(PreconditionError):
        gg.ConfigModel((1, 1, 1))
    with pytest.raises(PreconditionError):
        gg.DirectedCM((1, 1), (2, 1))
    with pytest.raises(ParameterError):
        gg.PrefAttach(10, 2, 1.0)
    with pytest.raises(ParameterError):
        gg.Torus(1, 1)


def test_self_loop_degree_counts_two():
    g = gg.Graph(2, False, [(0, 0), (0, 1)])
    assert list(g.degrees()) == [3, 1]
