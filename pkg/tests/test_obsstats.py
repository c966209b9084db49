import math

import numpy as np
import pytest

from ipslab import graphgen as gg
from ipslab import obsstats as obs
from ipslab import rng
from ipslab.errors import DomainError


def test_discordant_examples():
    g = gg.generate(gg.Complete(4), 0)
    assert obs.discordant_fraction(g, [1, 1, 1, 1]) == 0.0
    assert obs.discordant_fraction(g, [1, 1, 0, 0]) == pytest.approx(4 / 6)
    with pytest.raises(DomainError):
        obs.discordant_fraction(gg.Graph(3, False, []), [0, 1, 0])


def test_discordant_multiplicity_and_loops():
    g = gg.Graph(3, False, [(0, 1), (0, 1), (1, 1), (1, 2)])
    # two parallel discordant edges count twice; the loop pads the denominator
    assert obs.discordant_fraction(g, [0, 1, 1]) == pytest.approx(2 / 4)


def test_complete_graph_identity_exhaustive():
    # discordant fraction equals (2N/(N-1)) x(1-x) for every configuration
    for n in range(2, 9):
        g = gg.generate(gg.Complete(n), 0)
        for bits in range(2**n):
            c = np.array([(bits >> i) & 1 for i in range(n)])
            x = c.mean()
            expect = 2.0 * n / (n - 1) * x * (1 - x)
            assert obs.discordant_fraction(g, c) == pytest.approx(expect)


def test_zero_iff_componentwise_consensus():
    g = gg.Graph(4, False, [(0, 1), (2, 3)])
    assert obs.discordant_fraction(g, [1, 1, 0, 0]) == 0.0
    assert obs.discordant_fraction(g, [1, 0, 0, 0]) == 0.5


def test_level_observables():
    assert obs.magnetisation([1, 1, -1, -1]) == 0.0
    assert obs.magnetisation([1, 1, 1, 1]) == 1.0
    assert obs.ones_fraction([1, 0, 1, 0]) == 0.5
    assert obs.infected_fraction([0, 0, 0]) == 0.0


def test_mean_ci():
    r = obs.mean_ci([2.0, 2.0, 2.0])
    assert r.mean == 2.0 and r.sd == 0.0 and r.ci95 == 0.0
    with pytest.raises(DomainError):
        obs.mean_ci([1.0])
    a = obs.mean_ci([1.0, 2.0, 3.0, 4.0])
    b = obs.mean_ci([4.0, 2.0, 1.0, 3.0])
    assert a == b


def test_ks_against_own_cdf():
    st = rng.state_from(12)
    n = 10_000
    us = np.array([rng.next_unit(st) for _ in range(n)])
    assert obs.ks_distance(us, lambda x: min(max(x, 0.0), 1.0)) < 1.63 / math.sqrt(n)
    es = -np.log1p(-us)
    assert obs.ks_distance(es, lambda x: 1 - math.exp(-x)) < 1.63 / math.sqrt(n)


def test_ks_detects_mismatch():
    xs = np.linspace(0, 1, 1000) ** 2
    assert obs.ks_distance(xs, lambda x: min(max(x, 0.0), 1.0)) > 0.2
