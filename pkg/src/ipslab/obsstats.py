"""Observables over configurations and reductions over replica ensembles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .graphgen import Graph

__all__ = [
    "OBSERVABLE_KINDS",
    "magnetisation",
    "ones_fraction",
    "infected_fraction",
    "discordant_fraction",
    "MeanCI",
    "mean_ci",
    "ks_distance",
]

OBSERVABLE_KINDS = (
    "magnetisation",
    "ones_fraction",
    "infected_fraction",
    "discordant_fraction",
)


def magnetisation(config) -> float:
    """Mean spin of a {-1,+1} configuration."""
    return float(np.mean(np.asarray(config, dtype=float)))


def ones_fraction(config) -> float:
    return float(np.mean(np.asarray(config, dtype=float)))


infected_fraction = ones_fraction


def discordant_fraction(g: Graph, config) -> float:
    """Fraction of edges whose endpoints disagree, counted with multiplicity.

    Self-loops are counted in the denominator but can never be discordant.
    """
    if g.num_edges == 0:
        raise DomainError("discordant_fraction needs at least one edge")
    arr = np.asarray(config)
    eu, ev = g.edge_arrays()
    return float(np.count_nonzero(arr[eu] != arr[ev]) / g.num_edges)


@dataclass(frozen=True)
class MeanCI:
    mean: float
    sd: float
    ci95: float

    @property
    def se(self) -> float:
        return self.ci95 / 1.96


def mean_ci(samples: Sequence[float]) -> MeanCI:
    """Sample mean, unbiased sd, and normal-approximation 95% half-width."""
    arr = np.asarray(samples, dtype=float)
    if arr.size < 2:
        raise DomainError("mean_ci needs at least 2 samples")
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1))
    return MeanCI(mean, sd, 1.96 * sd / math.sqrt(arr.size))


def ks_distance(samples: Sequence[float], cdf: Callable[[float], float]) -> float:
    """Two-sided Kolmogorov-Smirnov statistic sup |F_hat - F|."""
    arr = np.sort(np.asarray(samples, dtype=float))
    n = arr.size
    if n < 2:
        raise DomainError("ks_distance needs at least 2 samples")
    f = np.array([cdf(x) for x in arr])
    upper = np.max(np.arange(1, n + 1) / n - f)
    lower = np.max(f - np.arange(0, n) / n)
    return float(max(upper, lower))
