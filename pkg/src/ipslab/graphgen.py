"""Seed-driven construction of every graph family used by the lab.

All generators are pure functions of (spec, seed): the same pair yields a
bit-identical edge list.  Multigraphs are first-class citizens: half-edge
pairing keeps self-loops and multi-edges, and a self-loop contributes 2 to
its vertex's degree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from numba import njit

from . import rng
from .errors import DomainError, ParameterError, PreconditionError

__all__ = [
    "Graph",
    "DegreeSequence",
    "DegreeStats",
    "Complete",
    "Torus",
    "ER",
    "Graphon",
    "ConfigModel",
    "Regular",
    "PrefAttach",
    "DirectedCM",
    "generate",
    "sample_degrees",
    "degree_stats",
    "save_graph",
    "load_graph",
]

GRAPH_FORMAT = "ipslab-graph-v1"


@dataclass
class Graph:
    """Finite (multi)graph on vertices 0..n-1.

    ``edges`` is an ordered list of pairs; repeated pairs encode multiplicity
    and (u, u) is a self-loop.  For directed graphs a pair (u, v) is the arc
    u -> v.
    """

    n: int
    directed: bool
    edges: list[tuple[int, int]]
    _csr: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ParameterError(f"edge ({u},{v}) outside [0,{self.n})")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        """Vertex degrees; self-loops count 2.  Directed graphs: out-degrees."""
        d = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            if self.directed:
                d[u] += 1
            elif u == v:
                d[u] += 2
            else:
                d[u] += 1
                d[v] += 1
        return d

    def in_degrees(self) -> np.ndarray:
        if not self.directed:
            raise PreconditionError("in_degrees is defined for directed graphs")
        d = np.zeros(self.n, dtype=np.int64)
        for _, v in self.edges:
            d[v] += 1
        return d

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Stub arrays (indptr, targets, stub_edge).

        Undirected: every edge contributes one stub at each endpoint (a
        self-loop contributes two stubs at its vertex).  Directed: stubs are
        out-arcs only.  ``stub_edge[p]`` is the edge index behind stub p.
        """
        if self._csr is None:
            m = len(self.edges)
            deg = self.degrees()
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            targets = np.empty(indptr[-1], dtype=np.int64)
            stub_edge = np.empty(indptr[-1], dtype=np.int64)
            cursor = indptr[:-1].copy()
            for e, (u, v) in enumerate(self.edges):
                targets[cursor[u]] = v
                stub_edge[cursor[u]] = e
                cursor[u] += 1
                if not self.directed:
                    targets[cursor[v]] = u
                    stub_edge[cursor[v]] = e
                    cursor[v] += 1
            self._csr = (indptr, targets, stub_edge)
        return self._csr

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if len(self.edges) == 0:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        arr = np.asarray(self.edges, dtype=np.int64)
        return arr[:, 0].copy(), arr[:, 1].copy()


# ---------------------------------------------------------------------------
# Graph specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Complete:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("Complete requires n >= 1")


@dataclass(frozen=True)
class Torus:
    dim: int
    side: int

    def __post_init__(self):
        if self.dim < 1 or self.side < 2:
            raise ParameterError("Torus requires dim >= 1 and side >= 2")


@dataclass(frozen=True)
class ER:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 1 or not (0.0 <= self.p <= 1.0):
            raise ParameterError("ER requires n >= 1 and p in [0,1]")


@dataclass(frozen=True)
class Graphon:
    """Inhomogeneous Bernoulli graph from a reference kernel.

    Exactly one of ``kernel`` (symmetric function or n-by-n array of values
    r(i/n, j/n)) or ``rank1`` (weight function on [0,1] or length-n array)
    must be given.  Values are clipped into [0,1] before sampling.
    """

    n: int
    kernel: Callable[[float, float], float] | np.ndarray | None = None
    rank1: Callable[[float], float] | np.ndarray | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("Graphon requires n >= 1")
        if (self.kernel is None) == (self.rank1 is None):
            raise ParameterError("Graphon takes exactly one of kernel/rank1")


@dataclass(frozen=True)
class ConfigModel:
    degrees: tuple[int, ...]

    def __post_init__(self):
        degs = tuple(int(d) for d in self.degrees)
        object.__setattr__(self, "degrees", degs)
        if any(d < 0 for d in degs):
            raise ParameterError("degrees must be non-negative")
        if sum(degs) % 2 != 0:
            raise PreconditionError("half-edge total must be even")


@dataclass(frozen=True)
class Regular:
    n: int
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError("Regular requires d >= 1")
        if (self.n * self.d) % 2 != 0:
            raise ParameterError("Regular requires n*d even")


@dataclass(frozen=True)
class PrefAttach:
    """Growth model: seed clique on m+1 vertices, then each arriving vertex
    attaches m edges, each endpoint uniform w.p. gamma and degree-proportional
    w.p. 1-gamma (drawn with replacement)."""

    n: int
    m: int
    gamma: float

    def __post_init__(self):
        if self.m < 1 or not (0.0 <= self.gamma < 1.0):
            raise ParameterError("PrefAttach requires m >= 1 and gamma in [0,1)")
        if self.n < self.m + 1:
            raise ParameterError("PrefAttach requires n >= m+1")


@dataclass(frozen=True)
class DirectedCM:
    din: tuple[int, ...]
    dout: tuple[int, ...]

    def __post_init__(self):
        din = tuple(int(d) for d in self.din)
        dout = tuple(int(d) for d in self.dout)
        object.__setattr__(self, "din", din)
        object.__setattr__(self, "dout", dout)
        if len(din) != len(dout):
            raise ParameterError("din and dout must have equal length")
        if any(d < 0 for d in din + dout):
            raise ParameterError("degrees must be non-negative")
        if sum(din) != sum(dout):
            raise PreconditionError("sum(din) must equal sum(dout)")


GraphSpec = (
    Complete | Torus | ER | Graphon | ConfigModel | Regular | PrefAttach | DirectedCM
)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


@njit(cache=True)
def _bernoulli_pairs(n, probs, state):
    # probs is the flattened upper triangle, row-major: (0,1),(0,2),...,(n-2,n-1)
    out_u = []
    out_v = []
    k = 0
    for i in range(n - 1):
        for j in range(i + 1, n):
            p = probs[k]
            k += 1
            if p >= 1.0 or (p > 0.0 and rng.next_unit(state) < p):
                out_u.append(i)
                out_v.append(j)
    return out_u, out_v


@njit(cache=True)
def _er_pairs(n, p, state):
    out_u = []
    out_v = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            if p >= 1.0 or (p > 0.0 and rng.next_unit(state) < p):
                out_u.append(i)
                out_v.append(j)
    return out_u, out_v


def _pair_stubs(stubs: np.ndarray, state: np.ndarray) -> list[tuple[int, int]]:
    rng.shuffle(state, stubs)
    return [(int(stubs[i]), int(stubs[i + 1])) for i in range(0, len(stubs), 2)]


def _kernel_probs(spec: Graphon) -> np.ndarray:
    n = spec.n
    xs = np.arange(n) / n
    if spec.rank1 is not None:
        v = spec.rank1
        vals = np.asarray(v, dtype=float) if not callable(v) else np.array(
            [float(v(x)) for x in xs]
        )
        if vals.shape != (n,):
            raise ParameterError("rank-1 weight vector must have length n")
        mat = np.outer(vals, vals)
    else:
        ker = spec.kernel
        if callable(ker):
            mat = np.empty((n, n))
            for i in range(n):
                for j in range(n):
                    mat[i, j] = float(ker(xs[i], xs[j]))
        else:
            mat = np.asarray(ker, dtype=float)
            if mat.shape != (n, n):
                raise ParameterError("kernel grid must be n-by-n")
    iu = np.triu_indices(n, k=1)
    return np.clip(mat[iu], 0.0, 1.0)


def generate(spec: GraphSpec, seed: int) -> Graph:
    """Draw the graph family defined by ``spec`` from the stream of ``seed``."""
    state = rng.state_from(seed)

    if isinstance(spec, Complete):
        edges = [(i, j) for i in range(spec.n - 1) for j in range(i + 1, spec.n)]
        return Graph(spec.n, False, edges)

    if isinstance(spec, Torus):
        n = spec.side**spec.dim
        edges = []
        for v in range(n):
            rem = v
            coords = []
            for _ in range(spec.dim):
                coords.append(rem % spec.side)
                rem //= spec.side
            for k in range(spec.dim):
                stride = spec.side**k
                nk = (coords[k] + 1) % spec.side
                w = v + (nk - coords[k]) * stride
                edges.append((v, w))
        return Graph(n, False, edges)

    if isinstance(spec, ER):
        us, vs = _er_pairs(spec.n, spec.p, state)
        return Graph(spec.n, False, list(zip(us, vs)))

    if isinstance(spec, Graphon):
        probs = _kernel_probs(spec)
        us, vs = _bernoulli_pairs(spec.n, probs, state)
        return Graph(spec.n, False, list(zip(us, vs)))

    if isinstance(spec, (ConfigModel, Regular)):
        if isinstance(spec, Regular):
            degrees = [spec.d] * spec.n
            n = spec.n
        else:
            degrees = list(spec.degrees)
            n = len(degrees)
        stubs = np.repeat(np.arange(n, dtype=np.int64), degrees)
        edges = _pair_stubs(stubs, state)
        return Graph(n, False, edges)

    if isinstance(spec, PrefAttach):
        return _pref_attach(spec, state)

    if isinstance(spec, DirectedCM):
        n = len(spec.din)
        out_stubs = np.repeat(np.arange(n, dtype=np.int64), spec.dout)
        in_stubs = np.repeat(np.arange(n, dtype=np.int64), spec.din)
        rng.shuffle(state, in_stubs)
        edges = [(int(u), int(v)) for u, v in zip(out_stubs, in_stubs)]
        return Graph(n, True, edges)

    raise ParameterError(f"unknown graph spec {spec!r}")


def _pref_attach(spec: PrefAttach, state: np.ndarray) -> Graph:
    n0 = spec.m + 1
    edges = [(i, j) for i in range(n0 - 1) for j in range(i + 1, n0)]
    # each stub endpoint appears once per unit of degree, so a uniform draw
    # from this list is degree-proportional
    stub_list: list[int] = []
    for u, v in edges:
        stub_list.append(u)
        stub_list.append(v)
    for v in range(n0, spec.n):
        new = []
        for _ in range(spec.m):
            if rng.next_unit(state) < spec.gamma:
                w = int(rng.next_below(state, v))
            else:
                w = stub_list[int(rng.next_below(state, len(stub_list)))]
            new.append(w)
        for w in new:
            edges.append((v, w))
            stub_list.append(v)
            stub_list.append(w)
    return Graph(spec.n, False, edges)


# ---------------------------------------------------------------------------
# Degree sequences and statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeSequence:
    degrees: tuple[int, ...]

    def __post_init__(self):
        degs = tuple(int(d) for d in self.degrees)
        object.__setattr__(self, "degrees", degs)
        if sum(degs) % 2 != 0:
            raise PreconditionError("degree sum must be even")


def sample_degrees(f: dict[int, float], n: int, seed: int) -> DegreeSequence:
    """n i.i.d. draws from pmf ``f``, resampled wholesale until the sum is even."""
    ks = sorted(f)
    ps = np.array([f[k] for k in ks], dtype=float)
    if any(k < 0 for k in ks) or np.any(ps < 0):
        raise ParameterError("pmf must be on non-negative integers")
    if abs(ps.sum() - 1.0) > 1e-12:
        raise ParameterError("pmf must sum to 1 within 1e-12")
    cdf = np.cumsum(ps)
    cdf[-1] = 1.0
    state = rng.state_from(seed)
    while True:
        draws = [ks[int(np.searchsorted(cdf, rng.next_unit(state), side="right"))]
                 for _ in range(n)]
        if sum(draws) % 2 == 0:
            return DegreeSequence(tuple(draws))


@dataclass(frozen=True)
class DegreeStats:
    d_min: int
    d_max: int
    d_ave: Fraction
    m1: Fraction
    m2: Fraction


def _stats_of(deg: np.ndarray) -> DegreeStats:
    n = len(deg)
    s1 = int(deg.sum())
    s2 = int((deg.astype(object) ** 2).sum())
    m1 = Fraction(s1, n)
    return DegreeStats(int(deg.min()), int(deg.max()), m1, m1, Fraction(s2, n))


def degree_stats(g: Graph):
    """Exact statistics of the degree multiset.

    Undirected graphs return a single :class:`DegreeStats`; directed graphs
    return ``(out_stats, in_stats)``.
    """
    if g.n == 0:
        raise DomainError("degree_stats of an empty graph")
    if g.directed:
        return _stats_of(g.degrees()), _stats_of(g.in_degrees())
    return _stats_of(g.degrees())


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------


def save_graph(g: Graph, path: str) -> None:
    doc = {
        "format": GRAPH_FORMAT,
        "directed": g.directed,
        "n": g.n,
        "edges": [[int(u), int(v)] for u, v in g.edges],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_graph(path: str) -> Graph:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != GRAPH_FORMAT:
        raise ParameterError(f"not a {GRAPH_FORMAT} file: {path}")
    edges = [(int(u), int(v)) for u, v in doc["edges"]]
    return Graph(int(doc["n"]), bool(doc["directed"]), edges)
