"""Coalescing-random-walk machinery.

Walkers jump at rate 1 to a uniform incident stub (multi-edges weighted by
multiplicity, a self-loop stub is a null move) and merge whenever two occupy
one vertex; the lower id survives.  This is the time reversal of the voter
dynamics, which is what :func:`trace_back` exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _engine, rng
from .dynamics import GraphicalRep
from .errors import DomainError, ParameterError, PreconditionError
from .graphgen import Graph, sample_degrees

__all__ = [
    "WalkerSet",
    "MeetingResult",
    "coalescing_walks",
    "meeting_time",
    "coalescence_time_full",
    "kingman_ratio",
    "trace_back",
    "tree_meeting_survival",
    "AnnealedEstimate",
    "annealed_meeting_cm",
    "annealed_meet4_formula",
]


@dataclass
class WalkerSet:
    """Final state of a coalescing-walk run."""

    positions: np.ndarray                      # walker id -> vertex (last known)
    alive: np.ndarray                          # boolean flags
    events: list[tuple[float, int, int]]       # (time, survivor, absorbed)
    t_reached: float


@dataclass(frozen=True)
class MeetingResult:
    tau: float
    capped: bool


def coalescing_walks(g: Graph, starts, tmax: float, seed: int) -> WalkerSet:
    """Run coalescing walkers started at ``starts`` until one remains or tmax."""
    starts = np.asarray(starts, dtype=np.int64)
    if starts.size == 0:
        raise PreconditionError("starts must be non-empty")
    if starts.min() < 0 or starts.max() >= g.n:
        raise PreconditionError("start vertex out of range")
    indptr, targets, _ = g.csr()
    st = rng.state_from(seed)
    w = len(starts)
    positions = starts.copy()
    ev_t = np.empty(w)
    ev_surv = np.empty(w, dtype=np.int64)
    ev_abs = np.empty(w, dtype=np.int64)
    n_ev, n_alive, t_reached = _engine.coalescing_run(
        indptr, targets, positions, tmax, st, ev_t, ev_surv, ev_abs
    )
    alive = np.ones(w, dtype=bool)
    events = []
    for k in range(n_ev):
        events.append((float(ev_t[k]), int(ev_surv[k]), int(ev_abs[k])))
        alive[ev_abs[k]] = False
    return WalkerSet(positions, alive, events, float(t_reached))


def meeting_time(
    g: Graph,
    x: int | None = None,
    y: int | None = None,
    stationary_pair: bool = False,
    seed: int = 0,
    time_cap: float = 1e9,
) -> MeetingResult:
    """First time two independent walkers occupy one vertex.

    Fixed starts require x != y; ``stationary_pair`` draws both starts
    independently proportional to degree.  Walkers that cannot meet within
    the cap return (time_cap, capped=True).
    """
    st = rng.state_from(seed)
    if stationary_pair:
        deg = g.degrees().astype(float)
        if deg.sum() == 0:
            raise PreconditionError("graph has no edges")
        cdf = np.cumsum(deg / deg.sum())
        x = int(np.searchsorted(cdf, rng.next_unit(st), side="right"))
        y = int(np.searchsorted(cdf, rng.next_unit(st), side="right"))
    else:
        if x is None or y is None:
            raise PreconditionError("give x and y or set stationary_pair")
        if x == y:
            return MeetingResult(0.0, False)
    indptr, targets, _ = g.csr()
    met, tau = _engine.pair_meeting_run(indptr, targets, x, y, time_cap, st)
    return MeetingResult(float(tau), not met)


def coalescence_time_full(g: Graph, seed: int, time_cap: float = 1e9) -> MeetingResult:
    """Time at which walkers started on every vertex have merged into one."""
    if g.n == 1:
        return MeetingResult(0.0, False)
    ws = coalescing_walks(g, np.arange(g.n), time_cap, seed)
    if int(ws.alive.sum()) > 1:
        return MeetingResult(float(time_cap), True)
    return MeetingResult(ws.events[-1][0], False)


def kingman_ratio(n: int) -> Fraction:
    """Sum over i = 2..n of 1/binom(i, 2), exactly."""
    if n < 2:
        raise DomainError("kingman_ratio needs n >= 2")
    total = Fraction(0)
    for i in range(2, n + 1):
        total += Fraction(2, i * (i - 1))
    return total


# ---------------------------------------------------------------------------
# Backward tracing through a graphical representation
# ---------------------------------------------------------------------------


def trace_back(rep: GraphicalRep, init) -> np.ndarray:
    """Ancestral lookup: follow arrows backward from (i, t0) to time 0 and
    carry init[ancestor(i)] to vertex i.  Equals the forward evolution of the
    same representation, realisation by realisation."""
    state = np.asarray(init)
    if state.shape != (rep.n,):
        raise PreconditionError("configuration length mismatch")
    out = np.empty_like(state)
    for i in range(rep.n):
        v = i
        t = rep.t0
        while True:
            times = rep.times[v]
            k = int(np.searchsorted(times, t, side="left")) - 1
            if k < 0:
                break
            t = float(times[k])
            v = int(rep.marks[v][k])
        out[i] = state[v]
    return out


# ---------------------------------------------------------------------------
# Tree oracle for the meeting-time profile
# ---------------------------------------------------------------------------


def tree_meeting_survival(d: int, t_grid, seed: int, reps: int,
                          depth_cap: int = 40) -> np.ndarray:
    """Monte Carlo P(two adjacent walkers on the regular tree have not met by t).

    The depth-``depth_cap`` tree is represented implicitly: a vertex is its
    path from the root, the root has d children and every other vertex has
    d - 1 children, so all degrees are d.  Walkers start on the endpoints of
    a root edge.
    """
    if d < 3:
        raise DomainError("tree oracle needs d >= 3")
    t_grid = np.asarray(t_grid, dtype=float)
    t_max = float(t_grid.max())
    st = rng.state_from(seed)
    survived = np.zeros(len(t_grid), dtype=np.int64)
    for _ in range(reps):
        x: tuple[int, ...] = ()
        y: tuple[int, ...] = (0,)
        t = 0.0
        tau = math.inf
        while True:
            t += rng.next_exp(st) / 2.0
            if t > t_max:
                break
            mover = x if rng.next_unit(st) < 0.5 else y
            nk = d if len(mover) == 0 else d - 1
            j = int(rng.next_below(st, d))
            if len(mover) == 0:
                new = (j,)
            elif j == 0:
                new = mover[:-1]
            else:
                new = mover + (j - 1,)
            if len(new) > depth_cap:
                raise RuntimeError("walker escaped the truncated tree")
            if mover is x:
                x = new
            else:
                y = new
            if x == y:
                tau = t
                break
        survived += t_grid < tau
    return survived / reps


# ---------------------------------------------------------------------------
# Annealed meeting on the configuration model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnnealedEstimate:
    """Monte Carlo estimates of the annealed meeting law at discrete steps.

    ``p_le_t`` estimates P(tau_meet <= t); ``p_eq_t`` the atom at t; and
    ``p_eq_t_first_mover`` the atom restricted to runs whose first move was
    made by the designated walker (the event the worked four-step formula
    prices, equal to p_eq_t/2 by exchangeability).
    """

    p_le_t: float
    p_eq_t: float
    p_eq_t_first_mover: float
    reps: int
    local_limit_ok: bool

    def se(self, p: float) -> float:
        return math.sqrt(max(p * (1.0 - p), 1e-300) / self.reps)


def _degree_arrays(p: dict[int, float], n: int, seed: int):
    ks = sorted(p)
    if min(ks) < 1:
        raise PreconditionError("annealed walks need min degree >= 1")
    seq = sample_degrees(p, n, seed)
    deg = np.asarray(seq.degrees, dtype=np.int64)
    vindptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=vindptr[1:])
    stub_owner = np.repeat(np.arange(n, dtype=np.int64), deg)
    return vindptr, stub_owner


def annealed_meeting_cm(
    p: dict[int, float],
    n: int,
    t: int,
    non_backtracking: bool,
    seed: int,
    reps: int,
    distinct_starts: bool = False,
) -> AnnealedEstimate:
    """Estimate the annealed meeting law by simultaneous graph exploration.

    Both walkers start at one uniform vertex (or two distinct uniform
    vertices); each move flips a fair coin for the mover, draws a uniform
    stub at the mover's site (strict non-backtracking excludes the arrival
    stub whenever the degree permits), and matches unmatched stubs lazily to
    a uniform unmatched partner.  Time counts individual moves.
    """
    if t < 0:
        raise ParameterError("t must be >= 0")
    if t == 0:
        return AnnealedEstimate(0.0 if distinct_starts else 1.0,
                                0.0, 0.0, reps, True)
    st = rng.state_from(seed)
    vindptr, stub_owner = _degree_arrays(p, n, seed ^ 0x5EED)
    match = np.full(stub_owner.shape[0], -1, dtype=np.int64)
    cnt_le, cnt_eq, cnt_eq_x = _engine.annealed_meeting_runs(
        vindptr, stub_owner, match, t, non_backtracking, distinct_starts,
        reps, st
    )
    ok = 4 * t * t <= n
    return AnnealedEstimate(cnt_le / reps, cnt_eq / reps, cnt_eq_x / reps,
                            reps, ok)


def annealed_meet4_formula(p: dict[int, float]) -> float:
    """Printed value for the four-step annealed meeting event:
    (1/2)^4 * sum_k p_k/k * sum_k mu(k)/k, with mu the size-biased
    offspring law mu(k) = (k+1) p_{k+1} / E[D]."""
    ks = sorted(p)
    if min(ks) < 1:
        raise PreconditionError("pmf must have min degree >= 1")
    mean_d = sum(k * p[k] for k in ks)
    s1 = sum(p[k] / k for k in ks)
    s2 = sum((k + 1) * p[k + 1] / mean_d / k for k in range(1, max(ks))
             if (k + 1) in p)
    return (0.5 ** 4) * s1 * s2
