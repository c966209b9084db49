"""Exact continuous-time simulation of the three particle systems.

The public entry points accept a :class:`~ipslab.graphgen.Graph`, a rate
model from :mod:`ipslab.models`, and a configuration in the model's alphabet
({-1,+1} for spins, {0,1} otherwise).  All runs are driven by the pinned
generator in :mod:`ipslab.rng`, so a (inputs, seed) pair reproduces the
trajectory bit for bit.  Replica k of an ensemble uses
``rng.derive_seed(master_seed, k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _engine, rng
from .errors import ParameterError, PreconditionError
from .graphgen import Graph
from .models import CP, SIM, VM, ModelParams

__all__ = [
    "RunRecord",
    "AbsorptionResult",
    "CoupledRun",
    "RewiringSchedule",
    "RewiringRun",
    "GraphicalRep",
    "flip_rate",
    "hamiltonian",
    "simulate",
    "run_to_absorption",
    "run_to_ones_count",
    "coupled_simulate",
    "simulate_with_rewiring",
    "build_graphical_rep",
    "evolve_forward",
]

EVENT_LOG_MAX_N = 64

_OBS_CODES = {
    "ones_fraction": _engine.OBS_ONES,
    "infected_fraction": _engine.OBS_ONES,
    "discordant_fraction": _engine.OBS_DISCORDANT,
    "magnetisation": _engine.OBS_MAGNETISATION,
}

_VALID_OBS = {
    "vm": {"ones_fraction", "discordant_fraction"},
    "cp": {"infected_fraction", "discordant_fraction"},
    "sim": {"magnetisation", "discordant_fraction"},
}


def _model_tag(model: ModelParams) -> str:
    if isinstance(model, VM):
        return "vm"
    if isinstance(model, CP):
        return "cp"
    if isinstance(model, SIM):
        return "sim"
    raise ParameterError(f"unknown model {model!r}")


def _to_internal(model: ModelParams, g: Graph, init) -> np.ndarray:
    arr = np.asarray(init)
    if arr.shape != (g.n,):
        raise PreconditionError(f"configuration length {arr.shape} != n={g.n}")
    if isinstance(model, SIM):
        if not np.all(np.isin(arr, (-1, 1))):
            raise PreconditionError("spin configurations live on {-1,+1}")
        return ((arr + 1) // 2).astype(np.uint8)
    if not np.all(np.isin(arr, (0, 1))):
        raise PreconditionError("configurations live on {0,1}")
    return arr.astype(np.uint8)


def _to_external(model: ModelParams, states: np.ndarray) -> np.ndarray:
    if isinstance(model, SIM):
        return (2 * states.astype(np.int8) - 1)
    return states.astype(np.uint8)


def _default_obs(model: ModelParams) -> tuple[str, ...]:
    return {"vm": ("ones_fraction",), "cp": ("infected_fraction",),
            "sim": ("magnetisation",)}[_model_tag(model)]


def _obs_codes(model: ModelParams, observables) -> tuple[list[str], np.ndarray]:
    names = list(observables if observables is not None else _default_obs(model))
    valid = _VALID_OBS[_model_tag(model)]
    for name in names:
        if name not in _OBS_CODES:
            raise ParameterError(f"unknown observable {name!r}")
        if name not in valid:
            raise ParameterError(f"observable {name!r} invalid for {_model_tag(model)}")
    codes = np.array([_OBS_CODES[nm] for nm in names], dtype=np.int64)
    return names, codes


def _sample_grid(tmax: float, sample_dt: float) -> np.ndarray:
    if tmax <= 0 or sample_dt <= 0:
        raise PreconditionError("tmax and sample_dt must be positive")
    k = int(math.floor(tmax / sample_dt + 1e-9))
    return np.arange(k + 1) * sample_dt


def _j_stub(model: SIM, g: Graph) -> np.ndarray:
    indptr, targets, stub_edge = g.csr()
    if model.J_edges is not None:
        je = np.asarray(model.J_edges, dtype=float)
        if je.shape != (g.num_edges,):
            raise ParameterError("J_edges must have one entry per edge")
        return je[stub_edge]
    return np.full(targets.shape[0], float(model.J))


# ---------------------------------------------------------------------------
# Rates and energy (reference implementations, also used as test oracles)
# ---------------------------------------------------------------------------


def hamiltonian(g: Graph, config, J: float = 1.0, h: float = 0.0,
                J_edges=None) -> float:
    """-sum_edges J_e * s_u * s_v - h * sum_v s_v over the edge multiset.

    Self-loops contribute the constant -J_e (since s*s = 1)."""
    arr = np.asarray(config, dtype=float)
    if arr.shape != (g.n,):
        raise PreconditionError("configuration length mismatch")
    if J_edges is not None:
        je = np.asarray(J_edges, dtype=float)
        if je.shape != (g.num_edges,):
            raise ParameterError("coupling vector length mismatch")
    else:
        je = np.full(g.num_edges, float(J))
    eu, ev = g.edge_arrays()
    return float(-(je * arr[eu] * arr[ev]).sum() - h * arr.sum())


def flip_rate(model: ModelParams, g: Graph, config, v: int) -> float:
    """Rate at which vertex v flips in the given configuration."""
    if not 0 <= v < g.n:
        raise PreconditionError("vertex out of range")
    indptr, targets, _ = g.csr()
    nbrs = targets[indptr[v]:indptr[v + 1]]
    if isinstance(model, VM):
        deg = len(nbrs)
        if deg == 0:
            return 0.0
        opp = int(np.sum(np.asarray(config)[nbrs] != config[v]))
        return opp / deg
    if isinstance(model, CP):
        if config[v] == 1:
            return 1.0
        # self-loops never infect their own vertex
        infected = int(np.sum((np.asarray(config)[nbrs] == 1) & (nbrs != v)))
        return model.lam * infected
    if isinstance(model, SIM):
        flipped = np.array(config, dtype=np.int64)
        flipped[v] = -flipped[v]
        dh = (hamiltonian(g, flipped, model.J, model.h, model.J_edges)
              - hamiltonian(g, config, model.J, model.h, model.J_edges))
        return math.exp(-model.beta * max(dh, 0.0))
    raise ParameterError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# Trajectory records
# ---------------------------------------------------------------------------


@dataclass
class RunRecord:
    times: np.ndarray
    values: dict[str, np.ndarray]
    absorbed: bool
    absorption_time: float | None
    final: np.ndarray
    seed: int
    replica: int = 0
    events: list[tuple[float, int]] | None = None


@dataclass
class AbsorptionResult:
    absorbed: bool
    tau: float
    final_tag: str
    final: np.ndarray


@dataclass
class CoupledRun:
    low: RunRecord
    high: RunRecord
    ordered: bool


@dataclass(frozen=True)
class RewiringSchedule:
    nu: float

    def __post_init__(self):
        if self.nu < 0:
            raise ParameterError("rewiring intensity must be >= 0")


@dataclass
class RewiringRun:
    record: RunRecord
    final_graph: Graph
    tagged_edge_hits: int
    degree_snapshots: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Simulation drivers
# ---------------------------------------------------------------------------


def _run_core(g, model, states, t_end, sample_ts, codes, seed, record_events):
    indptr, targets, _ = g.csr()
    eu, ev = g.edge_arrays()
    st = rng.state_from(seed)
    out = np.zeros((len(codes), len(sample_ts)))
    cap = 1024 if record_events else 0
    while True:
        ev_t = np.empty(cap)
        ev_v = np.empty(cap, dtype=np.int64)
        work = states.copy()
        st[:] = rng.state_from(seed)
        if isinstance(model, VM):
            res = _engine.vm_run(indptr, targets, work, t_end, sample_ts, codes,
                                 out, eu, ev, st, ev_t, ev_v, record_events)
        elif isinstance(model, CP):
            res = _engine.cp_run(indptr, targets, work, model.lam, t_end,
                                 sample_ts, codes, out, eu, ev, st,
                                 ev_t, ev_v, record_events)
        else:
            res = _engine.sim_run(indptr, targets, _j_stub(model, g), work,
                                  model.beta, model.h, t_end, sample_ts, codes,
                                  out, eu, ev, st, -1, ev_t, ev_v, record_events)
        absorbed, t_abs, nfill, n_ev, overflow = res
        if not overflow:
            events = (
                [(float(t), int(v)) for t, v in zip(ev_t[:n_ev], ev_v[:n_ev])]
                if record_events else None
            )
            return absorbed, t_abs, nfill, out, work, events
        cap *= 2


def simulate(
    g: Graph,
    model: ModelParams,
    init,
    tmax: float,
    seed: int,
    sample_dt: float,
    observables=None,
    replica: int = 0,
    record_events: bool = False,
) -> RunRecord:
    """Exact trajectory up to absorption or tmax, sampled every sample_dt.

    ``record_events`` keeps the raw flip log (time, vertex); it is only
    allowed for n <= 64 as a memory guard.
    """
    if record_events and g.n > EVENT_LOG_MAX_N:
        raise ParameterError(f"event logs are limited to n <= {EVENT_LOG_MAX_N}")
    names, codes = _obs_codes(model, observables)
    sample_ts = _sample_grid(tmax, sample_dt)
    states = _to_internal(model, g, init)
    absorbed, t_abs, nfill, out, final, events = _run_core(
        g, model, states, tmax, sample_ts, codes, seed, record_events
    )
    return RunRecord(
        times=sample_ts[:nfill],
        values={nm: out[i, :nfill].copy() for i, nm in enumerate(names)},
        absorbed=bool(absorbed),
        absorption_time=float(t_abs) if absorbed else None,
        final=_to_external(model, final),
        seed=seed,
        replica=replica,
        events=events,
    )


def run_to_absorption(g: Graph, model: ModelParams, init, seed: int,
                      time_cap: float) -> AbsorptionResult:
    """Exact absorption time (consensus / extinction), or the cap."""
    if time_cap <= 0:
        raise PreconditionError("time_cap must be positive")
    names, codes = _obs_codes(model, ())
    empty = np.empty(0)
    states = _to_internal(model, g, init)
    absorbed, t_abs, _, _, final, _ = _run_core(
        g, model, states, time_cap, empty, codes, seed, False
    )
    if isinstance(model, SIM):
        absorbed = False
    ones = int(final.sum())
    if not absorbed:
        tag = "cap"
        tau = float(time_cap)
    else:
        tau = float(t_abs)
        if isinstance(model, CP):
            tag = "extinct"
        elif ones == g.n:
            tag = "consensus-1"
        elif ones == 0:
            tag = "consensus-0"
        else:
            tag = "frozen"
    return AbsorptionResult(bool(absorbed), tau, tag, _to_external(model, final))


def run_to_ones_count(g: Graph, model: SIM, init, target_ones: int, seed: int,
                      time_cap: float) -> AbsorptionResult:
    """Exact hitting time of a given up-spin count under Glauber dynamics."""
    if not isinstance(model, SIM):
        raise ParameterError("ones-count hitting times are a spin-dynamics tool")
    if not 0 <= target_ones <= g.n:
        raise ParameterError("target out of range")
    indptr, targets, _ = g.csr()
    eu, ev = g.edge_arrays()
    states = _to_internal(model, g, init)
    st = rng.state_from(seed)
    dummy = np.empty(0)
    out = np.zeros((0, 0))
    hit, t_hit, _, _, _ = _engine.sim_run(
        indptr, targets, _j_stub(model, g), states, model.beta, model.h,
        time_cap, dummy, np.empty(0, dtype=np.int64), out, eu, ev, st,
        target_ones, dummy, np.empty(0, dtype=np.int64), False,
    )
    tag = "hit" if hit else "cap"
    return AbsorptionResult(bool(hit), float(t_hit) if hit else float(time_cap),
                            tag, _to_external(model, states))


def coupled_simulate(
    g: Graph,
    model: ModelParams,
    init_low,
    init_high,
    tmax: float,
    seed: int,
    sample_dt: float,
    observables=None,
) -> CoupledRun:
    """Two trajectories driven by one shared graphical randomness.

    For the voter model and the contact process the shared construction is
    monotone, so componentwise order of the initial pair is preserved; the
    run verifies the order after every event and reports it.
    """
    if isinstance(model, SIM):
        raise ParameterError("ordered coupling is provided for VM and CP only")
    lo = _to_internal(model, g, init_low)
    hi = _to_internal(model, g, init_high)
    if np.any(lo > hi):
        raise PreconditionError("init_low must be <= init_high componentwise")
    names, codes = _obs_codes(model, observables)
    sample_ts = _sample_grid(tmax, sample_dt)
    indptr, targets, _ = g.csr()
    eu, ev = g.edge_arrays()
    out_lo = np.zeros((len(codes), len(sample_ts)))
    out_hi = np.zeros((len(codes), len(sample_ts)))
    st = rng.state_from(seed)
    if isinstance(model, VM):
        ordered, nfill = _engine.vm_coupled_run(
            indptr, targets, lo, hi, tmax, sample_ts, codes,
            out_lo, out_hi, eu, ev, st
        )
    else:
        stub_owner = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(indptr))
        ordered, nfill = _engine.cp_coupled_run(
            indptr, targets, stub_owner, lo, hi, model.lam, tmax, sample_ts,
            codes, out_lo, out_hi, eu, ev, st
        )

    def record(out, final):
        return RunRecord(
            times=sample_ts[:nfill],
            values={nm: out[i, :nfill].copy() for i, nm in enumerate(names)},
            absorbed=False,
            absorption_time=None,
            final=_to_external(model, final),
            seed=seed,
        )

    return CoupledRun(record(out_lo, lo), record(out_hi, hi), bool(ordered))


def simulate_with_rewiring(
    g: Graph,
    model: ModelParams,
    sched: RewiringSchedule,
    init,
    tmax: float,
    seed: int,
    sample_dt: float,
    observables=None,
    track_degrees: bool = False,
) -> RewiringRun:
    """Particle dynamics superimposed with degree-preserving edge swaps.

    Each unordered pair of distinct edges triggers at rate nu/M; on a trigger
    the two edges are replaced by one of the two alternative pairings, chosen
    uniformly, so a given edge is involved at rate nu*(M-1)/M.  Self-loops
    and multi-edges created by a swap are kept.  With nu = 0 the call
    delegates to :func:`simulate`, so the trajectory is identical.
    """
    if g.directed:
        raise PreconditionError("rewiring is defined for undirected graphs")
    if isinstance(model, SIM) and model.J_edges is not None:
        raise ParameterError("per-edge couplings cannot follow rewired edges")
    if sched.nu == 0.0:
        rec = simulate(g, model, init, tmax, seed, sample_dt, observables)
        return RewiringRun(rec, g, 0, None)
    names, codes = _obs_codes(model, observables)
    sample_ts = _sample_grid(tmax, sample_dt)
    states = _to_internal(model, g, init)
    indptr, targets0, stub_edge0 = g.csr()
    targets = targets0.copy()
    stub_edge = stub_edge0.copy()
    eu, ev = g.edge_arrays()
    m = g.num_edges
    estub0 = np.empty(m, dtype=np.int64)
    estub1 = np.empty(m, dtype=np.int64)
    seen = np.zeros(m, dtype=np.int64)
    for pos in range(len(targets)):
        e = stub_edge[pos]
        if seen[e] == 0:
            estub0[e] = pos
            seen[e] = 1
        else:
            estub1[e] = pos
    lam = model.lam if isinstance(model, CP) else 0.0
    beta = model.beta if isinstance(model, SIM) else 0.0
    h = model.h if isinstance(model, SIM) else 0.0
    j_scalar = model.J if isinstance(model, SIM) else 0.0
    out = np.zeros((len(codes), len(sample_ts)))
    out_deg = np.zeros((len(sample_ts) if track_degrees else 0, g.n), dtype=np.int64)
    st = rng.state_from(seed)
    nfill, tagged = _engine.rewire_run(
        {"vm": _engine.MODEL_VM, "cp": _engine.MODEL_CP, "sim": _engine.MODEL_SIM}[
            _model_tag(model)
        ],
        indptr, targets, stub_edge, estub0, estub1, eu, ev, states,
        lam, beta, h, j_scalar, sched.nu, tmax, sample_ts, codes, out, st,
        out_deg, track_degrees,
    )
    rec = RunRecord(
        times=sample_ts[:nfill],
        values={nm: out[i, :nfill].copy() for i, nm in enumerate(names)},
        absorbed=False,
        absorption_time=None,
        final=_to_external(model, states),
        seed=seed,
    )
    final_graph = Graph(g.n, False, [(int(u), int(v)) for u, v in zip(eu, ev)])
    return RewiringRun(rec, final_graph, int(tagged),
                       out_deg[:nfill] if track_degrees else None)


# ---------------------------------------------------------------------------
# Graphical representation (space-time arrow structure)
# ---------------------------------------------------------------------------


@dataclass
class GraphicalRep:
    """Per-vertex unit-rate Poisson event times, each annotated with the
    neighbour whose opinion the vertex adopts at that instant."""

    t0: float
    n: int
    times: list[np.ndarray]
    marks: list[np.ndarray]

    def merged(self) -> list[tuple[float, int, int]]:
        """All events (t, vertex, source) in global time order."""
        evs = [
            (float(t), i, int(j))
            for i in range(self.n)
            for t, j in zip(self.times[i], self.marks[i])
        ]
        evs.sort()
        return evs


def build_graphical_rep(g: Graph, t0: float, seed: int) -> GraphicalRep:
    """All arrows up to horizon t0.  Guarded to n <= 64 (raw event storage)."""
    if t0 <= 0:
        raise PreconditionError("t0 must be positive")
    if g.n > EVENT_LOG_MAX_N:
        raise ParameterError(f"graphical representations are limited to n <= {EVENT_LOG_MAX_N}")
    indptr, targets, _ = g.csr()
    st = rng.state_from(seed)
    times: list[np.ndarray] = []
    marks: list[np.ndarray] = []
    for i in range(g.n):
        deg = int(indptr[i + 1] - indptr[i])
        ts: list[float] = []
        js: list[int] = []
        if deg > 0:
            t = float(rng.next_exp(st))
            while t <= t0:
                ts.append(t)
                js.append(int(targets[indptr[i] + rng.next_below(st, deg)]))
                t += float(rng.next_exp(st))
        times.append(np.array(ts))
        marks.append(np.array(js, dtype=np.int64))
    return GraphicalRep(t0, g.n, times, marks)


def evolve_forward(rep: GraphicalRep, init) -> np.ndarray:
    """Apply the arrows in time order: at (i, t, j), vertex i adopts j's value."""
    state = np.array(init)
    if state.shape != (rep.n,):
        raise PreconditionError("configuration length mismatch")
    for _, i, j in rep.merged():
        state[i] = state[j]
    return state
