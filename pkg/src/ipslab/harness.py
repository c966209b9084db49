"""Named desk-scale experiments, seed management, and result bundles.

Every experiment is a pure function of its configuration: replica k draws
its stream from ``derive_seed(master_seed, k)``, auxiliary streams (graph
construction, initial conditions) use documented reserved indices, so a
rerun with the same configuration is bit-identical and adding replicas
leaves existing ones unchanged.

Seed conventions
----------------
* replica stream:   ``derive_seed(master, k)`` for k = 0..R-1
* per-replica dynamics seed: ``derive_seed(seed_k, 0)``
* per-replica initial-condition seed: ``derive_seed(seed_k, 1)``
* graph and other fixed inputs: ``derive_seed(master, 2**32 + j)``
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable

import mpmath as mp
import numpy as np

from . import analytics as an
from . import dual as du
from . import dynamics as dyn
from . import graphgen as gg
from . import obsstats as obs
from .errors import ConfigError
from .models import CP, SIM, VM
from .rng import derive_seed, next_unit, state_from

__all__ = [
    "DEFAULT_MASTER_SEED",
    "ExperimentConfig",
    "ExperimentResult",
    "EXPERIMENTS",
    "run_experiment",
    "make_init",
]

DEFAULT_MASTER_SEED = 20250810

_U = np.uint64


def _seed(master: int, k: int) -> int:
    return int(derive_seed(_U(master), _U(k)))


def _aux_seed(master: int, j: int) -> int:
    return _seed(master, 2**32 + j)


def _replica_streams(master: int, k: int) -> tuple[int, int]:
    sk = _U(_seed(master, k))
    return int(derive_seed(sk, _U(0))), int(derive_seed(sk, _U(1)))


def _bernoulli_init(n: int, u: float, seed: int, spin: bool = False) -> np.ndarray:
    st = state_from(seed)
    arr = np.array([1 if next_unit(st) < u else 0 for _ in range(n)], dtype=np.int64)
    return (2 * arr - 1) if spin else arr.astype(np.uint8)


def make_init(kind: str, n: int, model, seed: int) -> np.ndarray:
    """Parse an initial-condition spec: all-one | all-zero | bernoulli:u |
    explicit:<json-path>.  For spin dynamics 'zero' means the all-down state."""
    spin = isinstance(model, SIM)
    if kind == "all-one":
        return np.ones(n, dtype=np.int64) if spin else np.ones(n, dtype=np.uint8)
    if kind == "all-zero":
        return -np.ones(n, dtype=np.int64) if spin else np.zeros(n, dtype=np.uint8)
    if kind.startswith("bernoulli:"):
        u = float(kind.split(":", 1)[1])
        if not 0.0 <= u <= 1.0:
            raise ConfigError("bernoulli density must lie in [0,1]")
        return _bernoulli_init(n, u, seed, spin)
    if kind.startswith("explicit:"):
        path = kind.split(":", 1)[1]
        if not os.path.exists(path):
            raise ConfigError(f"init file not found: {path}")
        with open(path) as fh:
            return np.asarray(json.load(fh), dtype=np.int64)
    raise ConfigError(f"unknown init spec {kind!r}")


# ---------------------------------------------------------------------------
# Configuration and bundles
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {"experiment", "master_seed", "replicas", "out_dir"}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    master_seed: int = DEFAULT_MASTER_SEED
    replicas: int | None = None
    out_dir: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment id {self.experiment!r}; "
                              f"known: {sorted(EXPERIMENTS)}")
        if self.replicas is not None and self.replicas < 1:
            raise ConfigError("replicas must be >= 1")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        unknown = set(doc) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class ExperimentResult:
    verdict: dict
    tables: dict[str, tuple[list[str], list[tuple]]] = field(default_factory=dict)
    seeds: list[int] = field(default_factory=list)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return "%.17g" % float(x)


def _write_bundle(cfg: ExperimentConfig, res: ExperimentResult) -> None:
    os.makedirs(cfg.out_dir, exist_ok=True)
    with open(os.path.join(cfg.out_dir, "verdict.json"), "w") as fh:
        json.dump(res.verdict, fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest = {
        "experiment": cfg.experiment,
        "master_seed": cfg.master_seed,
        "replicas": cfg.replicas,
        "derived_seeds": res.seeds,
    }
    with open(os.path.join(cfg.out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, (header, rows) in res.tables.items():
        with open(os.path.join(cfg.out_dir, f"{name}.csv"), "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(x) for x in row) + "\n")


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Execute a registered experiment; write its bundle if out_dir is set."""
    fn, default_reps = EXPERIMENTS[cfg.experiment]
    reps = cfg.replicas if cfg.replicas is not None else default_reps
    res = fn(cfg.master_seed, reps)
    res.verdict.setdefault("experiment", cfg.experiment)
    res.verdict.setdefault("master_seed", cfg.master_seed)
    if cfg.out_dir:
        _write_bundle(cfg, res)
    return res.verdict


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def _exp_duality(master: int, reps: int) -> ExperimentResult:
    """Forward evolution through the arrow structure must equal backward
    ancestral tracing, configuration by configuration."""
    graphs = [gg.generate(gg.Torus(1, 8), 0)]
    pmf = {1: 0.2, 2: 0.3, 3: 0.3, 4: 0.2}
    for i in range(50):
        seq = gg.sample_degrees(pmf, 20, _aux_seed(master, 100 + i))
        graphs.append(gg.generate(gg.ConfigModel(seq.degrees), _aux_seed(master, 200 + i)))
    failures = 0
    total = 0
    seeds = []
    for gi, g in enumerate(graphs):
        base = _U(_aux_seed(master, 300 + gi))
        init = np.arange(g.n)
        for k in range(reps):
            sk = int(derive_seed(base, _U(k)))
            rep = dyn.build_graphical_rep(g, 2.0, sk)
            fwd = dyn.evolve_forward(rep, init)
            bwd = du.trace_back(rep, init)
            total += 1
            if not np.array_equal(fwd, bwd):
                failures += 1
        seeds.append(int(base))
    verdict = {
        "claim": "forward arrow evolution equals backward ancestral tracing exactly",
        "paper_value": 0,
        "predicted_value": 0,
        "measured_value": failures,
        "tolerance": 0,
        "pass": failures == 0,
        "details": {"graphs": len(graphs), "runs": total},
    }
    return ExperimentResult(verdict, seeds=seeds)


def _exp_vm_rrg(master: int, reps: int) -> ExperimentResult:
    """Mean discordance on the 3-regular graph follows 2u(1-u) f_3(t) at
    short times; the series is itself cross-checked against the tree walk."""
    g = gg.generate(gg.Regular(1000, 3), _aux_seed(master, 0))
    u = 0.5
    tgrid = np.arange(1, 21) * 0.25
    acc = np.zeros(len(tgrid))
    seeds = []
    rows = []
    for k in range(reps):
        dseed, iseed = _replica_streams(master, k)
        seeds.append(dseed)
        init = _bernoulli_init(g.n, u, iseed)
        rec = dyn.simulate(g, VM(), init, 5.0, dseed, 0.25,
                           ("discordant_fraction",), replica=k)
        vals = np.zeros(len(tgrid) + 1)
        got = rec.values["discordant_fraction"]
        vals[:len(got)] = got
        acc += vals[1:]
        for t, v in zip(rec.times, got):
            rows.append((k, t, "discordant_fraction", v))
    acc /= reps
    pred = np.array([2 * u * (1 - u) * an.profile_f_d(3, t) for t in tgrid])
    sup_dev = float(np.abs(acc - pred).max())
    oracle_grid = np.array([0.5, 1.0, 2.0, 3.0, 5.0])
    surv = du.tree_meeting_survival(3, oracle_grid, _aux_seed(master, 1), 60000)
    series = np.array([an.profile_f_d(3, t) for t in oracle_grid])
    oracle_dev = float(np.abs(surv - series).max())
    verdict = {
        "claim": "sup_t |mean discordance - 2u(1-u) f_3(t)| small at short times",
        "paper_value": None,
        "predicted_value": [float(x) for x in pred],
        "measured_value": [float(x) for x in acc],
        "tolerance": 0.02,
        "pass": sup_dev <= 0.02 and oracle_dev <= 0.01,
        "details": {
            "sup_deviation": sup_dev,
            "series_vs_tree_oracle_dev": oracle_dev,
            "tree_oracle_tolerance": 0.01,
            "t_grid": [float(t) for t in tgrid],
        },
    }
    return ExperimentResult(
        verdict,
        tables={"trajectory": (["replica", "t", "observable", "value"], rows)},
        seeds=seeds,
    )


def _exp_theta_rewiring(master: int, reps: int) -> ExperimentResult:
    devs = []
    for d in range(3, 11):
        devs.append(abs(an.theta_d_nu(d, 0.0) - (d - 2) / (d - 1)))
    nus = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0]
    thetas = [an.theta_d_nu(3, nu) for nu in nus]
    increasing = all(a < b for a, b in zip(thetas, thetas[1:]))
    big = an.theta_d_nu(3, 1e6)
    ok = max(devs) < 1e-10 and increasing and big > 0.999
    verdict = {
        "claim": "continued-fraction diffusion constant: static limit, "
                 "monotonicity in the rewiring rate, fast-rewiring limit",
        "paper_value": [(d - 2) / (d - 1) for d in range(3, 11)],
        "predicted_value": None,
        "measured_value": {"max_static_dev": float(max(devs)),
                           "theta_3_nu": thetas, "theta_3_1e6": big},
        "tolerance": 1e-10,
        "pass": bool(ok),
        "details": {"nu_grid": nus},
    }
    return ExperimentResult(verdict)


def _exp_moran_kingman(master: int, reps: int) -> ExperimentResult:
    n = 200
    g = gg.generate(gg.Complete(n), 0)
    m_pair = (n - 1) / 2.0
    coal = []
    coal_rows = []
    seeds = []
    for k in range(reps):
        sk = _seed(master, k)
        seeds.append(sk)
        ws = du.coalescing_walks(g, np.arange(n), 1e9, sk)
        coal.append(ws.events[-1][0])
        for t, s, a in ws.events[-3:]:
            coal_rows.append((k, t, s, a))
    coal = np.array(coal)
    ratio = coal.mean() / m_pair
    target = 2.0 * (1 - 1.0 / n)
    ratio_se = coal.std(ddof=1) / m_pair / math.sqrt(reps)

    u = 0.3
    cons = []
    abs_rows = []
    for k in range(reps):
        dseed, iseed = _replica_streams(master, 2**20 + k)
        init = _bernoulli_init(n, u, iseed)
        r = dyn.run_to_absorption(g, VM(), init, dseed, 1e6)
        cons.append(r.tau)
        abs_rows.append((k, r.absorbed, r.tau, r.final_tag))
    cons = np.array(cons)
    se_cons = cons.std(ddof=1) / math.sqrt(reps)
    se_coal = coal.std(ddof=1) / math.sqrt(reps)
    lower = 2 * u * (1 - u) * coal.mean()
    lower_se = math.hypot(se_cons, 2 * u * (1 - u) * se_coal)
    upper_se = math.hypot(se_cons, se_coal)
    ok_ratio = abs(ratio - target) <= 0.05 * target
    ok_lower = lower <= cons.mean() + 2 * lower_se
    ok_upper = cons.mean() <= coal.mean() + 2 * upper_se
    verdict = {
        "claim": "full coalescence matches the pure-death limit; consensus "
                 "time is sandwiched by coalescence time",
        "paper_value": target,
        "predicted_value": target,
        "measured_value": float(ratio),
        "tolerance": 0.05,
        "pass": bool(ok_ratio and ok_lower and ok_upper),
        "details": {
            "ratio_se": float(ratio_se),
            "mean_consensus": float(cons.mean()),
            "sandwich_lower": float(lower),
            "sandwich_upper": float(coal.mean()),
            "pooled_se_lower": float(lower_se),
            "pooled_se_upper": float(upper_se),
            "u": u,
        },
    }
    return ExperimentResult(
        verdict,
        tables={
            "coalescence": (["replica", "time", "survivor", "absorbed"], coal_rows),
            "absorption": (["replica", "absorbed", "tau", "final_state"], abs_rows),
        },
        seeds=seeds,
    )


def _exp_fw_discordant(master: int, reps: int) -> ExperimentResult:
    """Discordance under the voter model on the complete graph decays like
    the squared heterozygosity of the diffusion limit."""
    n = 1000
    g = gg.generate(gg.Complete(n), 0)
    u = 0.5
    svals = np.array([0.25, 0.5, 1.0])
    sample_idx = np.array([1, 2, 4])
    acc = np.zeros(3)
    seeds = []
    rows = []
    for k in range(reps):
        dseed, iseed = _replica_streams(master, k)
        seeds.append(dseed)
        init = _bernoulli_init(n, u, iseed)
        rec = dyn.simulate(g, VM(), init, 1000.0, dseed, 250.0,
                           ("discordant_fraction",), replica=k)
        vals = np.zeros(5)
        got = rec.values["discordant_fraction"]
        vals[:len(got)] = got
        acc += vals[sample_idx]
        for t, v in zip(rec.times, got):
            rows.append((k, t, "discordant_fraction", v))
    acc /= reps
    # direct边 counting doubles the printed normalisation (see ledger)
    pred = 2.0 * n / (n - 1) * u * (1 - u) * np.exp(-2 * svals)
    rel = np.abs(acc / pred - 1.0)
    ok_sim = bool(np.all(rel <= 0.05))

    fw = an.fw_simulate(1.0, u, 1.0, 1e-4, _aux_seed(master, 5), 3000,
                        sample_ds=0.25)
    het = fw.x * (1 - fw.x)
    fw_ok = True
    fw_detail = []
    for s in svals:
        col = int(round(s / 0.25))
        m = het[:, col]
        se = m.std(ddof=1) / math.sqrt(len(m))
        targ = u * (1 - u) * math.exp(-2 * s)
        fw_detail.append({"s": float(s), "mean": float(m.mean()),
                          "target": targ, "se": float(se)})
        if abs(m.mean() - targ) > 3 * se:
            fw_ok = False
    verdict = {
        "claim": "discordance at diffusive times decays like u(1-u)e^{-2s}; "
                 "the diffusion integrator reproduces the same decay",
        "paper_value": [float(x) for x in (pred / 2.0)],
        "predicted_value": [float(x) for x in pred],
        "measured_value": [float(x) for x in acc],
        "tolerance": 0.05,
        "pass": bool(ok_sim and fw_ok),
        "details": {
            "relative_dev": [float(x) for x in rel],
            "s_values": [float(s) for s in svals],
            "fw_checks": fw_detail,
            "note": "paper_value uses the half-count edge normalisation; "
                    "predicted_value counts discordant pairs directly",
        },
    }
    return ExperimentResult(
        verdict,
        tables={"trajectory": (["replica", "t", "observable", "value"], rows)},
        seeds=seeds,
    )


def _exp_cp_oracle(master: int, reps: int) -> ExperimentResult:
    lam = 1.0
    ratios_corrected = {}
    ratios_printed = {}
    for n in (20, 40, 60):
        up, dn = an.lumped_rates(CP(lam=lam), n)
        lt = float(mp.log(an.bd_mean_absorption(up, dn, n, 0)))
        ratios_corrected[n] = lt / an.extinction_log_mean_field(n, lam)
        ratios_printed[n] = lt / an.extinction_asymptotic(n, lam)
    devs = [abs(ratios_corrected[n] - 1) for n in (20, 40, 60)]
    ok_window = 0.85 <= ratios_corrected[60] <= 1.15
    ok_monotone = devs[0] >= devs[1] >= devs[2]

    n_sim, lam_sim = 10, 0.05
    g = gg.generate(gg.Complete(n_sim), 0)
    up, dn = an.lumped_rates(CP(lam=lam_sim), n_sim)
    oracle = float(an.bd_mean_absorption(up, dn, n_sim, 0))
    taus = []
    abs_rows = []
    seeds = []
    init = np.ones(n_sim, dtype=np.uint8)
    for k in range(reps):
        sk = _seed(master, k)
        seeds.append(sk)
        r = dyn.run_to_absorption(g, CP(lam=lam_sim), init, sk, 1e7)
        taus.append(r.tau)
        abs_rows.append((k, r.absorbed, r.tau, r.final_tag))
    mean_tau = float(np.mean(taus))
    ok_sim = abs(mean_tau - oracle) <= 0.05 * oracle
    verdict = {
        "claim": "log mean extinction follows the mean-field constant; "
                 "full simulation matches the exact chain",
        "paper_value": an.extinction_asymptotic(60, lam),
        "predicted_value": an.extinction_log_mean_field(60, lam),
        "measured_value": float(mp.log(an.bd_mean_absorption(
            *an.lumped_rates(CP(lam=lam), 60), 60, 0))),
        "tolerance": 0.15,
        "pass": bool(ok_window and ok_monotone and ok_sim),
        "details": {
            "ratios_vs_mean_field": {str(k): float(v) for k, v in ratios_corrected.items()},
            "ratios_vs_printed": {str(k): float(v) for k, v in ratios_printed.items()},
            "small_system": {"n": n_sim, "lam": lam_sim, "oracle": oracle,
                             "simulated_mean": mean_tau, "replicas": reps},
        },
    }
    return ExperimentResult(
        verdict,
        tables={"absorption": (["replica", "absorbed", "tau", "final_state"], abs_rows)},
        seeds=seeds,
    )


def _exp_cp_expo(master: int, reps: int) -> ExperimentResult:
    n, lam = 30, 2.0 / 30
    g = gg.generate(gg.Complete(n), 0)
    init = np.ones(n, dtype=np.uint8)
    taus = []
    abs_rows = []
    seeds = []
    for k in range(reps):
        sk = _seed(master, k)
        seeds.append(sk)
        r = dyn.run_to_absorption(g, CP(lam=lam), init, sk, 1e9)
        taus.append(r.tau)
        abs_rows.append((k, r.absorbed, r.tau, r.final_tag))
    taus = np.array(taus)
    ks = obs.ks_distance(taus / taus.mean(), lambda x: 1 - math.exp(-x))
    up, dn = an.lumped_rates(CP(lam=lam), n)
    oracle = float(an.bd_mean_absorption(up, dn, n, 0))
    verdict = {
        "claim": "normalised extinction time is asymptotically unit exponential",
        "paper_value": 0.0,
        "predicted_value": 0.0,
        "measured_value": float(ks),
        "tolerance": 0.08,
        "pass": bool(ks <= 0.08),
        "details": {"mean_tau": float(taus.mean()), "oracle_mean": oracle,
                    "n": n, "lam": lam},
    }
    return ExperimentResult(
        verdict,
        tables={"absorption": (["replica", "absorbed", "tau", "final_state"], abs_rows)},
        seeds=seeds,
    )


def _exp_kramers(master: int, reps: int) -> ExperimentResult:
    beta, h = 1.5, 0.1
    tri = an.kramers(beta, h)
    log_ratios = {}
    for n in (100, 200, 400, 800):
        et = an.cw_crossover_time(beta, h, n)
        log_ratios[n] = float(mp.log(et) / (math.log(tri.prefactor) + n * tri.gamma))
    devs = [abs(log_ratios[n] - 1) for n in (100, 200, 400, 800)]
    ok_oracle = devs[0] >= devs[1] >= devs[2] >= devs[3] and devs[3] <= 0.10

    n_sim = 20
    g = gg.generate(gg.Complete(n_sim), 0)
    model = SIM(beta=beta, J=1.0 / n_sim, h=h)
    k_minus, k_plus = an.cw_lumped_endpoints(beta, h, n_sim)
    oracle = float(an.bd_mean_absorption(
        *an.lumped_rates(model, n_sim), k_minus, k_plus))
    init = np.array([1] * k_minus + [-1] * (n_sim - k_minus), dtype=np.int64)
    taus = []
    abs_rows = []
    seeds = []
    for k in range(reps):
        sk = _seed(master, k)
        seeds.append(sk)
        r = dyn.run_to_ones_count(g, model, init, k_plus, sk, 1e9)
        taus.append(r.tau)
        abs_rows.append((k, r.absorbed, r.tau, r.final_tag))
    mean_tau = float(np.mean(taus))
    ok_sim = abs(mean_tau - oracle) <= 0.10 * oracle
    verdict = {
        "claim": "well-to-well crossover follows K e^{N Gamma} at log accuracy; "
                 "full spin simulation matches the lumped chain",
        "paper_value": {"gamma": tri.gamma, "prefactor": tri.prefactor},
        "predicted_value": oracle,
        "measured_value": mean_tau,
        "tolerance": 0.10,
        "pass": bool(ok_oracle and ok_sim),
        "details": {
            "log_ratios": {str(k): v for k, v in log_ratios.items()},
            "triple": {"m_minus": tri.m_minus, "m_star": tri.m_star,
                       "m_plus": tri.m_plus},
            "endpoints": [k_minus, k_plus],
        },
    }
    return ExperimentResult(
        verdict,
        tables={"absorption": (["replica", "absorbed", "tau", "final_state"], abs_rows)},
        seeds=seeds,
    )


def _exp_attractive(master: int, reps: int) -> ExperimentResult:
    g_cp = gg.generate(gg.ER(50, 0.1), _aux_seed(master, 0))
    g_vm = gg.generate(gg.Torus(1, 20), 0)
    ordered_cp = 0
    ordered_vm = 0
    seeds = []
    for k in range(reps):
        dseed, iseed = _replica_streams(master, k)
        seeds.append(dseed)
        low = np.zeros(50, dtype=np.uint8)
        low[k % 50] = 1
        high = np.ones(50, dtype=np.uint8)
        run = dyn.coupled_simulate(g_cp, CP(lam=1.0), low, high, 5.0, dseed, 0.5)
        ordered_cp += run.ordered
        st = state_from(iseed)
        high_vm = np.array([1 if next_unit(st) < 0.6 else 0 for _ in range(20)],
                           dtype=np.uint8)
        low_vm = np.array([s if next_unit(st) < 0.5 else 0 for s in high_vm],
                          dtype=np.uint8)
        run = dyn.coupled_simulate(g_vm, VM(), low_vm, high_vm, 20.0,
                                   _seed(master, 2**21 + k), 1.0)
        ordered_vm += run.ordered

    # detailed balance on small graphs, including loops and multi-edges
    db_max = 0.0
    graphs = [
        gg.generate(gg.Complete(4), 0),
        gg.generate(gg.Torus(1, 6), 0),
        gg.generate(gg.ER(6, 0.5), _aux_seed(master, 1)),
        gg.generate(gg.ConfigModel((1, 3, 1, 3, 2, 4)), _aux_seed(master, 2)),
    ]
    for g in graphs:
        model = SIM(beta=0.7, J=1.3, h=0.4)
        for bits in range(2 ** g.n):
            config = np.array([1 if bits >> i & 1 else -1 for i in range(g.n)])
            h_cur = dyn.hamiltonian(g, config, model.J, model.h)
            for v in range(g.n):
                flipped = config.copy()
                flipped[v] = -flipped[v]
                h_new = dyn.hamiltonian(g, flipped, model.J, model.h)
                fwd = dyn.flip_rate(model, g, config, v)
                bwd = dyn.flip_rate(model, g, flipped, v)
                lhs = fwd / bwd
                rhs = math.exp(-model.beta * (h_new - h_cur))
                db_max = max(db_max, abs(lhs / rhs - 1.0))

    # traps
    g = graphs[3]
    vm_trap = max(
        sum(dyn.flip_rate(VM(), g, np.ones(g.n, dtype=int), v) for v in range(g.n)),
        sum(dyn.flip_rate(VM(), g, np.zeros(g.n, dtype=int), v) for v in range(g.n)),
    )
    cp_trap = sum(dyn.flip_rate(CP(lam=2.0), g, np.zeros(g.n, dtype=int), v)
                  for v in range(g.n))
    sim_alive = sum(dyn.flip_rate(SIM(beta=2.0, J=1.0, h=0.1), g,
                                  np.ones(g.n, dtype=int), v) for v in range(g.n))
    ok = (ordered_cp == reps and ordered_vm == reps and db_max <= 1e-12
          and vm_trap == 0.0 and cp_trap == 0.0 and sim_alive > 0.0)
    verdict = {
        "claim": "shared-randomness coupling preserves componentwise order; "
                 "spin rates satisfy detailed balance; absorbing states have "
                 "zero exit rate",
        "paper_value": None,
        "predicted_value": reps,
        "measured_value": {"ordered_cp": ordered_cp, "ordered_vm": ordered_vm,
                           "detailed_balance_rel_err": db_max},
        "tolerance": 1e-12,
        "pass": bool(ok),
        "details": {"vm_trap_rate": vm_trap, "cp_trap_rate": cp_trap,
                    "sim_total_rate_positive": sim_alive > 0},
    }
    return ExperimentResult(verdict, seeds=seeds)


def _exp_idelta_gamma(master: int, reps: int) -> ExperimentResult:
    grid_ok = True
    for x in (0.1, 0.2, 0.3, 0.4, 0.5):
        for delta in (1.5, 3.0, 6.0, 25.0):
            y = an.i_delta(x, delta)
            if math.isnan(y):
                continue
            if not an.i_delta_holds(x, delta, y):
                grid_ok = False
            if y - 1e-6 > 0 and an.i_delta_holds(x, delta, y - 1e-6):
                grid_ok = False
    limit_dev = abs(an.i_delta(0.5, 1e6) - 0.25)

    # brute-force scan oracle for the barrier indices
    bf_ok = True
    st = state_from(_aux_seed(master, 7))
    for trial in range(reps):
        n = 10 + int(next_unit(st) * 30)
        pmf = {1: 0.2, 2: 0.2, 3: 0.3, 4: 0.2, 6: 0.1}
        seq = gg.sample_degrees(pmf, n, _aux_seed(master, 1000 + trial))
        deg = np.sort(np.asarray(seq.degrees))
        J = 1.0
        h = 0.1 + 1.9 * next_unit(st)
        gb = an.gamma_bounds(deg, J, h)
        ell = np.concatenate([[0], np.cumsum(deg)]).astype(float)
        ell_n = ell[-1]
        m_bar = n
        for m in range(1, n):
            inc = (ell[m + 1] * (1 - ell[m + 1] / ell_n)
                   - ell[m] * (1 - ell[m] / ell_n))
            if h / J >= inc:
                m_bar = m
                break
        m_tilde = next(m for m in range(1, n + 1) if ell[m] >= 0.5 * ell_n)
        if gb.M_bar != m_bar or gb.M_tilde != m_tilde:
            bf_ok = False

    ratios = {}
    trend_ok = True
    prev = None
    for d in (10, 100, 1000):
        n = 2000
        gb = an.gamma_bounds([d] * n, 1.0, 0.5)
        ratios[d] = gb.gamma_plus / gb.gamma_minus
        if abs(ratios[d] - 1) > 5 / math.sqrt(d):
            trend_ok = False
        if prev is not None and abs(ratios[d] - 1) >= abs(prev - 1):
            trend_ok = False
        prev = ratios[d]
    ok = grid_ok and limit_dev < 0.05 and bf_ok and trend_ok
    verdict = {
        "claim": "barrier-counting function and barrier-bound indices match "
                 "their defining scans; bounds tighten for large degrees",
        "paper_value": 0.25,
        "predicted_value": 0.25,
        "measured_value": float(an.i_delta(0.5, 1e6)),
        "tolerance": 0.05,
        "pass": bool(ok),
        "details": {"grid_consistent": grid_ok, "bruteforce_agree": bf_ok,
                    "regular_ratios": {str(k): float(v) for k, v in ratios.items()}},
    }
    return ExperimentResult(verdict)


def _exp_cp_torus(master: int, reps: int) -> ExperimentResult:
    """Qualitative extinction-time contrast across the phase transition.

    Subcritical medians are exact; supercritical runs are censored at
    T(N) = N^{3/2}, so 'super-linear growth' is certified by >=95% survival
    to a super-linearly growing threshold at every size."""
    sizes = (50, 100, 200)
    lam_sub, lam_sup = 0.8, 2.5
    med_sub = {}
    med_sup = {}
    frac_capped = {}
    order_ok = {}
    abs_rows = []
    seeds = []
    for n in sizes:
        g = gg.generate(gg.Torus(1, n), 0)
        init = np.ones(n, dtype=np.uint8)
        cap_sup = float(n) ** 1.5
        t_sub = []
        t_sup = []
        capped = 0
        ordered = 0
        for k in range(reps):
            s1 = _seed(master, n * 1000 + k)
            s2 = _seed(master, n * 1000 + 2**20 + k)
            seeds.append(s1)
            r1 = dyn.run_to_absorption(g, CP(lam=lam_sub), init, s1, 1e4)
            r2 = dyn.run_to_absorption(g, CP(lam=lam_sup), init, s2, cap_sup)
            t_sub.append(r1.tau)
            t_sup.append(r2.tau)
            capped += not r2.absorbed
            ordered += r2.tau > r1.tau
            abs_rows.append((k, r1.absorbed, r1.tau, f"sub-n{n}"))
            abs_rows.append((k, r2.absorbed, r2.tau, f"sup-n{n}"))
        med_sub[n] = float(np.median(t_sub))
        med_sup[n] = float(np.median(t_sup))
        frac_capped[n] = capped / reps
        order_ok[n] = ordered / reps
    sub_ok = med_sub[200] < (200 / 50) * med_sub[50]
    sup_ok = all(frac_capped[n] >= 0.95 for n in sizes)
    sup_growth = med_sup[200] / med_sup[50] > (200 / 50) * 1.5
    ordering = all(order_ok[n] >= 0.95 for n in sizes)
    verdict = {
        "claim": "extinction-time growth is sub-linear below the threshold "
                 "and super-linear above it",
        "paper_value": 1.6494,
        "predicted_value": {"sub_linear_at": lam_sub, "super_linear_at": lam_sup},
        "measured_value": {"median_sub": med_sub, "median_sup": med_sup},
        "tolerance": 0.95,
        "pass": bool(sub_ok and sup_ok and sup_growth and ordering),
        "details": {
            "fraction_censored_supercritical": frac_capped,
            "per_replica_ordering_fraction": order_ok,
            "caps": {str(n): float(n) ** 1.5 for n in sizes},
        },
    }
    return ExperimentResult(
        verdict,
        tables={"absorption": (["replica", "absorbed", "tau", "final_state"], abs_rows)},
        seeds=seeds[:100],
    )


def _exp_annealed(master: int, reps: int) -> ExperimentResult:
    """The four-move annealed meeting atom.

    The worked closed form prices the event {tau = 4, designated walker
    moves first} for strict non-backtracking walks; by exchangeability the
    unrestricted atom is twice that.  Both are estimated, along with the
    plain stub-uniform (backtracking) walk for contrast."""
    pmf = {3: 1.0}
    formula = an.annealed_meet4_formula(pmf)
    n = 200_000
    est_nb = du.annealed_meeting_cm(pmf, n, 4, True, _seed(master, 0), reps)
    est_simple = du.annealed_meeting_cm(pmf, n, 4, False, _seed(master, 1),
                                        max(reps // 10, 1))
    se = est_nb.se(formula)
    dev = abs(est_nb.p_eq_t_first_mover - formula)
    verdict = {
        "claim": "worked four-move meeting formula is reproduced by the "
                 "exploration Monte Carlo",
        "paper_value": formula,
        "predicted_value": formula,
        "measured_value": est_nb.p_eq_t_first_mover,
        "tolerance": 3 * se,
        "pass": bool(dev <= 3 * se),
        "details": {
            "strict_nb_unrestricted_atom": est_nb.p_eq_t,
            "expected_unrestricted": 2 * formula,
            "backtracking_walk_atom": est_simple.p_eq_t,
            "p_meet_le_4_nb": est_nb.p_le_t,
            "replicas": reps,
            "n": n,
        },
    }
    return ExperimentResult(verdict, seeds=[_seed(master, 0), _seed(master, 1)])


EXPERIMENTS: dict[str, tuple[Callable[[int, int], ExperimentResult], int]] = {
    "duality-exact": (_exp_duality, 1000),
    "vm-rrg-discordant": (_exp_vm_rrg, 500),
    "theta-rewiring": (_exp_theta_rewiring, 1),
    "moran-kingman": (_exp_moran_kingman, 2000),
    "fw-discordant-complete": (_exp_fw_discordant, 2500),
    "cp-complete-oracle": (_exp_cp_oracle, 10000),
    "cp-exponential-law": (_exp_cp_expo, 1000),
    "cw-kramers": (_exp_kramers, 2000),
    "attractive-traps": (_exp_attractive, 1000),
    "idelta-gamma-bounds": (_exp_idelta_gamma, 100),
    "cp-torus-regimes": (_exp_cp_torus, 200),
    "annealed-meeting": (_exp_annealed, 1_000_000),
}
