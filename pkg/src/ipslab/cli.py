"""Command-line interface.

Subcommands: ``gen`` (graph generation), ``sim`` (ensemble simulation),
``dual`` (coalescing-walk runs), ``predict`` (closed-form quantities), and
``experiment`` (registered desk-scale checks).  Exit codes: 0 success /
check passed, 2 quantitative check failed, 1 error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import analytics as an
from . import dual as du
from . import dynamics as dyn
from . import graphgen as gg
from .errors import ConfigError, IpslabError
from .harness import (DEFAULT_MASTER_SEED, EXPERIMENTS, ExperimentConfig,
                      make_init, run_experiment)
from .models import CP, SIM, VM
from .rng import derive_seed

_U = np.uint64


def _load_spec(path: str) -> gg.GraphSpec:
    with open(path) as fh:
        doc = json.load(fh)
    family = doc.pop("family", None)
    try:
        if family == "complete":
            return gg.Complete(**doc)
        if family == "torus":
            return gg.Torus(**doc)
        if family == "er":
            return gg.ER(**doc)
        if family == "graphon":
            n = doc.pop("n")
            if "v" in doc:
                return gg.Graphon(n, rank1=np.asarray(doc.pop("v"), dtype=float))
            if "p" in doc:
                p = float(doc.pop("p"))
                return gg.Graphon(n, kernel=np.full((n, n), p))
            if "grid" in doc:
                return gg.Graphon(n, kernel=np.asarray(doc.pop("grid"), dtype=float))
            raise ConfigError("graphon spec needs one of v/p/grid")
        if family == "configmodel":
            return gg.ConfigModel(tuple(doc.pop("degrees")))
        if family == "regular":
            return gg.Regular(**doc)
        if family == "prefattach":
            return gg.PrefAttach(**doc)
        if family == "directedcm":
            return gg.DirectedCM(tuple(doc.pop("din")), tuple(doc.pop("dout")))
    except TypeError as exc:
        raise ConfigError(f"bad parameters for family {family!r}: {exc}") from exc
    raise ConfigError(f"unknown graph family {family!r}")


def _cmd_gen(args) -> int:
    spec = _load_spec(args.spec)
    g = gg.generate(spec, args.seed)
    gg.save_graph(g, args.out)
    print(f"wrote {args.out}: n={g.n} edges={g.num_edges} directed={g.directed}")
    return 0


def _build_model(args):
    if args.model == "vm":
        return VM()
    if args.model == "cp":
        if args.lam is None:
            raise ConfigError("cp requires --lambda")
        return CP(lam=args.lam)
    if args.model == "sim":
        if args.beta is None:
            raise ConfigError("sim requires --beta")
        return SIM(beta=args.beta, J=args.J, h=args.h)
    raise ConfigError(f"unknown model {args.model!r}")


def _cmd_sim(args) -> int:
    g = gg.load_graph(args.graph)
    model = _build_model(args)
    observables = tuple(args.record.split(",")) if args.record else (
        ("magnetisation",) if args.model == "sim" else
        ("infected_fraction",) if args.model == "cp" else ("ones_fraction",)
    )
    os.makedirs(args.out, exist_ok=True)
    traj_rows = []
    abs_rows = []
    seeds = []
    for k in range(args.reps):
        sk = derive_seed(_U(args.seed), _U(k))
        dseed = int(derive_seed(sk, _U(0)))
        iseed = int(derive_seed(sk, _U(1)))
        seeds.append(dseed)
        init = make_init(args.init, g.n, model, iseed)
        if args.nu > 0:
            run = dyn.simulate_with_rewiring(
                g, model, dyn.RewiringSchedule(args.nu), init, args.tmax,
                dseed, args.sample_dt, observables)
            rec = run.record
        else:
            rec = dyn.simulate(g, model, init, args.tmax, dseed,
                               args.sample_dt, observables, replica=k)
        for name, vals in rec.values.items():
            for t, v in zip(rec.times, vals):
                traj_rows.append((k, t, name, v))
        abs_rows.append((k, rec.absorbed,
                         rec.absorption_time if rec.absorbed else args.tmax,
                         "absorbed" if rec.absorbed else "cap"))
    _write_csv(os.path.join(args.out, "trajectory.csv"),
               ["replica", "t", "observable", "value"], traj_rows)
    _write_csv(os.path.join(args.out, "absorption.csv"),
               ["replica", "absorbed", "tau", "final_state"], abs_rows)
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump({"master_seed": args.seed, "derived_seeds": seeds,
                   "replicas": args.reps}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {args.out} ({args.reps} replicas)")
    return 0


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            out = []
            for x in row:
                if isinstance(x, (bool, np.bool_)):
                    out.append("1" if x else "0")
                elif isinstance(x, (int, np.integer)):
                    out.append(str(int(x)))
                elif isinstance(x, str):
                    out.append(x)
                else:
                    out.append("%.17g" % float(x))
            fh.write(",".join(out) + "\n")


def _cmd_dual(args) -> int:
    g = gg.load_graph(args.graph)
    os.makedirs(args.out, exist_ok=True)
    if args.mode == "all":
        rows = []
        for k in range(args.reps):
            sk = int(derive_seed(_U(args.seed), _U(k)))
            ws = du.coalescing_walks(g, np.arange(g.n), args.time_cap, sk)
            for t, s, a in ws.events:
                rows.append((k, t, s, a))
        _write_csv(os.path.join(args.out, "coalescence.csv"),
                   ["replica", "time", "survivor", "absorbed"], rows)
    else:
        rows = []
        for k in range(args.reps):
            sk = int(derive_seed(_U(args.seed), _U(k)))
            if args.mode == "stationary-pair":
                res = du.meeting_time(g, stationary_pair=True, seed=sk,
                                      time_cap=args.time_cap)
            else:
                res = du.meeting_time(g, args.x, args.y, seed=sk,
                                      time_cap=args.time_cap)
            rows.append((k, res.tau, res.capped))
        _write_csv(os.path.join(args.out, "meeting.csv"),
                   ["replica", "tau", "capped"], rows)
    print(f"wrote {args.out}")
    return 0


def _json_ready(x):
    if isinstance(x, Fraction):
        return {"numerator": x.numerator, "denominator": x.denominator,
                "value": float(x)}
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_json_ready(v) for v in x]
    if isinstance(x, dict):
        return {k: _json_ready(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_ready(v) for v in x]
    return x


def _cmd_predict(args) -> int:
    params = json.loads(args.params) if args.params else {}
    q = args.quantity
    bands = None
    tolerances = None
    if q == "chi":
        value = an.chi(params["beta"])
    elif q == "metastable-triple":
        tri = an.kramers(params["beta"], params["h"])
        value = {"m_minus": tri.m_minus, "m_star": tri.m_star,
                 "m_plus": tri.m_plus, "gamma": tri.gamma,
                 "prefactor": tri.prefactor}
        tolerances = {"stationarity": 1e-12}
    elif q == "free-energy":
        value = an.free_energy(params["m"], params["beta"], params["h"])
    elif q == "entropy":
        value = an.entropy_I(params["m"])
    elif q == "entropy-n":
        value = an.entropy_IN(params["m"], params["N"])
    elif q == "i-delta":
        value = an.i_delta(params["x"], params["delta"])
        tolerances = {"bisection": 1e-10}
    elif q == "gamma-bounds":
        gb = an.gamma_bounds(params["degrees"], params["J"], params["h"])
        value = {"M_bar": gb.M_bar, "M_tilde": gb.M_tilde,
                 "gamma_plus": gb.gamma_plus, "gamma_minus": gb.gamma_minus}
        bands = {"gamma_plus": gb.band_plus, "gamma_minus": gb.band_minus}
    elif q == "theta-d":
        value = an.theta_d(params["d"])
    elif q == "profile-f-d":
        value = an.profile_f_d(params["d"], params["t"],
                               params.get("tail_tol", 1e-10))
        tolerances = {"tail": params.get("tail_tol", 1e-10)}
    elif q == "theta-d-nu":
        value = an.theta_d_nu(params["d"], params["nu"],
                              params.get("tol", 1e-12))
        tolerances = {"continued_fraction": params.get("tol", 1e-12)}
    elif q == "theta-directed-eulerian":
        value = an.theta_directed_eulerian(params["m1"], params["m2"])
    elif q == "kingman-ratio":
        value = du.kingman_ratio(params["n"])
    elif q == "extinction-asymptotic":
        value = an.extinction_asymptotic(params["N"], params["lam"])
    elif q == "extinction-log-mean-field":
        value = an.extinction_log_mean_field(params["N"], params["lam"])
    elif q == "rho-exponent":
        r = an.rho_exponent(params["tau"])
        value = {"power": r.power, "log_power": r.log_power}
    elif q == "annealed-meet4":
        value = du.annealed_meet4_formula(
            {int(k): v for k, v in params["pmf"].items()})
    else:
        raise ConfigError(f"unknown quantity {q!r}")
    doc = {"quantity": q, "inputs": params, "value": _json_ready(value)}
    if bands is not None:
        doc["bands"] = _json_ready(bands)
    if tolerances is not None:
        doc["tolerances"] = tolerances
    print(json.dumps(doc))
    return 0


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig(experiment=args.id, master_seed=args.seed,
                           replicas=args.reps, out_dir=args.out)
    verdict = run_experiment(cfg)
    print(json.dumps(_json_ready(verdict), indent=2, sort_keys=True))
    return 0 if verdict["pass"] else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ipslab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("sim", help="simulate an ensemble")
    p.add_argument("--graph", required=True)
    p.add_argument("--model", required=True, choices=["sim", "vm", "cp"])
    p.add_argument("--beta", type=float)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--init", required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--sample-dt", type=float, required=True)
    p.add_argument("--record", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_sim)

    p = sub.add_parser("dual", help="coalescing-walk runs")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", required=True,
                   choices=["pair", "all", "stationary-pair"])
    p.add_argument("--x", type=int, default=0)
    p.add_argument("--y", type=int, default=1)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--time-cap", type=float, default=1e9)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_dual)

    p = sub.add_parser("predict", help="closed-form quantities")
    p.add_argument("--quantity", required=True)
    p.add_argument("--params", default="{}")
    p.set_defaults(fn=_cmd_predict)

    p = sub.add_parser("experiment", help="registered checks")
    p.add_argument("--id", required=True, choices=sorted(EXPERIMENTS))
    p.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_experiment)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except IpslabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
