import json

import numpy as np
import pytest

from ipslab import cli
from ipslab import graphgen as gg
from ipslab import harness
from ipslab.errors import ConfigError
from ipslab.models import CP, SIM, VM


def test_make_init_variants(tmp_path):
    assert list(harness.make_init("all-one", 3, VM(), 0)) == [1, 1, 1]
    assert list(harness.make_init("all-zero", 3, CP(lam=1.0), 0)) == [0, 0, 0]
    assert list(harness.make_init("all-zero", 3, SIM(beta=1.0), 0)) == [-1, -1, -1]
    b = harness.make_init("bernoulli:0.5", 100, VM(), 7)
    assert set(np.unique(b)) <= {0, 1}
    assert harness.make_init("bernoulli:0.5", 100, VM(), 7).tolist() == b.tolist()
    path = tmp_path / "init.json"
    path.write_text("[0, 1, 1]")
    assert list(harness.make_init(f"explicit:{path}", 3, VM(), 0)) == [0, 1, 1]
    with pytest.raises(ConfigError):
        harness.make_init("bernoulli:1.5", 3, VM(), 0)
    with pytest.raises(ConfigError):
        harness.make_init("nope", 3, VM(), 0)


def test_config_validation():
    with pytest.raises(ConfigError):
        harness.ExperimentConfig(experiment="not-a-thing")
    with pytest.raises(ConfigError):
        harness.ExperimentConfig.from_dict({"experiment": "cw-kramers",
                                            "bogus_key": 1})
    with pytest.raises(ConfigError):
        harness.ExperimentConfig(experiment="cw-kramers", replicas=0)


def _read_all(d):
    return {p.name: p.read_bytes() for p in d.iterdir()}


def test_experiment_bundle_deterministic(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        cfg = harness.ExperimentConfig(experiment="cp-exponential-law",
                                       master_seed=11, replicas=40,
                                       out_dir=str(out))
        harness.run_experiment(cfg)
    assert _read_all(out1) == _read_all(out2)
    files = set(p.name for p in out1.iterdir())
    assert {"verdict.json", "manifest.json", "absorption.csv"} <= files


def test_replica_isolation(tmp_path):
    rows = {}
    for reps in (5, 6):
        out = tmp_path / f"r{reps}"
        cfg = harness.ExperimentConfig(experiment="cp-exponential-law",
                                       master_seed=3, replicas=reps,
                                       out_dir=str(out))
        harness.run_experiment(cfg)
        lines = (out / "absorption.csv").read_text().splitlines()
        rows[reps] = lines
    assert rows[6][:6] == rows[5][:6]


def test_verdict_fields_present(tmp_path):
    cfg = harness.ExperimentConfig(experiment="theta-rewiring",
                                   out_dir=str(tmp_path / "v"))
    verdict = harness.run_experiment(cfg)
    for key in ("paper_value", "predicted_value", "measured_value",
                "tolerance", "pass"):
        assert key in verdict
    doc = json.loads((tmp_path / "v" / "verdict.json").read_text())
    assert doc["pass"] is True


# --- CLI ------------------------------------------------------------------------


def test_cli_gen_and_sim_round_trip(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"family": "regular", "n": 20, "d": 3}))
    gpath = tmp_path / "g.json"
    assert cli.main(["gen", "--spec", str(spec), "--seed", "5",
                     "--out", str(gpath)]) == 0
    g = gg.load_graph(str(gpath))
    assert g.n == 20 and np.all(g.degrees() == 3)

    out = tmp_path / "simout"
    rc = cli.main(["sim", "--graph", str(gpath), "--model", "vm",
                   "--init", "bernoulli:0.4", "--tmax", "3", "--reps", "4",
                   "--seed", "9", "--sample-dt", "1",
                   "--record", "ones_fraction,discordant_fraction",
                   "--out", str(out)])
    assert rc == 0
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header == "replica,t,observable,value"
    assert (out / "absorption.csv").exists()
    assert (out / "manifest.json").exists()


def test_cli_sim_rewiring(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"family": "regular", "n": 30, "d": 3}))
    gpath = tmp_path / "g.json"
    cli.main(["gen", "--spec", str(spec), "--seed", "1", "--out", str(gpath)])
    out = tmp_path / "rw"
    rc = cli.main(["sim", "--graph", str(gpath), "--model", "cp",
                   "--lambda", "0.5", "--nu", "1.0", "--init", "all-one",
                   "--tmax", "2", "--reps", "2", "--seed", "3",
                   "--sample-dt", "0.5", "--out", str(out)])
    assert rc == 0


def test_cli_dual_modes(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"family": "complete", "n": 6}))
    gpath = tmp_path / "g.json"
    cli.main(["gen", "--spec", str(spec), "--seed", "1", "--out", str(gpath)])
    out = tmp_path / "pair"
    rc = cli.main(["dual", "--graph", str(gpath), "--mode", "pair", "--x", "0",
                   "--y", "3", "--reps", "5", "--seed", "2", "--out", str(out)])
    assert rc == 0
    assert (out / "meeting.csv").read_text().splitlines()[0] == "replica,tau,capped"
    out2 = tmp_path / "all"
    rc = cli.main(["dual", "--graph", str(gpath), "--mode", "all", "--reps", "3",
                   "--seed", "2", "--out", str(out2)])
    assert rc == 0
    assert (out2 / "coalescence.csv").read_text().splitlines()[0] == (
        "replica,time,survivor,absorbed")


def test_cli_predict_deterministic_output(capsys):
    assert cli.main(["predict", "--quantity", "theta-d-nu",
                     "--params", '{"d": 3, "nu": 0.0}']) == 0
    line1 = capsys.readouterr().out.strip()
    cli.main(["predict", "--quantity", "theta-d-nu",
              "--params", '{"d": 3, "nu": 0.0}'])
    line2 = capsys.readouterr().out.strip()
    assert line1 == line2
    doc = json.loads(line1)
    assert list(doc) == ["quantity", "inputs", "value", "tolerances"]
    assert abs(doc["value"] - 0.5) < 1e-10


def test_cli_predict_gamma_bounds_has_bands(capsys):
    cli.main(["predict", "--quantity", "gamma-bounds",
              "--params", '{"degrees": [3,3,3,3,3,3], "J": 1.0, "h": 0.5}'])
    doc = json.loads(capsys.readouterr().out)
    assert "bands" in doc and "gamma_plus" in doc["bands"]


def test_cli_experiment_exit_codes(tmp_path, monkeypatch, capsys):
    rc = cli.main(["experiment", "--id", "theta-rewiring",
                   "--out", str(tmp_path / "e")])
    assert rc == 0
    capsys.readouterr()

    def failing(master, reps):
        return harness.ExperimentResult({
            "claim": "always fails", "paper_value": None,
            "predicted_value": 0, "measured_value": 1, "tolerance": 0,
            "pass": False,
        })

    monkeypatch.setitem(harness.EXPERIMENTS, "theta-rewiring", (failing, 1))
    rc = cli.main(["experiment", "--id", "theta-rewiring"])
    capsys.readouterr()
    assert rc == 2


def test_cli_errors_exit_one(tmp_path, capsys):
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps({"family": "martian", "n": 4}))
    rc = cli.main(["gen", "--spec", str(spec), "--seed", "1",
                   "--out", str(tmp_path / "g.json")])
    assert rc == 1
