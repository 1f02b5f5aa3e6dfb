import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from gammaflow import zoo
from gammaflow.cli import (
    ConfigError,
    dumps,
    execute,
    format_float,
    list_families,
    load_config,
    main,
    parse_config,
    read_trajectories_csv,
)
from gammaflow.prox import check_relaxed_inequality, moreau_yosida

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = sorted((ROOT / "configs").glob("*.cfg"))


def raw(name):
    return json.loads((ROOT / "configs" / name).read_text())


def write(tmp_path, cfg, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.stem)
def test_bundled_configs_validate(path, capsys):
    assert main(["validate", str(path)]) == 0
    assert capsys.readouterr().out.startswith("valid ")


def test_list_families(capsys):
    text = list_families()
    for name in ("oscillatory", "perturbation", "grid_restricted", "lsc_envelope", "quadratic"):
        assert name in text
    assert main(["list-families", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert {f["name"] for f in data["families"]} == set(zoo.REGISTRY)


def test_unknown_flag_exits_2():
    proc = subprocess.run([sys.executable, "-m", "gammaflow", "list-families", "--bogus"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr


def test_increasing_tau_list_is_config_error(tmp_path):
    cfg = raw("quadratic.cfg")
    cfg["tau_list"] = [1e-3, 1e-2]
    with pytest.raises(ConfigError):
        parse_config(cfg)
    assert main(["validate", write(tmp_path, cfg)]) == 2


@pytest.mark.parametrize("patch", [
    {"probe_times": [2.0]},
    {"family": {"name": "nope"}},
    {"coupling": {"kind": "weird"}},
    {"solver": {"grid": 3}},
    {"probes": ["scheme", "magic"]},
    {"unexpected": 1},
    {"expectations": [{"kind": "vibes"}]},
])
def test_malformed_configs(patch, tmp_path):
    cfg = raw("quadratic.cfg")
    cfg.update(patch)
    assert main(["run", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 2


def test_unreadable_config(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("{not json")
    assert main(["validate", str(p)]) == 2


def test_quadratic_run(tmp_path, capsys):
    out = tmp_path / "q"
    assert main(["run", str(ROOT / "configs" / "quadratic.cfg"), "--out", str(out), "--jobs", "1"]) == 0
    line = capsys.readouterr().out.strip().splitlines()
    assert len(line) == 1 and line[0].startswith("status=ok")
    summary = json.loads((out / "summary.json").read_text())
    run = next(r for r in summary["runs"] if r["tau"] == 1e-3)
    assert run["final_error"] < 5e-3
    assert all(r["max_observed_d2"] <= r["gronwall_bound"] for r in summary["runs"])
    probes = json.loads((out / "probes.json").read_text())
    assert probes["edi"]["verdict"] == "consistent"


def test_json_summary_line(tmp_path, capsys):
    assert main(["run", str(ROOT / "configs" / "lsc_envelope.cfg"), "--out", str(tmp_path), "--json"]) == 0
    line = json.loads(capsys.readouterr().out)
    assert line["status"] == "ok" and line["runs"] == 2


def test_pinning_config(tmp_path):
    assert main(["run", str(ROOT / "configs" / "pinning.cfg"), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    pin = next(r for r in summary["expectations"] if r["expectation"]["kind"] == "pinning")
    assert pin["passed"] and pin["distance_to_flow"] >= 0.1


def test_output_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["run", str(ROOT / "configs" / "lsc_envelope.cfg"), "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "env" / "summary.json").exists()
    assert not (tmp_path / "flag").exists()


def test_expectation_failure_exits_4(tmp_path):
    cfg = raw("quadratic.cfg")
    cfg["tau_list"] = [0.1, 0.05]
    cfg["expectations"] = [{"kind": "final_value_near", "tau": 0.05, "value": "exact_flow", "tol": 1e-9}]
    assert main(["run", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 4
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["status"] == "expectation_failed"


def test_solver_failure_exits_3(tmp_path):
    cfg = raw("oscillatory_flow.cfg")
    cfg["tau_list"] = [0.01]
    cfg["solver"] = {"max_grid_points": 16}
    cfg["expectations"] = []
    assert main(["run", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 3


def _run_bytes(cfg_path, out, jobs):
    assert main(["run", cfg_path, "--out", str(out), "--jobs", str(jobs)]) == 0
    return {n: (out / n).read_bytes() for n in ("trajectories.csv", "probes.json", "summary.json")}


def test_reports_bit_identical_across_runs_and_jobs(tmp_path):
    cfg = raw("oscillatory_flow.cfg")
    cfg["tau_list"] = [0.02, 0.01]
    cfg["expectations"] = []
    path = write(tmp_path, cfg)
    a = _run_bytes(path, tmp_path / "a", 1)
    b = _run_bytes(path, tmp_path / "b", 1)
    c = _run_bytes(path, tmp_path / "c", 2)
    assert a == b == c


def test_csv_round_trip_recertifies_every_step(tmp_path):
    cfg = raw("oscillatory_flow.cfg")
    cfg["tau_list"] = [0.02, 0.01]
    cfg["expectations"] = []
    out = tmp_path / "o"
    assert main(["run", write(tmp_path, cfg), "--out", str(out)]) == 0
    conf = load_config(write(tmp_path, cfg))
    fam = conf.spec().family
    errors = conf.error_sched()
    data = read_trajectories_csv(str(out / "trajectories.csv"))
    assert sorted(data) == [0.01, 0.02]
    for tau, (eps, pts, energies) in data.items():
        f = fam.member(eps)
        np.testing.assert_array_equal(energies, f.values(pts[:, 0]))
        for n in range(1, len(pts)):
            res = moreau_yosida(f, fam.certificate, tau, pts[n - 1])
            verdict = check_relaxed_inequality(f, tau, pts[n - 1], pts[n], errors.budget(tau, n), res)
            assert verdict.holds, (tau, n, str(verdict))


def test_float_serialization_17_digits():
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(math.pi)) == math.pi
    assert json.loads(dumps({"x": [0.1, float("inf")], "y": None})) == {"x": [0.1, "inf"], "y": None}


def test_execute_returns_summary(tmp_path):
    conf = load_config(str(ROOT / "configs" / "counterexample.cfg"))
    summary = execute(conf, str(tmp_path), jobs=1)
    assert summary["status"] == "ok"
    lim = next(r for r in summary["expectations"] if r["expectation"]["kind"] == "limit_near")
    assert abs(lim["value"] - math.exp(-1)) <= 1e-2


def test_console_module_entry(tmp_path):
    env = dict(os.environ, OUTPUT_DIR=str(tmp_path))
    proc = subprocess.run([sys.executable, "-m", "gammaflow", "run", str(ROOT / "configs" / "lsc_envelope.cfg")],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert len(proc.stdout.strip().splitlines()) == 1
    assert "running lsc_envelope" in proc.stderr
