import json

import numpy as np
import pytest

from minipatch.cli import main
from minipatch.io import write_binary, write_text
from minipatch.synth import ScenarioConfig, generate_s1


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    data, truth = generate_s1(ScenarioConfig(N=200, M=60, support_size=3, rho=0.5, snr=5, seed=1))
    write_binary(d / "s.bin", data)
    write_text(d / "s.csv", data, response_name="y")
    return d, truth


def invoke(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def strip_time(report):
    report = json.loads(report)
    report.pop("wall_time")
    return report


SMALL = ("--n", 60, "--m", 10, "--epochs", 2, "--max-iters", 150)


def test_select_binary(capsys, files):
    d, truth = files
    code, out, _ = invoke(capsys, "select", "--data", d / "s.bin", "--binary", *SMALL)
    assert code == 0
    rep = json.loads(out)
    assert set(truth.support.tolist()) <= set(rep["stable_set"])
    assert len(rep["frequencies"]) == 60
    assert rep["threshold"] == {"value": 0.5, "mode": "fixed"}


def test_select_text_uses_feature_names(capsys, files):
    d, truth = files
    code, out, _ = invoke(capsys, "select", "--data", d / "s.csv", "--response", "y", *SMALL)
    assert code == 0
    rep = json.loads(out)
    assert rep["stable_names"] == [f"x{j}" for j in rep["stable_set"]]


def test_paper_default_flags(capsys, files):
    d, _ = files
    code, out, _ = invoke(capsys, "select", "--data", d / "s.bin", "--binary", "--sampler", "ee",
                          "--epochs", 10, "--pi-active", 0.1, "--pi-thr", 0.5, "--n", 60, "--m", 10,
                          "--max-iters", 100)
    assert code == 0
    cfg = json.loads(out)["config"]
    assert cfg["sampler"]["scheme"] == "ee"
    assert cfg["sampler"]["epochs"] == 10
    assert cfg["sampler"]["pi_active"] == 0.1
    assert cfg["pi_thr"] == 0.5
    assert cfg["patience"] == 100


def test_missing_data_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["select", "--binary"])
    assert exc.value.code == 2
    assert "--data" in capsys.readouterr().err


def test_identical_runs_identical_reports(capsys, files):
    d, _ = files
    argv = ("select", "--data", d / "s.bin", "--binary", *SMALL, "--seed", 9)
    _, a, _ = invoke(capsys, *argv)
    _, b, _ = invoke(capsys, *argv)
    assert strip_time(a) == strip_time(b)
    ta = [l for l in a.splitlines() if '"wall_time"' not in l]
    tb = [l for l in b.splitlines() if '"wall_time"' not in l]
    assert ta == tb


def test_out_file(capsys, files, tmp_path):
    d, _ = files
    out = tmp_path / "r.json"
    code, stdout, _ = invoke(capsys, "select", "--data", d / "s.bin", "--binary", *SMALL, "--out", out)
    assert code == 0 and stdout == ""
    assert "stable_set" in json.loads(out.read_text())


@pytest.mark.parametrize("flags,name", [
    (("--n", 500, "--m", 10), "--n"),
    (("--n", 60, "--m", 61), "--m"),
    (("--n", 11, "--m", 10), "--n"),
    (("--n", 60, "--m", 10, "--threshold", "oracle:x"), "--threshold"),
    (("--n", 60, "--m", 10, "--selector", "lasso"), "--selector"),
    (("--n", 60, "--m", 10, "--pi-thr", 1.5), "--pi-thr"),
])
def test_config_errors_exit_2(capsys, files, flags, name):
    d, _ = files
    code, out, err = invoke(capsys, "select", "--data", d / "s.bin", "--binary", *flags)
    assert code == 2 and out == ""
    assert name in err


def test_data_errors_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("y,a\n1,inf\n2,3\n")
    code, _, err = invoke(capsys, "select", "--data", bad)
    assert code == 1 and "non-finite" in err
    code, _, _ = invoke(capsys, "select", "--data", tmp_path / "missing.bin", "--binary")
    assert code == 1


def test_verbose_goes_to_stderr(capsys, files):
    d, _ = files
    code, out, err = invoke(capsys, "select", "--data", d / "s.bin", "--binary", "--n", 60, "--m", 10,
                            "--epochs", 1, "--max-iters", 8, "--verbose")
    assert code == 0
    json.loads(out)


def test_threads_flag(capsys, files):
    d, _ = files
    base = ("select", "--data", d / "s.bin", "--binary", "--sampler", "uniform", "--n", 60, "--m", 10,
            "--max-iters", 300)
    _, a, _ = invoke(capsys, *base, "--threads", 1)
    _, b, _ = invoke(capsys, *base, "--threads", 8)
    ra, rb = strip_time(a), strip_time(b)
    for key in ("stable_set", "frequencies", "iterations_run"):
        assert ra[key] == rb[key]


def test_simulate_reps(capsys):
    code, out, _ = invoke(capsys, "simulate", "--N", 200, "--M", 60, "--support", 3, "--reps", 5,
                          "--n", 60, "--m", 10, "--epochs", 2, "--max-iters", 120)
    assert code == 0
    rep = json.loads(out)
    assert len(rep["replicates"]) == 5
    dd = [r["f1_data_driven"] for r in rep["replicates"]]
    assert rep["f1_data_driven"]["mean"] == pytest.approx(np.mean(dd))
    assert rep["f1_data_driven"]["stdev"] == pytest.approx(np.std(dd, ddof=1))
    assert all("f1_oracle" in r and "ground_truth" in r for r in rep["replicates"])


def test_simulate_sweep_rows(capsys):
    code, out, _ = invoke(capsys, "simulate", "--N", 300, "--M", 60, "--support", 2, "--reps", 1,
                          "--sweep-m", "3,5,8,10", "--sweep-n", "2,5", "--epochs", 1,
                          "--max-iters", 40)
    assert code == 0
    rows = json.loads(out)["sweep"]
    assert [(r["m"], r["n"]) for r in rows] == [(6, 12), (6, 30), (10, 20), (10, 50), (16, 32),
                                                (16, 80), (20, 40), (20, 100)]
    assert all(0 <= r["f1_oracle"]["mean"] <= 1 for r in rows)


def test_fwer_report(capsys):
    code, out, _ = invoke(capsys, "fwer", "--M", 20, "--N", 100, "--n", 50, "--m", 5,
                          "--alpha", 0.05, "--reps", 200)
    assert code == 0
    rep = json.loads(out)
    assert rep["alpha_bound"] == 0.05
    assert rep["binomial_margin"] == pytest.approx(0.031, abs=5e-4)
    assert 0 <= rep["empirical_fwer"] <= 1
    assert rep["warnings"] == []


def test_fwer_few_reps_warns(capsys):
    code, out, _ = invoke(capsys, "fwer", "--M", 10, "--N", 60, "--n", 30, "--m", 4, "--reps", 10)
    assert code == 0
    assert any("unreliable" in w for w in json.loads(out)["warnings"])


def test_fwer_alpha_one(capsys):
    code, out, _ = invoke(capsys, "fwer", "--M", 10, "--N", 60, "--n", 30, "--m", 4, "--reps", 3,
                          "--alpha", 1.0)
    rep = json.loads(out)
    assert code == 0 and rep["alpha_bound"] == 1.0 and rep["empirical_fwer"] <= 1.0


def test_fwer_bad_flag(capsys):
    code, _, err = invoke(capsys, "fwer", "--reps", 0)
    assert code == 2 and "--reps" in err
