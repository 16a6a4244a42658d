import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from isacdmt.cli import SCHEMA_VERSION, main
from isacdmt.dmt import unconstrained_dmt


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def read_json(path):
    return json.loads(path.read_text())


def test_dmt_example(tmp_path):
    assert run(tmp_path, "dmt", "--m", "3", "--nc", "3", "--rank", "3", "--t", "10") == 0
    rows = read_csv(tmp_path / "dmt.csv")
    assert list(rows[0]) == ["r", "d", "curve_label"]
    cons = [(float(r["r"]), float(r["d"])) for r in rows if r["curve_label"].startswith("constrained")]
    ref = [(0, 9), (0.95, 4), (1.8, 1), (2.55, 0)]
    assert np.allclose(cons, ref, atol=1e-12)
    doc = read_json(tmp_path / "dmt.json")
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["command"] == "dmt"
    assert doc["config"]["m"] == 3 and doc["config"]["t"] == 10.0


def test_dmt_fig2(tmp_path):
    assert run(tmp_path, "dmt", "--fig2", "--t", "20") == 0
    labels = {r["curve_label"] for r in read_csv(tmp_path / "dmt.csv")}
    bounds = sorted(l for l in labels if l.startswith("rank_bound"))
    assert len(bounds) == 5
    assert {l.split("_")[2] for l in bounds} == {"Nt2", "Nt4", "Nt6", "Nt8", "Nt10"}


def test_dmt_fig2_needs_t(tmp_path, capsys):
    assert run(tmp_path, "dmt", "--fig2") == 2
    assert "t" in capsys.readouterr().err


def test_dmt_infinite_blocklength(tmp_path):
    assert run(tmp_path, "dmt", "--m", "2", "--nc", "2", "--t", "inf", "--rank", "2") == 0
    doc = read_json(tmp_path / "dmt.json")
    cons = doc["curves"]["constrained_rank2_Nc2_Tinf"]
    assert [tuple(p) for p in cons] == [tuple(p) for p in unconstrained_dmt(2, 2).breakpoints]
    assert doc["config"]["t"] == "inf"


def test_dmt_regime_error(tmp_path, capsys):
    assert run(tmp_path, "dmt", "--m", "3", "--nc", "2", "--rank", "3", "--t", "10") == 2
    assert "error" in capsys.readouterr().err


def outage_args(seed="7", workers="1"):
    return ["outage", "--m", "1", "--nc", "1", "--t", "2", "--r", "0.25",
            "--snr", "30dB,40dB,50dB,60dB", "--n-samples", "2e5",
            "--seed", seed, "--workers", workers]


def test_outage_outputs(tmp_path):
    assert run(tmp_path, *outage_args()) == 0
    rows = read_csv(tmp_path / "outage.csv")
    assert list(rows[0]) == ["snr_linear", "snr_db", "p_hat", "ci_half_width", "hits", "n", "admitted"]
    assert [float(r["snr_db"]) for r in rows] == [30.0, 40.0, 50.0, 60.0]
    doc = read_json(tmp_path / "outage.json")
    assert doc["theory_d"] == pytest.approx(2 / 3)
    assert doc["relative_error"] < 0.15
    assert doc["error"] is None


def test_outage_byte_identical(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main([*outage_args(), "--out", str(a)]) == 0
    assert main([*outage_args(), "--out", str(b)]) == 0
    assert main([*outage_args(workers="2"), "--out", str(c)]) == 0
    for name in ("outage.csv", "outage.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    # the estimate itself does not depend on the worker count
    assert (a / "outage.csv").read_bytes() == (c / "outage.csv").read_bytes()


def test_outage_zero_rate_exit_3(tmp_path, capsys):
    argv = ["outage", "--m", "1", "--nc", "1", "--t", "2", "--r", "0",
            "--snr", "30dB,40dB", "--n-samples", "10000"]
    assert run(tmp_path, *argv) == 3
    assert "n_samples" in capsys.readouterr().err
    rows = read_csv(tmp_path / "outage.csv")
    assert all(float(r["p_hat"]) == 0.0 for r in rows)
    doc = read_json(tmp_path / "outage.json")
    assert doc["fitted_slope"] is None


def test_geometry_unit_circle(tmp_path):
    assert run(tmp_path, "geometry", "--sigma", "1", "--n", "1") == 0
    rep = read_json(tmp_path / "geometry.json")["report"]
    assert rep["log_volume_nats"] == pytest.approx(math.log(2 * math.pi), abs=1e-12)
    assert rep["log2_volume_bits"] == pytest.approx(math.log2(2 * math.pi), abs=1e-12)


def test_geometry_sweep(tmp_path):
    argv = ["geometry", "--t", "10", "--m", "3", "--alpha", "0.1,0.2,0.3", "--snr", "40dB",
            "--delta", "0.5", "--sweep", "1e4,1e5,1e6,1e7,1e8"]
    assert run(tmp_path, *argv) == 0
    rows = read_csv(tmp_path / "geometry.csv")
    shape = [float(r["error_shape"]) for r in rows]
    assert np.all(np.diff(shape) < 0)
    for r in rows:
        eta = float(r["snr_linear"])
        assert float(r["sigma_min"]) == pytest.approx(math.sqrt(10 / 3) * eta ** (0.5 - 0.3), rel=1e-12)
    rep = read_json(tmp_path / "geometry.json")["report"]
    assert rep["sigma_min"] == pytest.approx(math.sqrt(10 / 3) * 1e4 ** 0.2, rel=1e-12)
    assert "mi_approx_bits" in rep


def test_geometry_config_errors(tmp_path):
    assert run(tmp_path, "geometry", "--sigma", "1,2") == 2
    assert run(tmp_path, "geometry", "--t", "4") == 2
    assert run(tmp_path, "geometry", "--t", "4", "--m", "2", "--alpha", "0.6", "--snr", "100") == 2


def test_bcrb(tmp_path):
    assert run(tmp_path, "bcrb", "--m", "3", "--t", "10", "--eta-s", "0,10") == 0
    rows = read_csv(tmp_path / "bcrb.csv")
    assert float(rows[0]["bcrb"]) == 9.0
    assert float(rows[1]["bcrb"]) == pytest.approx(9 / (1 + 100 / 3))
    assert read_json(tmp_path / "bcrb.json")["config"]["ns"] == 3


@pytest.mark.parametrize("argv,stem", [
    (["--kind", "haar", "--k", "2", "--n", "3"], "sample_haar"),
    (["--kind", "stiefel", "--sigma", "2,1", "--n", "3"], "sample_stiefel"),
    (["--kind", "wishart", "--m", "2", "--nc", "3", "--snr", "20dB"], "sample_wishart"),
])
def test_sample(tmp_path, argv, stem):
    assert run(tmp_path, "sample", *argv, "--count", "4", "--seed", "3") == 0
    doc = read_json(tmp_path / f"{stem}.json")
    assert len(doc["draws"]) == 4
    first = (tmp_path / f"{stem}.json").read_bytes()
    assert run(tmp_path, "sample", *argv, "--count", "4", "--seed", "3") == 0
    assert (tmp_path / f"{stem}.json").read_bytes() == first


def test_sample_missing_args(tmp_path):
    assert run(tmp_path, "sample", "--kind", "haar", "--k", "2") == 2


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("ISACDMT_SEED", "123")
    assert run(tmp_path, "sample", "--kind", "haar", "--k", "1", "--n", "2", "--count", "1") == 0
    assert read_json(tmp_path / "sample_haar.json")["config"]["seed"] == 123


def test_scenario_file(tmp_path):
    sc = tmp_path / "scen.txt"
    sc.write_text("# rank-1 campaign\nm = 1\nnc = 1\nt = 2\nr = 0.25\n"
                  "snr = 30dB, 40dB, 50dB\nn_samples = 1e5\nseed = 7\n")
    out = tmp_path / "out"
    assert main(["outage", "--scenario", str(sc), "--out", str(out)]) == 0
    cfg = read_json(out / "outage.json")["config"]
    assert cfg["seed"] == 7 and cfg["n_samples"] == 100000
    # flags override the file
    assert main(["outage", "--scenario", str(sc), "--seed", "8", "--out", str(out)]) == 0
    assert read_json(out / "outage.json")["config"]["seed"] == 8


def test_scenario_matrix_literal(tmp_path):
    sc = tmp_path / "scen.txt"
    sc.write_text("m = 2\nnc = 2\nt = 4\nR = [[1.5, 0.5j], [-0.5j, 0.5]]\neta_s = 10\n")
    assert main(["bcrb", "--scenario", str(sc), "--out", str(tmp_path)]) == 0
    lam = read_json(tmp_path / "bcrb.json")["covariance_eigenvalues"]
    assert sum(lam) == pytest.approx(2.0)


@pytest.mark.parametrize("body,line,needle", [
    ("m = 2\nfoo = 3\n", 2, "unknown key"),
    ("m = 2\nnc = 2\nt = x\n", 3, "blocklength"),
    ("m = 2\njunk\n", 2, "key = value"),
    ("snr = 30dBx\n", 1, "SNR"),
    ("R = diag:[1, 2\n", 1, "covariance"),
])
def test_scenario_errors_line_precise(tmp_path, capsys, body, line, needle):
    sc = tmp_path / "bad.txt"
    sc.write_text(body)
    assert main(["dmt", "--scenario", str(sc), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert f"bad.txt:{line}:" in err and needle in err


def test_missing_scenario_file(tmp_path):
    assert main(["dmt", "--scenario", str(tmp_path / "nope.txt")]) == 2


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "isacdmt.cli", "dmt", "--m", "2", "--nc", "2",
                          "--t", "4", "--out", str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0
    assert (tmp_path / "dmt.csv").exists()
