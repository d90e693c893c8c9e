import json
import math
from pathlib import Path

import numpy as np
import pytest

from advdomain.cli import main


@pytest.fixture
def unit_csv(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("x1,x2\n1,0\n0,1\n")
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == 0 and out.lstrip().startswith("{") else out), err


def test_complexity_unit_dataset(capsys, unit_csv):
    code, rep, _ = run(capsys, "complexity", "--data", unit_csv, "--class", "linear-regression", "--no-timestamp")
    assert code == 0
    assert rep["estimates"]["std"]["value"] == 1.5
    assert rep["estimates"]["adv"]["value"] == pytest.approx(1.5)
    assert "timestamp" not in rep and all(rep["checks"].values())


def test_complexity_classification_and_relu(capsys, unit_csv):
    code, rep, _ = run(capsys, "complexity", "--data", unit_csv, "--eps", "0.1", "--no-timestamp")
    assert code == 0 and all(rep["checks"].values())
    code, rep, _ = run(capsys, "complexity", "--data", unit_csv, "--class", "two-layer-relu", "--m", "2")
    assert code == 0 and "timestamp" in rep


def test_missing_label_column(capsys, unit_csv):
    code, _, err = run(capsys, "train", "--data", unit_csv, "--epochs", "2")
    assert code == 2 and "'label'" in err


def test_bound_rejects_confidence(capsys):
    code, _, err = run(capsys, "bound", "--n-source", "9", "--n-target", "9", "--confidence", "1.5")
    assert code == 2 and "confidence" in err


def test_bound_corollary_zero(capsys):
    code, rep, _ = run(capsys, "bound", "--kind", "corollary", "--n-source", "9", "--n-target", "9")
    assert rep["bound"]["total"] == pytest.approx(11.523873495839048, rel=1e-14)


def test_bound_from_data(capsys, tmp_path):
    s, t = tmp_path / "s.csv", tmp_path / "t.csv"
    s.write_text("x1,x2\n1,0\n")
    t.write_text("x1,x2\n0,1\n")
    code, rep, _ = run(capsys, "bound", "--source", s, "--target", t, "--kind", "adversarial", "--eps", "0.1")
    assert code == 0
    assert rep["computed"]["discrepancy_std"] == pytest.approx(4.0)
    assert rep["bound"]["discrepancy"] > 4.0


def test_config_precedence(capsys, tmp_path, unit_csv):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"W": 2, "class": "linear-regression"}')
    code, rep, _ = run(capsys, "complexity", "--data", unit_csv, "--config", cfg)
    assert rep["estimates"]["std"]["value"] == pytest.approx(6.0)
    code, rep, _ = run(capsys, "complexity", "--data", unit_csv, "--config", cfg, "--W", "1")
    assert rep["estimates"]["std"]["value"] == pytest.approx(1.5)


def test_config_unknown_key(capsys, tmp_path, unit_csv):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"bogus": 1}')
    code, _, err = run(capsys, "complexity", "--data", unit_csv, "--config", cfg)
    assert code == 2 and "bogus" in err


def test_subset_sum_command(capsys, tmp_path):
    inst = tmp_path / "i.json"
    inst.write_text('{"p": [0.5, 0.3, 0.2], "p_prime": [0.2, 0.3, 0.5], "ell": [1, 0, 0], "free": [2, 3]}')
    code, rep, _ = run(capsys, "subset-sum", "--instance", inst)
    assert code == 0 and rep["agree"]
    assert rep["results"]["mitm"] == {"optimum": 0.3, "witness": [1, 0, 0]}


def test_transfer_check_command(capsys, tmp_path):
    pair = tmp_path / "p.json"
    pair.write_text(json.dumps({"support": [[1.0, 0.0], [-1.0, 0.5], [0.2, 0.1]], "mass_T": [0.5, 0.25, 0.25],
                                "mass_Tprime": [0.2, 0.3, 0.5], "labels": [1, -1, -1], "w": [1.0, 0.0]}))
    code, rep, _ = run(capsys, "transfer-check", "--pair", pair, "--eps", "0.1")
    assert code == 0 and rep["comparison"]["robust"]["holds"]


def test_train_command(capsys, tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("x1,x2,label\n2,0,1\n1.5,0.5,1\n-2,0,-1\n-1,-1,-1\n")
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "train", "--data", data, "--epochs", "30", "--out", out, "--seed", "3")
    rep = json.loads(out.read_text(encoding="utf-8"))
    assert code == 0 and rep["train"]["sa"] == 1.0 and rep["seed"] == 3


def test_sweep_empty_grid(capsys):
    code, _, err = run(capsys, "sweep", "--mu-grid", "")
    assert code == 2


def test_sweep_small(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--n", "80", "--d", "2", "--epochs", "5", "--mu-grid", "0",
                     "--eps-grid", "0,0.01", "--out", out)
    assert code == 0 and len(out.read_text().splitlines()) == 3


def test_verify_only_subset_sum(capsys):
    code, rep, err = run(capsys, "verify", "--only", "subset-sum", "--no-timestamp")
    assert code == 0 and [b["name"] for b in rep["batteries"]] == ["subset-sum"]
    assert "PASS subset-sum" in err


def test_verify_same_seed_same_report(capsys):
    _, a, _ = run(capsys, "verify", "--only", "transfer", "--seed", "11", "--no-timestamp")
    _, b, _ = run(capsys, "verify", "--only", "transfer", "--seed", "11", "--no-timestamp")
    for r in (a, b):
        r["batteries"][0].pop("elapsed")
    assert a == b


def test_verify_unknown_battery(capsys):
    code, _, _ = run(capsys, "verify", "--only", "nope")
    assert code == 2


def test_missing_output_directory(capsys, unit_csv, tmp_path):
    code, _, _ = run(capsys, "complexity", "--data", unit_csv, "--out", tmp_path / "no" / "r.json")
    assert code == 2


def test_verify_violation_exit_and_replay(capsys, tmp_path):
    golden = tmp_path / "g.csv"
    golden.write_text("mu,eps\n")
    code, out, err = run(capsys, "verify", "--only", "sweep", "--golden", golden, "--no-timestamp")
    assert code == 1 and "FAIL sweep" in err
    rep = json.loads(out)
    assert rep["passed"] is False and rep["batteries"][0]["failures"][0]["check"] == "golden"


GOLDEN = Path(__file__).parent / "data" / "bound_pipeline"
PIPELINE_ARGS = ["bound", "--kind", "corollary", "--mode", "statement", "--eps", "0.05", "--source-risk", "0.1",
                 "--lambda", "0.05,0.02,0.03", "--M", "4", "--no-timestamp"]


def test_bound_pipeline_golden(capsys):
    code, rep, _ = run(capsys, *PIPELINE_ARGS, "--source", GOLDEN / "source.csv", "--target", GOLDEN / "target.csv")
    want = json.loads((GOLDEN / "report.json").read_text(encoding="utf-8"))
    assert code == 0
    for key, val in want["bound"].items():
        assert rep["bound"][key] == pytest.approx(val, rel=1e-12), key
    # independent pieces: covariance gap through LAPACK and the concentration term
    S = np.loadtxt(GOLDEN / "source.csv", delimiter=",", skiprows=1)[:, :-1]
    T = np.loadtxt(GOLDEN / "target.csv", delimiter=",", skiprows=1)[:, :-1]
    gap = S.T @ S / len(S) - T.T @ T / len(T)
    assert rep["computed"]["discrepancy_std"] == pytest.approx(4 * np.abs(np.linalg.eigvalsh(gap)).max(), rel=1e-12)
    assert rep["bound"]["concentration_source"] == pytest.approx(9 * 4 * math.sqrt(math.log(2 / 0.05) / 10))
