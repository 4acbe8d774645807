import json

import numpy as np
import pytest

import sparsekit as sk
from sparsekit.cli import main


def test_gen_matrix_and_signal(tmp_path):
    mpath = tmp_path / "F.txt"
    spath = tmp_path / "beta.txt"
    assert main(["gen-matrix", "--n", "8", "--p", "12", "--seed", "3", "--out", str(mpath)]) == 0
    F = sk.read_matrix_text(mpath)
    assert (F.n, F.p) == (8, 12) and F.unit_columns
    assert main([
        "gen-signal", "--p", "12", "--k", "2",
        "--amplitude", "uniform:1,2", "--seed", "5", "--out", str(spath),
    ]) == 0
    beta = sk.read_vector_text(spath)
    assert np.count_nonzero(beta) == 2


def test_solve_subcommand_identity(tmp_path):
    mpath = tmp_path / "F.txt"
    ypath = tmp_path / "y.txt"
    out = tmp_path / "solve.json"
    sk.write_matrix_text(sk.SensingMatrix.from_entries(np.eye(4)), mpath)
    sk.write_vector_text(np.array([1.0, -2.0, 0.0, 0.5]), ypath)
    code = main([
        "solve", "--program", "p", "--matrix", str(mpath), "--y", str(ypath),
        "--out", str(out),
    ])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["program"] == "P"
    assert doc["status"] == "optimal"
    assert np.allclose(doc["gamma_hat"], [1.0, -2.0, 0.0, 0.5], atol=1e-9)
    assert doc["l1_norm"] == pytest.approx(3.5, abs=1e-9)
    assert set(doc["residuals"]) == {"l2", "corr_inf"}


def test_constants_subcommand(tmp_path):
    mpath = tmp_path / "F.txt"
    out = tmp_path / "constants.json"
    sk.write_matrix_text(sk.generate_matrix(6, 8, seed=5), mpath)
    code = main([
        "constants", "--matrix", str(mpath), "--k-range", "1:2",
        "--kp-range", "1:2", "--variants", "dt1.5,mip", "--out", str(out),
    ])
    assert code == 0
    doc = json.loads(out.read_text())
    ks = {d["k"] for d in doc["delta"]}
    assert {1, 2, 3}.issubset(ks)  # includes the ceil(1.5k) orders the variant needs
    assert doc["coherence"] is not None
    assert any(c["variant"] == "mip" for c in doc["conditions"])
    for entry in doc["delta"]:
        assert entry["exact"] is True


def test_verify_subcommand_end_to_end(tmp_path):
    # build a near-orthogonal instance, solve, compute constants, certify
    extra = np.full((12, 1), 1.0 / np.sqrt(12.0))
    F = sk.SensingMatrix.from_entries(np.hstack([np.eye(12), extra]))
    mpath = tmp_path / "F.txt"
    sk.write_matrix_text(F, mpath)
    beta = sk.generate_signal(13, 1, "unit", seed=2)
    tpath = tmp_path / "truth.txt"
    sk.write_vector_text(beta.values, tpath)
    ypath = tmp_path / "y.txt"
    sk.write_vector_text(F.entries @ beta.values, ypath)
    solve_out = tmp_path / "solve.json"
    assert main([
        "solve", "--program", "p", "--matrix", str(mpath), "--y", str(ypath),
        "--out", str(solve_out),
    ]) == 0
    const_out = tmp_path / "constants.json"
    assert main([
        "constants", "--matrix", str(mpath), "--k-range", "1:1",
        "--variants", "dt1.5", "--out", str(const_out),
    ]) == 0
    doc = json.loads(const_out.read_text())
    assert doc["conditions"][0]["holds"] is True
    verify_out = tmp_path / "verify.json"
    code = main([
        "verify", "--solve", str(solve_out), "--truth", str(tpath),
        "--constants", str(const_out), "--theorem", "noiseless", "--k", "1",
        "--out", str(verify_out),
    ])
    assert code == 0
    cert = json.loads(verify_out.read_text())
    assert cert["holds"] is True
    assert cert["advisory"] is False
    assert cert["bound"] == 0.0


def test_experiment_subcommand(tmp_path):
    cfg = {
        "matrix": {"n": 8, "p": 8, "ensemble": "gaussian", "normalize": True},
        "signal": {"k": [1], "amplitude": "unit"},
        "noise": [{"regime": "noiseless"}],
        "programs": ["p"],
        "trials": 3,
        "seed": 11,
        "theorems": [],
        "output": str(tmp_path / "results"),
    }
    cpath = tmp_path / "config.json"
    cpath.write_text(json.dumps(cfg))
    out = tmp_path / "run.json"
    assert main(["experiment", "--config", str(cpath), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert set(doc["outputs"]) == {"csv", "json", "plotdata"}
    results = json.loads((tmp_path / "results" / "results.json").read_text())
    assert results["cells"][0]["success_rate"] == 1.0


def test_tails_subcommand(tmp_path):
    out = tmp_path / "tails.json"
    code = main([
        "tails", "--n", "30", "--p", "40", "--sigma", "1.0",
        "--trials", "2000", "--seed", "1", "--out", str(out),
    ])
    doc = json.loads(out.read_text())
    assert doc["l2"]["ok"] is True
    assert 0.0 <= doc["corr"]["frequency"] <= 1.0
    assert code in (0, 1)  # corr event may sit below its advertised bound


def test_cli_rejects_unknown_program():
    with pytest.raises(SystemExit):
        main(["solve", "--program", "huh", "--matrix", "x", "--y", "y"])
