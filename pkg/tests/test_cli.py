import io
import json
import sys

import pytest

from trxy.cli import main


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    old = sys.stdout, sys.stderr
    sys.stdout, sys.stderr = out, err
    try:
        code = main(argv)
    finally:
        sys.stdout, sys.stderr = old
    return code, out.getvalue(), err.getvalue()


def test_list_curves():
    code, out, _ = run_cli(["list-curves"])
    assert code == 0
    assert "airy" in out and "vertex" in out and "gw-p1" in out


def test_compute_engine_tensor_json():
    code, out, _ = run_cli(["compute", "--curve", "airy", "--g", "1", "--n", "1", "--method", "tr", "--out", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["terms"] == [{"coeff": "1/8", "factors": [[1, "0", 4]]}]


def test_compute_duality_jet():
    code, out, _ = run_cli(
        ["compute", "--curve", "gamma", "--g", "1", "--n", "1", "--method", "xy-cycles", "--out", "json", "--base-points", "5/3"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["base"] == {"w1": "5/3"}
    assert doc["coeffs"][0]["val"] == "-3/100"  # (-2) * 1/(24 (5/3)^2)


def test_extract_gw():
    code, out, _ = run_cli(["extract", "--invariant", "gw-p1", "--g", "2", "--b", "4", "--out", "json"])
    assert code == 0
    assert json.loads(out)["value"] == "1/1920"


def test_extract_psi_text():
    code, out, _ = run_cli(["extract", "--invariant", "psi", "--g", "1", "--k", "1"])
    assert code == 0
    assert "1/24" in out


def test_verify_cauchy_suite():
    code, out, _ = run_cli(["verify", "--suite", "cauchy"])
    assert code == 0
    assert "PASS" in out and "FAIL" not in out


def test_deterministic_output():
    argv = ["verify", "--suite", "cauchy", "--seed", "7", "--out", "json"]
    a = run_cli(argv)
    b = run_cli(argv)
    assert a == b


def test_usage_errors_exit_two():
    code, _, err = run_cli(["compute", "--curve", "nope", "--g", "1", "--n", "1"])
    assert code == 2
    doc = json.loads(err)
    assert "message" in doc
    code, _, err = run_cli(["extract", "--invariant", "gw-p1", "--g", "1"])
    assert code == 2


def test_custom_curve_file(tmp_path):
    doc = {"name": "file-curve", "x": {"rational": {"num": ["0", "0", "1"]}}, "y": {"rational": {"num": ["0", "1"]}}}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(doc))
    code, out, _ = run_cli(["compute", "--curve-file", str(p), "--g", "1", "--n", "1", "--method", "tr", "--out", "json"])
    assert code == 0
    assert json.loads(out)["terms"] == [{"coeff": "1/8", "factors": [[1, "0", 4]]}]
