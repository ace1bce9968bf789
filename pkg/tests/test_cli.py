from __future__ import annotations

import json

import pytest

from momdil import cli
from momdil.ensemble import OperatorEnsemble, save_ensemble


def _run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


def test_check_coisometry_passes(capsys):
    code, rep = _run(capsys, ["check", "--kind", "coisometry", "-d", "2", "-n", "2", "--polys", "2"])
    assert code == 0 and rep["overall"] == "pass"
    assert "equality_case" in rep["stages"]


def test_check_counterexample(tmp_path, capsys):
    path = tmp_path / "two.json"
    save_ensemble(OperatorEnsemble.deterministic([[[2.0]]]), path)
    code, rep = _run(capsys, ["check", "--scenario", str(path), "--depth", "1"])
    assert code == 2
    assert rep["stages"]["domination"]["margin"] == pytest.approx(-3.0, abs=1e-12)


def test_malformed_scenario(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("[1, 2")
    code, rep = _run(capsys, ["check", "--scenario", str(path)])
    assert code == 3 and rep["overall"] == "input-fail"


def test_bad_polynomial(capsys):
    code, rep = _run(capsys, ["norms", "--poly", "Z1 + * Z2"])
    assert code == 3 and rep["error"] == "PolySyntaxError"
    assert "position 5" in rep["message"]


def test_norms_csv(tmp_path, capsys):
    csv_path = tmp_path / "t.csv"
    code, rep = _run(capsys, ["norms", "--poly", "Z1+Z2", "--levels", "2", "--csv", str(csv_path)])
    assert code == 0 and len(rep["table"]) == 3
    assert csv_path.read_text().splitlines()[0] == "M,value,gap,lower_bound"


def test_capacity_exit(capsys):
    code, rep = _run(capsys, ["check", "--kind", "row_contraction", "-d", "3", "-n", "2",
                              "--depth", "12", "--polys", "0"])
    assert code == 4 and rep["overall"] == "capacity"


def test_generate_roundtrip(tmp_path, capsys):
    path = tmp_path / "e.json"
    code, _ = _run(capsys, ["generate", "--kind", "row_contraction", "--seed", "3", "--out", str(path)])
    assert code == 0
    code, rep = _run(capsys, ["check", "--scenario", str(path), "--polys", "2"])
    assert code == 0 and rep["ensemble"]["scenarios"] == 3


def test_calculus_command(capsys):
    code, rep = _run(capsys, ["calculus", "--kind", "row_contraction", "-d", "1", "-n", "2",
                              "--poly", "1 + 0.5*Z1 + 0.25*Z1^2"])
    assert code == 0
    assert rep["radial"]["cauchy_decay"] is True
