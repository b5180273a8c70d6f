import json

import pytest

from conftest import FIXTURES
from rhmap.cli import main


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _ = run(capsys, "model", "--source", FIXTURES / "wedge.alg", "--target", FIXTURES / "y.sul", "--out", out)
    assert code == 0
    return out


def test_model_report(report):
    rep = json.loads(report.read_text())
    assert set(rep) >= {"model", "mc", "components", "checks"}
    assert rep["model"]["dimensions"]["-1"] == 1
    nonneg = [b for b in rep["model"]["brackets"]
              if all(d["degree"] >= 0 for d in rep["model"]["basis"] if d["label"] in b["inputs"])]
    assert len(nonneg) == 5
    assert all(isinstance(v, str) for b in rep["model"]["brackets"] for v in b["value"].values())


def test_byte_stable(tmp_path, capsys):
    outs = []
    for n in range(2):
        out = tmp_path / f"r{n}.json"
        run(capsys, "model", "--source", FIXTURES / "wedge.alg", "--target", FIXTURES / "y.sul", "--out", out)
        run(capsys, "component", "--model", out, "--mc", "1*e5@y", "--out", out)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_mc_and_component(report, capsys):
    assert run(capsys, "mc", "--model", report, "--candidate", "e5@y", "--out", report)[0] == 0
    rep = json.loads(report.read_text())
    assert rep["mc"]["kind"] == "zero" and rep["mc"]["verified"] == [{"e5@y": "1"}]
    code, _ = run(capsys, "component", "--model", report, "--mc", "0", "--out", report)
    assert code == 0
    rep = json.loads(report.read_text())
    assert rep["components"][0]["ranks"] == {"1": 2, "2": 1, "3": 3, "5": 3, "7": 1}


def test_expectation_checks(report, capsys):
    code, _ = run(capsys, "component", "--model", report, "--mc", "e5@y", "--expect-ranks", "1:2,3:2,5:3,7:2",
                  "--out", report)
    assert code == 0
    rep = json.loads(report.read_text())
    (chk,) = [c for c in rep["checks"] if c["name"].startswith("expected_ranks")]
    assert not chk["passed"] and chk["differences"] == {"7": {"computed": 1, "expected": 2}}
    code, _ = run(capsys, "component", "--model", report, "--mc", "e5@y", "--expect-ranks", "1:2,3:2,5:3,7:2",
                  "--strict")
    assert code == 2


def test_hspace(report, capsys):
    code, out = run(capsys, "hspace", "--model", report, "--mc", "0", "--expect-grouplike", "no")
    rep = json.loads(out)
    assert code == 0
    g = rep["components"][0]["grouplike"]
    assert not g["grouplike"] and len(g["nonzero_brackets"]) == 5


def test_check_command(capsys):
    code, out = run(capsys, "check", "--file", FIXTURES / "bad_d2.sul")
    err = json.loads(out)["error"]
    assert code == 2 and err["offender"] == "w" and err["type"] == "InvariantError"
    code, out = run(capsys, "check", "--file", FIXTURES / "hy.alg")
    assert code == 0 and all(c["passed"] for c in json.loads(out)["checks"])
    code, out = run(capsys, "check", "--file", FIXTURES / "three_stage.sul")
    assert code == 0
    (ts,) = [c for c in json.loads(out)["checks"] if c["name"] == "two_stage"]
    assert ts["generator"] == "e"


def test_error_paths(tmp_path, capsys, report):
    code, out = run(capsys, "check", "--file", tmp_path / "missing.alg")
    assert code == 1 and "cannot read" in json.loads(out)["error"]["message"]
    bad = tmp_path / "bad.alg"
    bad.write_text("algebra A {\n basis a:2\n}")
    code, out = run(capsys, "check", "--file", bad)
    err = json.loads(out)["error"]
    assert code == 1 and (err["line"], err["col"]) == (3, 1)
    code, out = run(capsys, "component", "--model", report, "--mc", "e2@x")
    assert code == 1 and "degree -1" in json.loads(out)["error"]["message"]
    code, out = run(capsys, "component", "--model", report, "--mc", "2*e5@y +")
    assert code == 1
    code, out = run(capsys, "model", "--source", FIXTURES / "wedge.alg", "--target", FIXTURES / "three_stage.sul")
    err = json.loads(out)["error"]
    assert code == 1 and err["type"] == "NotTwoStage" and err["offender"] == "e"
    notjson = tmp_path / "x.json"
    notjson.write_text("{")
    assert run(capsys, "mc", "--model", notjson)[0] == 1


def test_check_transfer_flag(tmp_path, capsys):
    out = tmp_path / "t.json"
    code, _ = run(capsys, "model", "--source", FIXTURES / "wedge_dga.alg", "--target", FIXTURES / "y.sul",
                  "--check-transfer", "--out", out)
    assert code == 1  # the source must have zero differential for the model itself
    code, _ = run(capsys, "model", "--source", FIXTURES / "wedge.alg", "--target", FIXTURES / "y.sul",
                  "--check-transfer", "--out", out)
    rep = json.loads(out.read_text())
    assert code == 0
    assert {c["name"]: c["passed"] for c in rep["checks"]} == {
        "jacobi": True, "closed_formula_equals_transfer": True, "multi_vertex_trees_vanish": True}
