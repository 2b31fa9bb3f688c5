import json

import pytest

from rinehart import cli
from rinehart.problem import ProblemError, parse_problem_text


def run(*argv):
    code, out, err = cli.run([str(a) for a in argv])
    return code, (json.loads(out) if out else None), err


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


SL2_BAD = {
    "lie_rinehart": {"L": {"rank": 3, "labels": ["e", "f", "h"], "bracket": [
        [[["0"], ["0"], ["0"]], [["1"], ["0"], ["0"]], [["-2"], ["0"], ["0"]]],
        [[["-1"], ["0"], ["0"]], [["0"], ["0"], ["0"]], [["0"], ["2"], ["0"]]],
        [[["2"], ["0"], ["0"]], [["0"], ["-2"], ["0"]], [["0"], ["0"], ["0"]]]]}},
    "request": {"command": "validate"},
}


def test_validate_fixture_ok():
    code, rep, _ = run("validate", "--fixture", "FIX-HEIS")
    assert code == 0 and rep["result"]["valid"]
    assert rep["tool"] == "rinehart" and rep["input_digest"].startswith("sha256:")


def test_validate_jacobi_witness(tmp_path):
    code, rep, _ = run("validate", write(tmp_path, "bad.json", SL2_BAD))
    assert code == 1
    viol = rep["result"]["blocks"]["lie_rinehart.L"]["violations"]
    assert any(v["kind"] == "jacobi" and sorted(v["witness"]) == ["e", "f", "h"] for v in viol)


def test_invalid_blocks_stop_computation(tmp_path):
    doc = dict(SL2_BAD, modules={"M": {"over": "L", "kind": "trivial"}}, request={})
    code, rep, _ = run("cohomology", write(tmp_path, "bad.json", doc), "--all")
    assert code == 1 and not rep["result"]["valid"]


def test_malformed_rational(tmp_path):
    doc = {"algebras": {"A": {"dim": 1, "unit": ["1"], "mult": [[["1/0"]]]}}}
    code, rep, err = run("validate", write(tmp_path, "r.json", doc))
    assert code == 2 and rep is None
    assert "$.algebras.A.mult[0][0][0]" in err


def test_json_syntax_error(tmp_path):
    code, _, err = run("validate", write(tmp_path, "s.json", '{"algebras": {\n  "A": }'))
    assert code == 2 and "line 2" in err


def test_unresolved_reference(tmp_path):
    doc = {"modules": {"M": {"over": "Nope", "kind": "base"}}}
    code, _, err = run("validate", write(tmp_path, "u.json", doc))
    assert code == 2 and "Nope" in err and "$.modules.M.over" in err


def test_usage_errors(tmp_path):
    assert run("validate")[0] == 2
    assert run("validate", "--fixture", "FIX-NOPE")[0] == 2
    assert run("curvature", "--fixture", "FIX-SL2")[0] == 2
    assert run("classify", "--fixture", "FIX-SPLIT-SL2")[0] == 2
    assert run("bogus")[0] == 2
    assert run("validate", tmp_path / "missing.json")[0] == 2
    f = write(tmp_path, "x.json", {"extensions": {"E": "FIX-HEIS"}})
    assert run("validate", f, "--fixture", "FIX-HEIS")[0] == 2


def test_cohomology_examples():
    for name, dims in (("FIX-SL2", [1, 0, 0, 1]), ("FIX-AB2", [1, 2, 1]), ("FIX-TP2", [1, 1])):
        code, rep, _ = run("cohomology", "--fixture", name, "--all")
        assert code == 0 and rep["result"]["betti"] == dims
        assert rep["verification"]["d_squared_zero"]
    code, rep, _ = run("cohomology", "--fixture", "FIX-SL2", "--degree", "3")
    assert rep["result"]["betti"] == [1]


def test_chern_weil_examples():
    code, rep, _ = run("chern-weil", "--fixture", "FIX-HEIS", "--max-weight", "1")
    w1 = rep["result"]["weights"][1]
    assert code == 0 and w1["invariants_dim"] == 1 and not w1["classes"][0]["zero"]
    assert all(rep["verification"].values())
    code, rep, _ = run("chern-weil", "--fixture", "FIX-SPLIT-SL2", "--max-weight", "0")
    assert [w["weight"] for w in rep["result"]["weights"]] == [0]
    assert rep["result"]["weights"][0]["classes"][0]["class"] == ["1"]
    code, rep, _ = run("chern-weil", "--fixture", "FIX-HEIS(0)", "--max-weight", "1")
    assert rep["result"]["weights"][1]["classes"][0]["zero"]


def test_clamp_noted():
    code, rep, _ = run("chern-weil", "--fixture", "FIX-HEIS", "--max-weight", "4")
    assert code == 0
    assert rep["result"]["clamped_from"] == 4 and rep["result"]["max_weight"] == 1
    assert run("chern-weil", "--fixture", "FIX-HEIS", "--max-weight", "-1")[0] == 2


def test_classify_examples(tmp_path):
    doc = {"lie_rinehart": {"Q": "FIX-AB2"}, "modules": {"K": {"over": "Q", "kind": "trivial"}},
           "request": {"quotient": "Q", "kernel_module": "K"}}
    code, rep, _ = run("classify", write(tmp_path, "c.json", doc))
    assert code == 0 and rep["result"]["h2_dim"] == 1
    toy = {"lie_rinehart": {"Q": {"rank": 1, "bracket": [[[["0"]]]]}},
           "modules": {"K": {"over": "Q", "kind": "trivial"}}}
    code, rep, _ = run("classify", write(tmp_path, "t.json", toy))
    assert code == 0 and rep["result"]["h2_dim"] == 0 and rep["result"]["classes"] == []


def test_classify_act(tmp_path):
    rho = write(tmp_path, "rho.json", {"rho": [{"indices": [0, 1], "value": ["1"]}]})
    code, rep, _ = run("classify", "--fixture", "FIX-HEIS(0)", "--act", rho)
    assert code == 0
    assert rep["result"]["action"]["verdict"] == "not congruent to input"
    zero = write(tmp_path, "zero.json", {"rho": []})
    code, rep, _ = run("classify", "--fixture", "FIX-HEIS(0)", "--act", zero)
    assert rep["result"]["action"]["verdict"] == "congruent to input"
    bad = write(tmp_path, "bad.json", {"rho": [{"indices": [1, 0], "value": ["1"]}]})
    assert run("classify", "--fixture", "FIX-HEIS(0)", "--act", bad)[0] == 2


def test_other_commands():
    for cmd in ("curvature", "bianchi", "invariants", "global-invariant"):
        code, rep, _ = run(cmd, "--fixture", "FIX-HEIS")
        assert code == 0 and all(rep["verification"].values())
    _, rep, _ = run("curvature", "--fixture", "FIX-HEIS(5)")
    assert rep["result"]["curvature"] == [{"indices": [0, 1], "value": ["5"]}]
    _, rep, _ = run("invariants", "--fixture", "FIX-HEIS", "--max-weight", "4")
    assert [w["dim"] for w in rep["result"]["weights"]] == [1] * 5


def test_output_file(tmp_path):
    out = tmp_path / "r.json"
    code, rep, _ = run("validate", "--fixture", "FIX-TP2", "--output", out)
    assert code == 0 and rep is None
    assert json.loads(out.read_text())["result"]["valid"]


def test_verification_failure_exit(monkeypatch):
    monkeypatch.setattr(cli, "bianchi_check", lambda e, w=None: False)
    code, rep, err = run("bianchi", "--fixture", "FIX-HEIS")
    assert code == 3 and rep is None and "Bianchi" in err


def test_main_writes_stdout(capsys):
    assert cli.main(["validate", "--fixture", "FIX-AB2"]) == 0
    assert json.loads(capsys.readouterr().out)["result"]["valid"]


def test_problem_parser_errors():
    with pytest.raises(ProblemError, match="unknown block"):
        parse_problem_text('{"nonsense": {}}')
    with pytest.raises(ProblemError, match="expected 2 entries"):
        parse_problem_text('{"algebras": {"A": {"dim": 2, "unit": ["1"], "mult": []}}}')
    with pytest.raises(ProblemError, match="not an extension"):
        parse_problem_text('{"extensions": {"E": "FIX-SL2"}}')
    P = parse_problem_text('{"extensions": {"E": "FIX-HEIS(3)"}}')
    assert P.extensions["E"].name == "FIX-HEIS(3)"
