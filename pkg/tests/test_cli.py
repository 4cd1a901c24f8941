import json
from pathlib import Path

import pytest

from modules.cli import RunConfig, _parse_args, main
from modules.env_check import DEFAULT_BIT_BUDGET


def _write_quiver(tmp_path: Path, arrows, n) -> str:
    path = tmp_path / "q.json"
    path.write_text(json.dumps({"n": n, "arrows": arrows}), encoding="utf-8")
    return str(path)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_orbit_lines(capsys, tmp_path):
    quiver = _write_quiver(tmp_path, [[2, 1, 1]], 2)
    code, out, _ = _run(capsys, ["orbit", "--quiver", quiver, "--start", "1,1", "--steps", "5"])
    assert code == 0
    lines = [json.loads(line) for line in out.splitlines()]
    assert [line["point"] for line in lines[:6]] == [["1", "1"], ["2", "3"], ["2", "1"],
                                                    ["1", "2"], ["3", "2"], ["1", "1"]]
    assert lines[-1] == {"generic_up_to": 5, "period": 5, "certified_horizon": 5}


def test_orbit_with_bundled_quiver(capsys):
    code, out, _ = _run(capsys, ["orbit", "--quiver", "kronecker.json", "--steps", "2"])
    assert code == 0
    assert [json.loads(line)["point"] for line in out.splitlines()[:3]] == [["1", "1"], ["2", "5"], ["13", "34"]]


def test_orbit_reports_relabeling(capsys):
    code, out, _ = _run(capsys, ["orbit", "--quiver", "a3double_mutated", "--steps", "1"])
    assert code == 0
    lines = [json.loads(line) for line in out.splitlines()]
    assert lines[1]["point"] == ["2", "5", "5"]
    assert lines[-1]["relabeling"] == {"1": 2, "2": 1, "3": 3}
    code, out, _ = _run(capsys, ["orbit", "--quiver", "a2", "--steps", "1"])
    assert "relabeling" not in json.loads(out.splitlines()[-1])


def test_zero_start_exits_2(capsys):
    code, out, _ = _run(capsys, ["orbit", "--quiver", "a2", "--start", "0,1", "--steps", "1"])
    assert code == 2
    assert json.loads(out.splitlines()[-1])["error"] == "ZeroStartCoordinate"


def test_non_generic_prints_partial_orbit(capsys):
    code, out, _ = _run(capsys, ["orbit", "--quiver", "a2", "--start", "1,-1", "--steps", "3"])
    assert code == 2
    lines = [json.loads(line) for line in out.splitlines()]
    assert lines[0] == {"t": 0, "point": ["1", "-1"]}
    assert lines[-1]["error"] == "NonGenericSpecialization"
    assert (lines[-1]["step"], lines[-1]["vertex"]) == (1, 1)


def test_bit_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("FRIEZE_BUDGET_BITS", "4")
    code, out, _ = _run(capsys, ["orbit", "--quiver", "kronecker", "--steps", "5"])
    assert code == 3
    assert json.loads(out.splitlines()[-1])["error"] == "BudgetExceeded"


def test_flag_beats_environment(monkeypatch):
    monkeypatch.setenv("FRIEZE_BUDGET_BITS", "4")
    config = RunConfig.from_args(_parse_args(["orbit", "--quiver", "a2", "--bit-budget", "99"]))
    assert config.bit_budget == 99
    monkeypatch.setenv("FRIEZE_BUDGET_BITS", "not-a-number")
    config = RunConfig.from_args(_parse_args(["orbit", "--quiver", "a2"]))
    assert config.bit_budget == DEFAULT_BIT_BUDGET
    assert config.steps == 10


def test_non_positive_budget_is_invalid(capsys):
    code, out, _ = _run(capsys, ["orbit", "--quiver", "a2", "--bit-budget", "0"])
    assert code == 1
    assert json.loads(out)["error"] == "InvalidInput"


def test_missing_quiver_file(capsys, tmp_path):
    code, out, _ = _run(capsys, ["classify", "--quiver", str(tmp_path / "nope.json")])
    assert code == 1


def test_cyclic_quiver_is_invalid(capsys, tmp_path):
    quiver = _write_quiver(tmp_path, [[1, 2, 1], [2, 3, 1], [3, 1, 1]], 3)
    code, out, _ = _run(capsys, ["classify", "--quiver", quiver])
    assert code == 1
    assert json.loads(out)["error"] == "NotAcyclic"


def test_classify_reports_relabeling(capsys):
    code, out, _ = _run(capsys, ["classify", "--quiver", "a3double_mutated.json"])
    assert code == 0
    data = json.loads(out)
    assert data["relabeling"] == {"1": 2, "2": 1, "3": 3}
    assert data["kind"] == "wild"


def test_vanish(capsys):
    code, out, _ = _run(capsys, ["vanish", "--quiver", "kronecker", "--degree", "2", "--pretty"])
    assert code == 0
    data = json.loads(out)
    assert data["space"]["basis"] == ["x1^2 - 3*x1*x2 + x2^2 + 1"]
    assert data["dimension"]["estimate"] == 1


def test_components(capsys):
    code, out, _ = _run(capsys, ["components", "--quiver", "atilde2", "--degree", "2", "--m-max", "4"])
    assert code == 0
    data = json.loads(out)
    assert data["m"] == 2
    assert [c["dim_estimate"] for c in data["classes"]] == [1, 1]
    assert data["verified_cycle"] is True


def test_invariant_certificate(capsys):
    code, out, _ = _run(capsys, ["invariant", "--quiver", "kronecker", "--h", "(x1^2+x2^2+1)/(x1*x2)",
                                 "--k-max", "3", "--pretty"])
    assert code == 0
    data = json.loads(out)
    assert data["certificate"]["period"] == 1
    assert data["certificate"]["equations"] == [["x1^2 - 3*x1*x2 + x2^2 + 1"]]
    assert data["failures"] == []


def test_non_invariant_exits_3(capsys):
    code, out, _ = _run(capsys, ["invariant", "--quiver", "kronecker", "--h", "x1", "--k-max", "4"])
    assert code == 3
    assert json.loads(out)["error"] == "NotInvariant"


def test_parse_error_exits_1(capsys):
    code, out, _ = _run(capsys, ["invariant", "--quiver", "kronecker", "--h", "x1 + $"])
    assert code == 1
    data = json.loads(out)
    assert data["error"] == "ParseError"
    assert data["position"] == 5


def test_invariant_in_input_labels(capsys):
    code, out, _ = _run(capsys, ["invariant", "--quiver", "a3double_mutated", "--h", "x1/x3",
                                 "--k-max", "2", "--pretty"])
    assert code == 0
    assert json.loads(out)["certificate"]["h"] == "x2*x3^-1"


def test_symmetry(capsys):
    code, out, _ = _run(capsys, ["symmetry", "--quiver", "a3double", "--pretty"])
    assert code == 0
    data = json.loads(out)
    assert data["pair"] == {"sink": 1, "source": 3, "multiplicities": {"2": 2}}
    assert data["F0"] == "-2*x1*x3 + x2^2 + 1"


def test_symmetry_automorphisms(capsys):
    code, out, _ = _run(capsys, ["symmetry", "--quiver", "a3double_mutated", "--list"])
    assert json.loads(out)["automorphisms"] == [[1, 2, 3], [1, 3, 2]]
    code, out, _ = _run(capsys, ["symmetry", "--quiver", "a3double_mutated", "--automorphism", "1,3,2",
                                 "--pretty"])
    assert code == 0
    assert json.loads(out)["h"] == "x2^-1*x3"


def test_reproduce_a2(capsys):
    code, out, _ = _run(capsys, ["reproduce", "a2"])
    assert code == 0
    data = json.loads(out)
    assert data["passed"] is True
    assert data["results"]["period"] == 5


def test_reproduce_golden_mismatch(capsys, tmp_path):
    golden = json.loads((Path(__file__).resolve().parent.parent / "golden" / "a2.json").read_text(encoding="utf-8"))
    golden["expect"]["period"]["value"] = 4
    (tmp_path / "a2.json").write_text(json.dumps(golden), encoding="utf-8")
    code, out, err = _run(capsys, ["reproduce", "a2", "--golden-dir", str(tmp_path)])
    assert code == 4
    assert json.loads(out)["checks"]["period"] == "fail"
    assert "-4" in err and "+5" in err


def test_reproduce_atilden_needs_n(capsys):
    code, _, _ = _run(capsys, ["reproduce", "atilden"])
    assert code == 1


def test_unknown_case_is_rejected():
    with pytest.raises(SystemExit):
        _parse_args(["reproduce", "b7"])
