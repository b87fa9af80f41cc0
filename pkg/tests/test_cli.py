import json

import pytest

from dxm import report
from dxm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_endo_check_decisive(capsys):
    code, out, _ = run(capsys, "endo", "check", "--map", "(1 - z^3)/2")
    doc = json.loads(out)
    report.validate(doc, "verdict")
    assert code == 0
    assert doc["result"] == "NotEndomorphism" and doc["rule"] == "thm4"
    b = doc["certificate"]["b"]
    assert b[0] == -1.0 and abs(b[1]) < 1e-12


def test_endo_check_unknown(capsys):
    code, out, _ = run(capsys, "endo", "check", "--map", "1/2*(z + ((1+i)z-1)/(z+(i-1)))")
    assert code == 3
    assert json.loads(out)["certificate"]["label"] == "unresolved-case"


def test_endo_check_all_rules(capsys):
    code, out, _ = run(capsys, "endo", "check", "--num", "0,1/2", "--all-rules")
    doc = json.loads(out)
    assert code == 0 and doc["certificate"]["conflict"] is False


@pytest.mark.parametrize("argv", [
    ("endo", "check", "--map", "z/(z"),
    ("endo", "check", "--map", "2z"),
    ("endo", "check"),
    ("endo", "check", "--map", "z", "--num", "z"),
    ("weights", "check", "--weight", "bogus"),
    ("nonsense",),
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(list(argv)))
    assert info.value.code == 1


def test_parse_error_offset(capsys):
    code, _, err = run(capsys, "endo", "check", "--map", "z/(z")
    assert code == 1 and "offset 4" in err


def test_weights_check(capsys, tmp_path):
    code, out, _ = run(capsys, "weights", "check", "--weight", "n!^2")
    assert code == 0
    doc = json.loads(out)
    report.validate(doc, "weights")
    # M_2 = 1/e < 2 M_1^2 breaks the algebra condition
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "bad", "log_m": [0, 0, -1]}))
    code, out, _ = run(capsys, "weights", "check", "--weight-file", str(bad), "--upto", "2")
    assert code == 2 and json.loads(out)["algebra_ok"] is False


def test_domain_supnorm(capsys):
    code, out, _ = run(capsys, "domain", "supnorm", "--expr", "z^2 + 1")
    doc = json.loads(out)
    assert code == 0 and doc["value"] == pytest.approx(2)


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--map", "(1+z)^2/4")
    assert code == 0 and json.loads(out)["case"] == "Case3a_ii"


def test_witness_csv(capsys, tmp_path):
    csv = tmp_path / "w.csv"
    code, out, _ = run(capsys, "endo", "witness", "--map", "(2z-1)/(2-z)", "--b", "1",
                       "--R", "1,2", "--csv", str(csv))
    doc = json.loads(out)
    assert code == 0 and doc["monotone"]
    lines = csv.read_text().splitlines()
    assert lines[0].startswith("R,normF,normFphi,ratio")
    assert len(lines) == 3


def test_witness_precondition(capsys):
    code, _, _ = run(capsys, "endo", "witness", "--map", "z/2", "--b", "1")
    assert code == 2


def test_forge_roundtrip(capsys, tmp_path):
    out = tmp_path / "weights.json"
    code, _, _ = run(capsys, "forge", "thm5", "--map", "(2z-1)/(2-z)", "--b", "1",
                     "--nmax", "6", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    report.validate(doc, "forge")
    assert doc["verification"]["ok"]
    code, wout, _ = run(capsys, "weights", "check", "--weight-file", str(out), "--upto", "6")
    assert code == 0 and json.loads(wout)["max_checked"] == 6
    code, _, _ = run(capsys, "endo", "check", "--map", "z/2", "--weight-file", str(out))
    assert code in (0, 3)


def test_forge_hypothesis_failure(capsys):
    code, _, err = run(capsys, "forge", "thm3", "--map", "z^2", "--nmax", "3")
    assert code == 2 and "HypothesisError" in err


def test_repro_only(capsys):
    code, out, err = run(capsys, "repro", "--only", "z-over-2")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] == doc["total"] == 1
    assert "PASS" in err


def test_repro_bad_fixture_file(capsys, tmp_path):
    bad = tmp_path / "fx.json"
    bad.write_text('{"fixtures": [{"id": "x", "map": "z/2", "expect": {"result": "Maybe"}}]}')
    code, _, _ = run(capsys, "repro", "--fixtures", str(bad))
    assert code == 1
    bad.write_text("{not json")
    code, _, _ = run(capsys, "repro", "--fixtures", str(bad))
    assert code == 1
    code, _, _ = run(capsys, "repro", "--only", "no-such-id")
    assert code == 1
