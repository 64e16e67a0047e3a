from __future__ import annotations

import json

import pytest

from qlp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_lattice_make(capsys, tmp_path):
    code, out, _ = run(capsys, "lattice", "make", "mo:3")
    assert code == 0 and len(json.loads(out)["elements"]) == 8
    code, out, _ = run(capsys, "lattice", "make", "boolean:3", "--out", str(tmp_path))
    assert code == 0
    assert len(json.loads((tmp_path / "boolean3.json").read_text())["elements"]) == 8


def test_lattice_check_broken(capsys):
    code, out, _ = run(capsys, "lattice", "check", "broken.json", "--format", "json")
    assert code == 1
    doc = json.loads(out)
    inv = next(c for c in doc["checks"] if c["name"] == "(ii) involution")
    assert inv["status"] == "fail" and inv["witness"] == "a"


def test_lattice_check_generated(capsys):
    assert run(capsys, "lattice", "check", "mo:3")[0] == 0


def test_complete_and_validate(capsys, tmp_path):
    code, out, _ = run(capsys, "smap", "complete", "example31_partial.json", "--out", str(tmp_path))
    assert code == 0
    table = json.loads((tmp_path / "smap.json").read_text())
    assert len(table["entries"]) == 512
    assert run(capsys, "smap", "validate", str(tmp_path / "smap.json"))[0] == 0
    assert run(capsys, "smap", "props", str(tmp_path / "smap.json"))[0] == 0


def test_complete_raw_is_inconsistent(capsys):
    code, out, _ = run(capsys, "smap", "complete", "example31_raw.json")
    assert code == 1
    assert "derivation A" in out and "derivation B" in out


def test_synth_infeasible_and_feasible(capsys, tmp_path):
    cons = tmp_path / "c.json"
    cons.write_text(json.dumps([{"tuple": ["a", "a"], "rel": "=", "value": "3/10"},
                                {"tuple": ["a", "1"], "rel": "=", "value": "1/5"}]))
    code, out, _ = run(capsys, "smap", "synth", "mo:3", "arity=2", str(cons), "--format", "json")
    assert code == 1
    doc = json.loads(out)
    assert doc["status"] == "infeasible" and doc["certificate_verified"] is True
    cons.write_text(json.dumps({"constraints": [{"tuple": ["a", "b"], "value": "1/4"}], "symmetric": True}))
    out_dir = tmp_path / "o"
    code, out, _ = run(capsys, "smap", "synth", "mo:3", "2", str(cons), "--out", str(out_dir))
    assert code == 0 and (out_dir / "smap.json").exists()


def test_dist_commands(capsys):
    base = ("example31_partial.json", "example31_observables.json")
    code, out, _ = run(capsys, "dist", "F", *base, "--order", "x1,x2,x3", "--at", "1,1,1")
    assert code == 0 and "3/10 (0.3)" in out
    code, out, _ = run(capsys, "dist", "F", *base, "--order", "x3,x2,x1", "--at", "1,1,1", "--format", "json")
    assert json.loads(out)["F"] == "29/100"
    code, out, _ = run(capsys, "dist", "marginal", *base, "--order", "x1,x2,x3", "--at", "*,1,1", "--drop", "x1")
    assert code == 0 and "3/10" in out
    code, out, _ = run(capsys, "dist", "commutativity", *base)
    assert code == 0 and out.startswith("non-commutative")
    code, out, _ = run(capsys, "dist", "classical", *base, "--format", "json")
    assert code == 0 and json.loads(out)["P(omega)"] == "1"


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "example31")
    assert code == 0 and "all checks passed" in out
    code, out, _ = run(capsys, "verify", "example31", "--raw")
    assert code == 1 and "FAILED at: completion" in out
    code, out, _ = run(capsys, "verify", "example31", "--skip-classical", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and any(c["status"] == "skipped" for c in doc["checks"])


def test_reports_are_deterministic(capsys):
    a = run(capsys, "verify", "example31", "--format", "json")[1]
    b = run(capsys, "verify", "example31", "--format", "json")[1]
    assert a == b


@pytest.mark.parametrize(
    "argv",
    [
        ("smap", "validate", "missing.json"),
        ("dist", "F", "example31_partial.json", "example31_observables.json", "--order", "x1,x2", "--at", "1,1"),
        ("dist", "F", "example31_partial.json", "example31_observables.json", "--at", "1,q,1"),
        ("smap", "synth", "mo:3", "arity=x"),
    ],
)
def test_input_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    code, _, err = run(capsys, "lattice", "check", str(bad))
    assert code == 2 and "not valid JSON" in err


def test_partial_table_to_validate_is_structural(capsys, tmp_path):
    doc = {"lattice": "mo:3", "arity": 2, "entries": [{"tuple": ["1", "1"], "value": "1"}]}
    f = tmp_path / "p.json"
    f.write_text(json.dumps(doc))
    assert run(capsys, "smap", "validate", str(f))[0] == 2
