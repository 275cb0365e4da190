import json
import subprocess
import sys

import pytest

from nestseq import derivation as D
from nestseq import formula as F
from nestseq.calculus import calculus
from nestseq.cli import run
from nestseq.prover import prove

LIN = "(p->q)|(q->p)"


def call(capsys, *argv):
    code = run(list(argv))
    return code, capsys.readouterr().out


def test_gd_proves_linearity(capsys):
    code, out = call(capsys, "prove", "--logic", "GD", LIN)
    assert code == 0 and out.startswith("PROVED") and "lin" in out


def test_i_refutes_linearity_and_check_accepts_it(capsys, tmp_path):
    code, out = call(capsys, "prove", "--logic", "I", LIN, "--format", "json")
    data = json.loads(out)
    assert code == 1 and data["status"] == "refuted"
    assert len(data["model"]["worlds"]) == 3 and "iota" in data["model"]
    path = tmp_path / "r.json"
    path.write_text(out)
    code, out = call(capsys, "check", str(path))
    assert code == 0 and out.strip() == "OK"


def test_check_rejects_a_bad_countermodel(capsys, tmp_path):
    _, out = call(capsys, "prove", "--logic", "I", LIN, "--format", "json")
    data = json.loads(out)
    data["model"]["valuation"] = {}
    path = tmp_path / "r.json"
    path.write_text(json.dumps(data))
    code, out = call(capsys, "check", str(path))
    assert code == 1 and "INVALID" in out


def test_check_proof_roundtrip_and_tamper(capsys, tmp_path):
    _, out = call(capsys, "prove", "--logic", "GD", LIN, "--format", "json")
    path = tmp_path / "p.json"
    path.write_text(out)
    assert call(capsys, "check", str(path))[0] == 0
    data = json.loads(out)
    data["logic"] = "I"
    path.write_text(json.dumps(data))
    code, out = call(capsys, "check", str(path), "--format", "json")
    assert code == 1 and json.loads(out)["problems"]


@pytest.mark.parametrize(
    "logic, ext, goal",
    [("I", "bd2", "p | (p -> (q | (q -> bot)))"), ("GD", "bd2", "p | (p -> (q | (q -> bot)))"), ("I", "sym", "p | (p -> bot)")],
)
def test_extensions(capsys, logic, ext, goal):
    assert call(capsys, "prove", "--logic", logic, "--extensions", ext, goal)[0] == 0
    assert call(capsys, "prove", "--logic", "I", goal)[0] == 1


def test_extension_refutation_checks(capsys, tmp_path):
    code, out = call(capsys, "prove", "--logic", "I", "--extensions", "bd2", "((p -> q) -> p) -> p", "--format", "json")
    assert code == 1
    path = tmp_path / "r.json"
    path.write_text(out)
    assert call(capsys, "check", str(path))[0] == 0


def test_errors_exit_3(capsys):
    assert call(capsys, "prove", "p ->")[0] == 3
    assert call(capsys, "prove", "--logic", "K", "p")[0] == 3
    assert call(capsys, "prove", "--logic", "I", "forall x. p(x)")[0] == 3
    assert call(capsys, "prove", "--bogus")[0] == 3


def test_unknown_exit_2(capsys):
    code, out = call(capsys, "prove", "--logic", "CD", "--max-rounds", "3", "((forall x. p(x)) -> q) -> exists x. (p(x) -> q)")
    assert code == 2 and out.startswith("UNKNOWN")


@pytest.mark.parametrize("jobs", ["1", "2"])
def test_batch_keeps_order(capsys, tmp_path, jobs):
    goals = ["p -> p", LIN, "# comment", "", "p & q -> q", "p ->"]
    path = tmp_path / "goals.txt"
    path.write_text("\n".join(goals))
    code, out = call(capsys, "prove", "--batch", str(path), "--jobs", jobs, "--format", "json")
    rows = [json.loads(x) for x in out.splitlines()]
    assert [r["status"] for r in rows] == ["proved", "refuted", "proved", "error"]
    assert code == 3


def test_transform_command(capsys, tmp_path):
    d = prove(F.parse("p -> p"), calculus("I")).derivation
    req = {"rule": "wk", "args": {"w": "w0", "forms": ["q^i"]}, "derivation": D.to_json(d), "logic": "I"}
    path = tmp_path / "req.json"
    path.write_text(json.dumps(req))
    code, out = call(capsys, "transform", str(path), "--format", "json")
    res = json.loads(out)
    assert code == 0 and res["reproved"] is False
    back = D.from_json(res["derivation"])
    assert D.check(back, calculus("I")) == []
    path.write_text(json.dumps({"derivation": res["derivation"], "logic": "I"}))
    assert call(capsys, "check", str(path))[0] == 0


def test_transform_invert(capsys, tmp_path):
    d = prove(F.parse("p & q -> q"), calculus("I")).derivation
    req = {"rule": "invert", "args": {"of": "imp_r", "w": "w0", "formula": "p & q -> q", "u": "w7"}, "derivation": D.to_json(d)}
    path = tmp_path / "req.json"
    path.write_text(json.dumps(req))
    code, out = call(capsys, "transform", str(path), "--logic", "I", "--format", "json")
    assert code == 0 and len(json.loads(out)["derivations"]) == 1


def test_oracle_command(capsys):
    code, out = call(capsys, "oracle", "--logic", "I", LIN, "--format", "json")
    assert code == 1 and json.loads(out)["found"]
    code, _ = call(capsys, "oracle", "--logic", "GD", LIN)
    assert code == 0


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "nestseq", "prove", "--logic", "GD", LIN], capture_output=True, text=True)
    assert r.returncode == 0 and "lin" in r.stdout
