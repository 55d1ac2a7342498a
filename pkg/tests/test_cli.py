import json
import shutil
import subprocess
import sys

import pytest

from disjcalc.cli import run
from disjcalc.hodisj import dual_numbers, nonassociative_sample


def test_basis_counts(capsys):
    assert run(["basis", "--space", "sierpinski", "--arity", "2", "--weight", "1"]) == 0
    assert "5 ordered families / 3 reduced" in capsys.readouterr().out


def test_koszul_check_single(tmp_path, capsys):
    out = tmp_path / "k.json"
    code = run(["koszul-check", "--space", "sierpinski", "--output", "{1,2}", "--inputs", "∅,{1}",
                "--report", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["passed"] and rep["rows"][0]["ranks"] == {"0": 1}
    assert "{0:1, else 0}" in capsys.readouterr().out


def test_koszul_check_csv(tmp_path):
    out = tmp_path / "k.csv"
    assert run(["koszul-check", "--space", "sierpinski", "--max-arity", "2", "--format", "csv",
                "--report", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "output,inputs,degree,rank" and len(lines) > 5
    import csv
    rows = list(csv.DictReader(lines))
    assert all(len(r) == 4 and None not in r for r in rows)
    assert {"output": "{1,2}", "inputs": "{} {1}", "degree": "0", "rank": "1"} in rows
    assert {"output": "{}", "inputs": "{1,2}", "degree": "", "rank": "0"} in rows


def test_diff_and_coprod(capsys):
    assert run(["diff", "--family", "[({}<{1}<{1,2})]"]) == 0
    assert "({}<{1,2})" in capsys.readouterr().out
    assert run(["coprod", "--family", "[({}<{1}<{1,2})]"]) == 0
    assert run(["coprod", "--family", "[({}<{1}),({})]", "--full"]) == 0


def test_normal_form(tmp_path, capsys):
    tree = {"ext": [[1], [1, 2]], "children": [{"ext": [[], [1]], "children": [{"leaf": 1, "color": []}]}]}
    p = tmp_path / "t.json"
    p.write_text(json.dumps(tree))
    code = run(["normal-form", "--tree", str(p)])
    out = capsys.readouterr()
    assert code == 0, out.err
    assert "m^{1,2}_({})" in out.out


def test_suites_pass():
    assert run(["check-ql", "--space", "sierpinski"]) == 0
    assert run(["verify-cooperad", "--space", "sierpinski", "--weight", "3"]) == 0
    assert run(["check-algebra", "--space", "pseudo_line", "--algebra", "dual_numbers"]) == 0
    assert run(["specialize", "--space", "point", "--algebra", "dual_numbers"]) == 0
    assert run(["transfer", "--space", "sierpinski", "--demo", "--seed", "3"]) == 0


def test_ce_demo_cli(tmp_path, capsys):
    out = tmp_path / "ce.json"
    assert run(["ce-demo", "--lie", "heisenberg", "--weight", "2", "--report", str(out)]) == 0
    assert "x·y = sym(xy) + 1/2 z" in capsys.readouterr().out
    assert "x·y = sym(xy) + 1/2 z" in json.loads(out.read_text())["lines"]


def test_failing_check_exits_1_and_writes_report(tmp_path):
    alg = tmp_path / "a.json"
    alg.write_text(json.dumps(nonassociative_sample().to_json()))
    out = tmp_path / "r.json"
    code = run(["check-algebra", "--space", "empty", "--algebra", str(alg), "--report", str(out)])
    assert code == 1
    rep = json.loads(out.read_text())
    assert rep["passed"] is False and rep["violations"]
    assert "family" in rep["violations"][0]


def test_malformed_json_exits_2_with_path(tmp_path, capsys):
    bad = tmp_path / "s.json"
    bad.write_text(json.dumps({"points": [1, 2], "opens": [[], [1], [3]]}))
    assert run(["check-ql", "--space", str(bad)]) == 2
    assert "$.opens" in capsys.readouterr().err

    alg = dual_numbers().to_json()
    alg["mult"][0]["x"] = "nope"
    p = tmp_path / "a.json"
    p.write_text(json.dumps(alg))
    assert run(["check-algebra", "--space", "sierpinski", "--algebra", str(p)]) == 2
    assert "$.mult[0]" in capsys.readouterr().err

    missing = tmp_path / "nothere.json"
    assert run(["check-algebra", "--space", "sierpinski", "--algebra", str(missing)]) == 2


def test_malformed_retraction(tmp_path, capsys):
    r = {"opens": {"{9}": {"small": {"basis": [], "d": {}}}}}
    p = tmp_path / "r.json"
    p.write_text(json.dumps(r))
    assert run(["transfer", "--space", "sierpinski", "--algebra", "unit", "--retraction", str(p)]) == 2
    assert "$.opens.{9}" in capsys.readouterr().err


def test_bad_bound_rejected():
    with pytest.raises(SystemExit) as e:
        run(["check-ql", "--space", "sierpinski", "--weight", "0"])
    assert e.value.code == 2


def test_reports_are_deterministic(tmp_path):
    outs = []
    for n in range(2):
        p = tmp_path / f"r{n}.json"
        assert run(["transfer", "--space", "sierpinski", "--demo", "--seed", "5", "--report", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_export_dot(tmp_path):
    p = tmp_path / "e.dot"
    assert run(["export-dot", "--output", "{1,2}", "--inputs", "{1},∅", "--report", str(p)]) == 0
    assert p.read_text().startswith("digraph")


@pytest.mark.skipif(shutil.which("disjcalc") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["disjcalc", "basis", "--space", "sierpinski", "--arity", "2", "--weight", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "3 reduced" in r.stdout


def test_module_entry():
    r = subprocess.run([sys.executable, "-m", "disjcalc.cli", "check-ql", "--space", "empty"],
                       capture_output=True, text=True)
    assert r.returncode == 0
