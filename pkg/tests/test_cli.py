from __future__ import annotations

import json

import pytest

from tracerefine.cli import run
from tracerefine.history import history_to_json
from tracerefine.repro import SCENARIOS

from conftest import sc2_schedule_history


def cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_refine_sc_stack_fails(capsys):
    code, out, _ = cli(capsys, "refine", "--program", "sc2", "--abstract", "atomic-stack", "--concrete", "sc-stack")
    assert code == 1
    assert "<(0,0,0), (1,0,0), (1,0,1), (1,2,1)>" in out


def test_refine_treiber_holds(capsys):
    code, out, _ = cli(capsys, "refine", "--program", "sc2", "--abstract", "atomic-stack", "--concrete", "treiber")
    assert code == 0 and "holds" in out


def test_refine_json(capsys):
    code, out, _ = cli(capsys, "refine", "--program", "sc2", "--concrete", "sc-stack", "--json")
    assert code == 1
    assert json.loads(out)["counterexample"] == [[0, 0, 0], [1, 0, 0], [1, 0, 1], [1, 2, 1]]


def test_refine_final_mode(capsys):
    code, _, _ = cli(capsys, "refine", "--program", "sc2", "--concrete", "sc-stack", "--mode", "final")
    assert code == 0


def test_check_empty_history(capsys, tmp_path):
    f = tmp_path / "empty.json"
    f.write_text("[]")
    code, _, _ = cli(capsys, "check", "--mode", "lin", "--spec", "stack", "--history", str(f))
    assert code == 0


@pytest.mark.parametrize("mode, want", [("lin", 1), ("sc", 0)])
def test_check_sc2_history(capsys, tmp_path, mode, want):
    f = tmp_path / "h.json"
    f.write_text(json.dumps(history_to_json(sc2_schedule_history())))
    code, out, _ = cli(capsys, "check", "--mode", mode, "--history", str(f), "--json")
    assert code == want
    assert set(json.loads(out)) == {"holds", "witness", "note"}


def test_check_bad_file(capsys, tmp_path):
    f = tmp_path / "h.json"
    f.write_text('[{"kind": "inv", "thread": 1, "op": "pop", "bogus": 0}]')
    code, _, err = cli(capsys, "check", "--history", str(f))
    assert code == 2 and "unknown field" in err


def test_check_missing_file(capsys):
    code, _, err = cli(capsys, "check", "--history", "/nonexistent.json")
    assert code == 2 and "error" in err


def test_explore(capsys):
    code, out, _ = cli(capsys, "explore", "--program", "example1", "--object", "atomic-stack", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["variables"] == ["x", "y", "z"] and len(data["traces"]) == 9


def test_explore_dsl_file(capsys, tmp_path):
    f = tmp_path / "p.dsl"
    f.write_text("init x=0; thread 1 { x := s.pop(); }")
    code, out, _ = cli(capsys, "explore", "--program", str(f), "--json")
    assert code == 0 and json.loads(out)["finals"] == [["empty"]]


def test_parse_error_exit_code(capsys, tmp_path):
    f = tmp_path / "p.dsl"
    f.write_text("init x=0; thread 1 { x := y; }")
    code, _, err = cli(capsys, "explore", "--program", str(f))
    assert code == 2 and "undeclared" in err


def test_budget_error(capsys):
    code, _, err = cli(capsys, "explore", "--program", "sc2", "--object", "treiber", "--budget", "10")
    assert code == 2 and "budget exceeded" in err


def test_unknown_flag(capsys):
    code, _, err = cli(capsys, "refine", "--frobnicate")
    assert code == 2 and "usage" in err


def test_unknown_selector(capsys):
    code, _, _ = cli(capsys, "explore", "--program", "sc2", "--object", "lock-stack")
    assert code == 2


@pytest.mark.parametrize("name", list(SCENARIOS))
def test_repro_deterministic(capsys, name):
    first = cli(capsys, "repro", name)
    second = cli(capsys, "repro", name)
    assert first == second and first[0] == 0
    code, out, _ = cli(capsys, "repro", name, "--json")
    assert code == 0 and json.loads(out)["reproduced"] is True
