import json
import re

import pytest

from helpers import DATA
from matchkit.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def ex(i):
    return DATA / f"example{i}.sr"


def test_solve_sr(capsys):
    assert run(capsys, "solve-sr", ex(1)) == (0, "1-3 2-4\n", "")
    code, out, _ = run(capsys, "solve-sr", ex(3), "--json")
    assert code == 0
    assert json.loads(out) == {"command": "solve-sr", "status": "stable", "matching": [[1, 4], [2, 3], [5, 6]]}
    code, out, _ = run(capsys, "solve-sr", ex(4))
    assert code == 1 and out.strip() == "NO STABLE MATCHING"


def test_solve_sr_trace_lists_eliminations_in_order(capsys):
    code, out, _ = run(capsys, "solve-sr", ex(3), "--policy", "highest", "--trace")
    assert code == 0 and out.splitlines()[-1] == "1-2 3-6 4-5"
    assert [line.split()[4] for line in out.splitlines()[:-1]] == ["(6,2,5)", "(4,3,1)", "(3,1,5)"]
    code, out, _ = run(capsys, "solve-sr", ex(3), "--policy", "highest", "--trace", "--full-rotations")
    assert out.index("(1,f),(6,b),(3,e)") < out.index("(2,d),(4,c),(5,a)") < out.index("(2,c),(4,a),(6,e)")


def test_solve_sm_and_gaps(capsys):
    assert run(capsys, "solve-sm", ex(2))[1] == "1-b 2-c 3-d 4-a\n"
    assert run(capsys, "solve-sm", ex(2), "--numeric")[1] == "1-2 2-3 3-4 4-1\n"
    code, out, _ = run(capsys, "gaps", ex(2), "--json")
    assert json.loads(out) == {"command": "gaps", "table": "original", "gaps": [2, 1, 2, 1], "total": 6}


def test_rotations_and_poset_dot(capsys):
    code, out, _ = run(capsys, "rotations", ex(5))
    assert code == 0 and len(out.splitlines()) == 12
    assert "(1,7)  dual" in out
    code, out, _ = run(capsys, "poset", ex(6), "--dot")
    assert code == 0 and out.startswith("digraph")
    assert len(re.findall(r'^\s*"r\d+" \[label=', out, re.M)) == 14


def test_halfcut(capsys):
    code, out, _ = run(capsys, "halfcut", ex(6), "--pick", "(3,4)", "--json")
    rec = json.loads(out)
    assert rec["forced"] == ["(8,2)", "(2,3,6)"] and rec["prohibited"] == [["(8,9)", "(4,7,10)"]]
    code, out, _ = run(capsys, "halfcut", ex(6), "--pick", "(10,2)")
    assert code == 0 and "prohibited: {(2,1),(4,7,10)} {(10,3),(6,2)}" in out
    code, out, _ = run(capsys, "halfcut", ex(6), "--all-picks")
    assert code == 0 and out


def test_reduce_writes_instance(capsys, tmp_path):
    target = tmp_path / "r6.smi"
    code, out, _ = run(capsys, "reduce", ex(6), "--pick", "(3,4)", "-o", target)
    assert code == 0 and "9 stable matchings -> 7 roommate matchings" in out
    code, out, _ = run(capsys, "enumerate", target, "--bound", 10)
    assert code == 0 and len(out.splitlines()) == 9


def test_reduce_multiple_pairs_exit_3(capsys):
    code, _, err = run(capsys, "reduce", ex(6), "--pick", "(10,2)")
    assert code == 3 and "2 prohibited pairs" in err


def test_enumerate_vias_agree(capsys):
    outs = {}
    for via in ("oracle", "xor", "reduction"):
        code, outs[via], _ = run(capsys, "enumerate", ex(6), "--via", via)
        assert code == 0
    assert outs["oracle"] == outs["xor"] == outs["reduction"]
    assert len(outs["oracle"].splitlines()) == 7
    code, out, _ = run(capsys, "enumerate", ex(4), "--via", "xor")
    assert code == 1


def test_enumerate_bound(capsys):
    code, _, err = run(capsys, "enumerate", ex(6), "--bound", 8)
    assert code == 2 and err.startswith("matchkit:")


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", ex(1), "--matching", "1-3 2-4", "--json")
    assert code == 0 and json.loads(out)["stable"] is True
    code, out, _ = run(capsys, "verify", ex(1), "--matching", "1-2 3-4")
    assert code == 1


def test_input_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.sr"
    bad.write_text("sr 3\n1: 2 3\n2: 1 3\n3: 1 2\n")
    code, _, err = run(capsys, "solve-sr", bad)
    assert code == 2 and "line 1" in err
    assert run(capsys, "solve-sr", tmp_path / "missing.sr")[0] == 2
    assert run(capsys, "halfcut", ex(6), "--pick", "(1,2,3)")[0] == 2
    with pytest.raises(SystemExit) as stop:
        main(["solve-sr"])
    assert stop.value.code == 2
