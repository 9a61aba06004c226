import json
import subprocess
import sys

import pytest

from fraisse_tower import io
from fraisse_tower.age import chain
from fraisse_tower.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_limit_build(capsys, tmp_path):
    code, out, _ = run(["limit", "build", "--age", "linorders", "--steps", "200"], capsys)
    data = json.loads(out)
    assert code == 0 and data["steps"] == 200
    assert io.decode(data["stage"]).universe
    dot = tmp_path / "s.dot"
    run(["limit", "build", "--age", "graphs", "--steps", "20", "--dot", str(dot)], capsys)
    assert dot.read_text().startswith("digraph")


def test_build_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["tower", "build", "--notation", "s(1)", "--steps", "60",
                     "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_tower_build_and_validate(tmp_path, capsys):
    level = tmp_path / "level.json"
    assert main(["tower", "build", "--notation", "s(1)", "--steps", "100",
                 "--out", str(level)]) == 0
    assert json.loads(level.read_text())["violations"] == []
    code, out, _ = run(["tower", "validate", "--level", str(level),
                        "--structure", str(level)], capsys)
    assert code == 0 and json.loads(out)["valid"]
    data = json.loads(level.read_text())
    stage = data["stage"]
    assert len(stage["relations"]["U[s(1)]"]) >= 2
    del stage["relations"]["<[s(1)]"]
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(stage))
    code, out, _ = run(["tower", "validate", "--level", str(level),
                        "--structure", str(broken)], capsys)
    assert code == 1 and not json.loads(out)["valid"]


def test_scott_check_exit_codes(tmp_path, capsys):
    A, B, C = tmp_path / "A.json", tmp_path / "B.json", tmp_path / "C.json"
    A.write_text(io.dumps(chain(2)))
    B.write_text(io.dumps(chain(3)))
    C.write_text(io.dumps(chain(2, [4, 8])))
    code, out, _ = run(["scott", "check", "--base", str(A), "--candidate", str(B)], capsys)
    assert code == 1 and not json.loads(out)["expandable"]
    code, out, _ = run(["scott", "check", "--base", str(A), "--candidate", str(C)], capsys)
    assert code == 0 and json.loads(out)["witness"]["P<0,1>"] == [[4, 8]]


def test_diagonal_run(tmp_path, capsys):
    trace = tmp_path / "t.json"
    trace.write_text(json.dumps({"events": [{"stage": 5, "e": 0, "i": 0, "j": 1,
                                             "f": [[0, 0], [1, 1]]}]}))
    code, out, _ = run(["diagonal", "run", "--trace", str(trace), "--requirements", "2",
                        "--stages", "10"], capsys)
    data = json.loads(out)
    assert code == 0 and data["verified"]
    assert [r["in_trace"] for r in data["requirements"]] == [True, False]


def test_age_check_and_homog(capsys):
    code, out, _ = run(["age", "check", "--age", "broken-linorders", "--size-bound", "3",
                        "--index-bound", "6"], capsys)
    assert code == 1 and json.loads(out.splitlines()[0])["axiom"] == "HP"
    code, out, _ = run(["age", "check", "--age", "kb", "--size-bound", "2",
                        "--index-bound", "10"], capsys)
    assert code == 0
    code, out, _ = run(["limit", "homog", "--age", "graphs", "--steps", "100",
                        "--map", "0:3,1:5", "--extend", "7"], capsys)
    assert code in (0, 1) and "partial_iso" in json.loads(out)


def test_notation(capsys):
    code, out, _ = run(["notation", "lim(omega)", "--compare", "s(1)", "--term", "2"], capsys)
    data = json.loads(out)
    assert code == 0 and data["compare"] == "greater" and data["term"] == "s(s(1))"


@pytest.mark.parametrize("argv", [[], ["bogus"], ["limit", "build"],
                                  ["limit", "build", "--age", "nope"],
                                  ["notation", "s(1"],
                                  ["limit", "build", "--age", "linorders", "--cap", "0"]])
def test_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "fraisse_tower.cli", "notation", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["value"] == "0"
