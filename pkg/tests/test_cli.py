import csv
import json

import pytest

from BisetSNDP.cli import run
from BisetSNDP.constants import EXIT_INFEASIBLE, EXIT_INTERNAL, EXIT_OK, THREADS_ENV_VAR
from BisetSNDP.graph import save

from .conftest import SQUARE_EDGES, make_instance


@pytest.fixture
def square_file(tmp_path):
    path = str(tmp_path / "square.json")
    save(make_instance(4, SQUARE_EDGES, [0, 1, 0, 1], [(0, 2, 2)], kind="EC"), path)
    return path


def test_gen_writes_instance(tmp_path, capsys):
    out = tmp_path / "inst.json"
    args = ["gen", "--family", "grid", "--n", "9", "--demands", "2", "--kmax", "2", "--seed", "3"]
    code = run(args + ["--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["n"] == 9
    assert "Generated grid instance" in capsys.readouterr().out


def test_solve_prints_summary(square_file, tmp_path, capsys):
    report = tmp_path / "report.json"
    trace = tmp_path / "trace.jsonl"
    assert run(["solve", "--in", square_file, "--out", str(report), "--trace", str(trace)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "weight=2 dual_lb=2/1 ratio_vs_dual=1.000000" in out
    assert json.loads(report.read_text(encoding="utf-8"))["solution"] == [0, 1, 2, 3]
    assert len(trace.read_text(encoding="utf-8").splitlines()) == 2


def test_solve_infeasible_exit_code(tmp_path, capsys):
    path = str(tmp_path / "path.json")
    save(make_instance(3, [(0, 1), (1, 2)], [0, 1, 0], [(0, 2, 2)], kind="EC"), path)
    assert run(["solve", "--in", path]) == EXIT_INFEASIBLE
    assert "pair (0,2) requires 2, graph allows 1" in capsys.readouterr().out


def test_solve_invalid_instance(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert run(["solve", "--in", str(path)]) == EXIT_INTERNAL
    assert "Invalid instance" in capsys.readouterr().out


def test_audit_shows_trees(square_file, tmp_path, capsys):
    records = tmp_path / "audit.jsonl"
    assert run(["audit", "--in", square_file, "--report", str(records), "--show-trees"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "(root)" in out
    assert "0 failed" in out
    lines = [json.loads(line) for line in records.read_text(encoding="utf-8").splitlines()]
    assert lines and all(line["passed"] for line in lines)


def test_bench_csv(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(THREADS_ENV_VAR, "1")
    out = tmp_path / "bench.csv"
    args = ["bench", "--seeds", "1..2", "--family", "grid", "--kind", "EC", "--n", "4"]
    args += ["--demands", "1", "--kmax", "1", "--exact", "--out", str(out)]
    assert run(args) == EXIT_OK
    with open(out, encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert [row["seed"] for row in rows] == ["1", "2"]
    assert all(row["audit_pass"] == "1" for row in rows)
    assert "Bench finished: 2 rows" in capsys.readouterr().out


def test_bench_bad_seeds(tmp_path, capsys):
    assert run(["bench", "--seeds", "9..1", "--out", str(tmp_path / "x.csv")]) == EXIT_INTERNAL
    assert "--seeds must look like A..B" in capsys.readouterr().out


def test_bench_bad_threads(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(THREADS_ENV_VAR, "zero")
    assert run(["bench", "--seeds", "1..2", "--out", str(tmp_path / "x.csv")]) == EXIT_INTERNAL
    assert "got 'zero'" in capsys.readouterr().out


def test_export_dot_solves_on_the_fly(square_file, tmp_path):
    out = tmp_path / "square.dot"
    assert run(["export-dot", "--in", square_file, "--out", str(out)]) == EXIT_OK
    text = out.read_text(encoding="utf-8")
    assert text.startswith("graph G {")
    assert text.count("style=filled") == 4


def test_export_dot_with_solution(square_file, tmp_path):
    solution = tmp_path / "report.json"
    solution.write_text(json.dumps({"solution": [0, 2]}), encoding="utf-8")
    out = tmp_path / "square.dot"
    assert run(["export-dot", "--in", square_file, "--solution", str(solution), "--out", str(out)]) == EXIT_OK
    assert out.read_text(encoding="utf-8").count("style=filled") == 2

    solution.write_text(json.dumps({"solution": [9]}), encoding="utf-8")
    assert run(["export-dot", "--in", square_file, "--solution", str(solution), "--out", str(out)]) == EXIT_INTERNAL


def test_missing_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        run([])
    assert info.value.code == 2


def test_solve_with_exact_and_audit(square_file, tmp_path, capsys):
    report = tmp_path / "report.json"
    assert run(["solve", "--in", square_file, "--exact", "--audit", "--out", str(report)]) == EXIT_OK
    doc = json.loads(report.read_text(encoding="utf-8"))
    assert doc["exact_bound"] == 2
    assert doc["ratio_certificate"] == "1/2"
    assert doc["audit_flags"]["solution_feasible"] is True
    assert "0 failed" in capsys.readouterr().out
