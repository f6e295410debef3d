import csv
import io
import json
import sqlite3
from fractions import Fraction

import pytest

from BisetSNDP.constants import CSV_COLUMNS
from BisetSNDP.output_formats import (
    format_ratio,
    render_dot,
    write_csv,
    write_dot,
    write_json_rows,
    write_jsonl,
    write_report_json,
    write_sqlite,
)


def row(seed):
    values = dict.fromkeys(CSV_COLUMNS, 0)
    values.update(seed=seed, family="grid", kind="EC", dual_lb="2/1", ratio_dual="1.000000")
    return values


@pytest.mark.parametrize(
    "num, den, expected",
    [
        (2, 2, "1.000000"),
        (3, Fraction(2), "1.500000"),
        (0, 0, "1.000000"),
        (4, 0, "inf"),
        (5, None, "-1"),
        (None, 3, "-1"),
    ],
)
def test_format_ratio(num, den, expected):
    assert format_ratio(num, den) == expected


def test_csv_has_fixed_header(tmp_path):
    path = str(tmp_path / "bench.csv")
    write_csv([row(1), row(2)], path)
    with open(path, encoding="utf-8") as f:
        lines = list(csv.reader(f))
    assert lines[0] == CSV_COLUMNS
    assert [line[0] for line in lines[1:]] == ["1", "2"]


def test_json_rows(tmp_path):
    path = str(tmp_path / "bench.json")
    write_json_rows([row(4)], path)
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    assert list(doc) == ["rows"]
    assert doc["rows"][0]["seed"] == 4
    assert sorted(doc["rows"][0]) == sorted(CSV_COLUMNS)


def test_sqlite_overwrites_existing_file(tmp_path):
    path = str(tmp_path / "bench.db")
    write_sqlite([row(1)], path)
    write_sqlite([row(1), row(2), row(3)], path)
    conn = sqlite3.connect(path)
    try:
        seeds = [r[0] for r in conn.execute("SELECT seed FROM bench ORDER BY seed")]
    finally:
        conn.close()
    assert seeds == ["1", "2", "3"]


def test_report_json_is_stable(tmp_path):
    path = str(tmp_path / "report.json")
    write_report_json({"b": 1, "a": [1, 2]}, path)
    with open(path, encoding="utf-8") as f:
        text = f.read()
    assert text.endswith("}\n")
    assert text.index('"a"') < text.index('"b"')


def test_jsonl_one_record_per_line(tmp_path):
    path = str(tmp_path / "audit.jsonl")
    write_jsonl([{"passed": True, "check": "x"}, {"check": "y", "passed": False}], path)
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    assert lines == ['{"check": "x", "passed": true}', '{"check": "y", "passed": false}']


def test_render_dot(square_elem):
    text = render_dot(square_elem, [0, 1, 2])
    assert text.startswith("graph G {\n")
    assert '  0 [label="0:0", style=filled];' in text
    assert '  1 [label="1:1", shape=box, style=filled];' in text
    assert '  3 [label="3:1", shape=box];' in text
    assert "  2 -- 3;" in text
    assert text.endswith("}\n")


def test_write_dot_to_stream(square_ec):
    buffer = io.StringIO()
    write_dot(square_ec, 0, buffer)
    assert "shape=box" not in buffer.getvalue()
    assert "style=filled" not in buffer.getvalue()
