"""
Writers for solve reports, audit records, bench rows and DOT drawings.
"""

import csv
import json
import os
import sqlite3
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, TextIO, Union

from .constants import CSV_COLUMNS
from .graph import Instance, VertexSet, as_mask


def format_ratio(numerator: Optional[Union[int, Fraction]], denominator: Optional[Union[int, Fraction]]) -> str:
    """Six decimals; -1 when not computed, inf for x/0 with x > 0, 1 for 0/0."""
    if numerator is None or denominator is None:
        return "-1"
    if denominator == 0:
        return "1.000000" if numerator == 0 else "inf"
    return f"{float(Fraction(numerator) / Fraction(denominator)):.6f}"


def write_report_json(report: Dict[str, Any], output_path: str) -> str:
    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    return output_path


def write_jsonl(records: Iterable[Dict[str, Any]], output_path: str) -> str:
    """One JSON object per line, keys sorted so equal runs give equal bytes."""
    with open(output_path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True) + "\n")
    return output_path


def write_csv(rows: List[Dict[str, Any]], output_path: str) -> str:
    with open(output_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row[c] for c in CSV_COLUMNS})
    return output_path


def write_json_rows(rows: List[Dict[str, Any]], output_path: str) -> str:
    return write_report_json({"rows": [{c: row[c] for c in CSV_COLUMNS} for row in rows]}, output_path)


def write_sqlite(rows: List[Dict[str, Any]], output_path: str) -> str:
    """Bench rows as a `bench` table, one row per seed."""
    if os.path.exists(output_path):
        os.remove(output_path)

    conn = sqlite3.connect(output_path)
    cursor = conn.cursor()
    cursor.execute(f"CREATE TABLE bench ({', '.join(f'{c} TEXT NOT NULL' for c in CSV_COLUMNS)})")
    placeholders = ", ".join("?" for _ in CSV_COLUMNS)
    for row in rows:
        cursor.execute(
            f"INSERT INTO bench ({', '.join(CSV_COLUMNS)}) VALUES ({placeholders})",
            tuple(str(row[c]) for c in CSV_COLUMNS),
        )
    conn.commit()
    conn.close()
    return output_path


def render_dot(inst: Instance, solution: VertexSet = 0) -> str:
    """Vertices labelled id:weight; non-reliable vertices are boxes, chosen ones filled."""
    g = inst.graph
    chosen = as_mask(solution)
    lines = ["graph G {"]
    for v in range(g.n):
        attrs = [f'label="{v}:{g.weights[v]}"']
        if not g.reliable[v]:
            attrs.append("shape=box")
        if (chosen >> v) & 1:
            attrs.append("style=filled")
        lines.append(f"  {v} [{', '.join(attrs)}];")
    for u, v in g.edges:
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(inst: Instance, solution: VertexSet, output: Union[str, TextIO]) -> str:
    text = render_dot(inst, solution)
    if isinstance(output, str):
        with open(output, "w", encoding="utf-8") as f:
            f.write(text)
        return output
    output.write(text)
    return getattr(output, "name", "<stream>")


WRITERS = {"csv": write_csv, "json": write_json_rows, "sqlite": write_sqlite}
