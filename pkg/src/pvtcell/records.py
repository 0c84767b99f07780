"""CSV tables with a ``#`` metadata header, and run manifests.

Layout::

    # key: <json value>
    # ...
    col_a,col_b
    1,0.25

Cells are stored as text exactly as written, so parsing a file and
emitting it again reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

__all__ = ["CsvTable", "format_cell", "to_csv", "parse_csv", "manifest"]


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    try:
        return repr(float(value)) if hasattr(value, "dtype") else str(value)
    except (TypeError, ValueError):
        return str(value)


@dataclass
class CsvTable:
    columns: list
    rows: list  # lists of strings
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_records(cls, columns, records, meta=None) -> "CsvTable":
        rows = [[format_cell(r.get(c)) for c in columns] for r in records]
        return cls(list(columns), rows, dict(meta or {}))

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, row)) for row in self.rows]


def to_csv(table: CsvTable) -> str:
    buf = io.StringIO()
    for key, value in table.meta.items():
        if "\n" in key or ": " in key:
            raise ValueError(f"metadata key {key!r} is not representable")
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(table.columns)
    w.writerows(table.rows)
    return buf.getvalue()


def parse_csv(text: str) -> CsvTable:
    meta = {}
    lines = text.splitlines(keepends=True)
    i = 0
    while i < len(lines) and lines[i].startswith("# "):
        key, _, value = lines[i][2:].rstrip("\r\n").partition(": ")
        meta[key] = json.loads(value)
        i += 1
    reader = csv.reader(io.StringIO("".join(lines[i:]), newline=""))
    rows = list(reader)
    if not rows:
        raise ValueError("missing column header")
    return CsvTable(rows[0], rows[1:], meta)


def manifest(argv, params: dict, version: str, seed, started: str, finished: str,
             outputs: list) -> dict:
    """Everything needed to repeat a run: the command line, every resolved
    parameter, the tool version, the seed, timestamps and output paths."""
    return {
        "argv": list(argv),
        "parameters": params,
        "version": version,
        "seed": seed,
        "started": started,
        "finished": finished,
        "outputs": list(outputs),
    }
