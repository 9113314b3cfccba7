"""Tabular output: delimiter-separated values with a ``#`` metadata header,
or JSON records.

A DSV file looks like::

    # command: table
    # trsd: 0.2
    count,rsd_pct,...
    1,101.98,...

Floats are written with a fixed number of significant digits, so parsing
the file back reproduces the values to that precision.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

__all__ = ["OutputRecord", "format_value"]

PRECISION = 6


def format_value(v, precision: int = PRECISION) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.{precision}g}"
    return str(v)


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


@dataclass
class OutputRecord:
    command: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def to_dsv(self, delimiter: str = ",", precision: int = PRECISION) -> str:
        buf = io.StringIO()
        buf.write(f"# command: {self.command}\n")
        for key, value in self.meta.items():
            buf.write(f"# {key}: {format_value(value, precision)}\n")
        writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(v, precision) for v in row])
        return buf.getvalue()

    def to_records(self) -> str:
        payload = {
            "command": self.command,
            "meta": self.meta,
            "columns": self.columns,
            "records": [dict(zip(self.columns, row)) for row in self.rows],
        }
        return json.dumps(payload, indent=2, default=str) + "\n"

    def render(self, fmt: str = "dsv") -> str:
        return self.to_records() if fmt == "records" else self.to_dsv()

    @classmethod
    def from_dsv(cls, text: str, delimiter: str = ",") -> "OutputRecord":
        meta = {}
        command = ""
        body = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(":")
                value = value.strip()
                if key == "command":
                    command = value
                else:
                    meta[key] = _parse_value(value)
            elif line.strip():
                body.append(line)
        reader = csv.reader(body, delimiter=delimiter)
        columns = next(reader, [])
        rows = [tuple(_parse_value(v) for v in r) for r in reader]
        return cls(command, list(columns), rows, meta)

    @classmethod
    def from_records(cls, text: str) -> "OutputRecord":
        payload = json.loads(text)
        recs = payload["records"]
        columns = list(payload["columns"])
        rows = [tuple(r[c] for c in columns) for r in recs]
        return cls(payload["command"], columns, rows, payload["meta"])
