"""Tabular reports rendered as CSV, JSON or markdown."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .stats import render_decimal

PLACES = 5


def decimal_text(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return render_decimal(v)
    if isinstance(v, float):
        return f"{v:.{PLACES}f}"
    return str(v)


def json_cell(v: Any) -> Any:
    if isinstance(v, Fraction):
        return {"exact": f"{v.numerator}/{v.denominator}", "decimal": render_decimal(v)}
    if isinstance(v, float):
        return {"approx": v, "decimal": decimal_text(v)}
    if isinstance(v, (list, tuple)):
        return [json_cell(x) for x in v]
    return v


@dataclass
class Report:
    title: str
    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def add(self, **cells) -> None:
        unknown = set(cells) - set(self.columns)
        if unknown:
            raise KeyError(f"cells {sorted(unknown)} are not report columns")
        self.rows.append(cells)


def render(report: Report, fmt: str) -> bytes:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.columns)
        for row in report.rows:
            w.writerow([decimal_text(row.get(c)) for c in report.columns])
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        doc = {
            "title": report.title,
            "columns": report.columns,
            "rows": [{c: json_cell(row.get(c)) for c in report.columns} for row in report.rows],
            "meta": {k: json_cell(v) for k, v in report.meta.items()},
        }
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    if fmt == "markdown":
        lines = [f"**{report.title}**", ""]
        if report.meta:
            lines += [", ".join(f"{k}={decimal_text(v)}" for k, v in report.meta.items()), ""]
        lines.append("| " + " | ".join(report.columns) + " |")
        lines.append("|" + "|".join("---" for _ in report.columns) + "|")
        for row in report.rows:
            lines.append("| " + " | ".join(decimal_text(row.get(c)) for c in report.columns) + " |")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")
