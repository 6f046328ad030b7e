"""Report serialization: CSV, JSON and markdown over one row schema.

Every scalar is written exactly.  A decimal rendering of ``lower`` and
``upper`` is added only on request, as an extra column.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field

from . import __version__
from .scalars import parse_scalar

__all__ = ["COLUMNS", "REPORT_SCHEMA", "Report", "render", "write_atomic"]

REPORT_SCHEMA = "ergolab.report/1"
COLUMNS = ("task", "param", "lower", "upper", "exact", "steps", "certificate")


def _decimal(text: str, digits: int = 12) -> str:
    return f"{float(parse_scalar(text)):.{digits}g}"


@dataclass
class Report:
    """Ordered rows plus provenance.  Rows may carry a nested ``detail`` object (JSON only)."""

    provenance: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    decimal: bool = False

    def __post_init__(self):
        self.provenance = {"tool": f"ergolab {__version__}", **self.provenance}

    def add(self, row: dict, detail: dict | None = None):
        missing = [c for c in COLUMNS if c not in row]
        if missing:
            raise ValueError(f"row lacks columns {missing}")
        row = {c: str(row[c]) for c in COLUMNS}
        if detail is not None:
            row["detail"] = detail
        self.rows.append(row)

    def extend(self, rows):
        for r in rows:
            self.add(r)

    def _flat(self):
        cols = list(COLUMNS)
        if self.decimal:
            cols += ["lower_decimal", "upper_decimal"]
        out = []
        for r in self.rows:
            flat = {c: r[c] for c in COLUMNS}
            if self.decimal:
                flat["lower_decimal"] = _decimal(r["lower"])
                flat["upper_decimal"] = _decimal(r["upper"])
            out.append(flat)
        return cols, out

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.provenance.items():
            buf.write(f"# {k}: {v}\n")
        cols, rows = self._flat()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()

    def to_json(self) -> str:
        rows = []
        for r in self.rows:
            r = dict(r)
            if self.decimal:
                r["lower_decimal"] = _decimal(r["lower"])
                r["upper_decimal"] = _decimal(r["upper"])
            rows.append(r)
        doc = {"schema": REPORT_SCHEMA, "provenance": self.provenance, "rows": rows}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    def to_markdown(self) -> str:
        lines = [f"- {k}: `{v}`" for k, v in self.provenance.items()]
        cols, rows = self._flat()
        lines += ["", "| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        for r in rows:
            cells = [str(r[c]).replace("|", "\\|") for c in cols]
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"


def render(report: Report, fmt: str) -> str:
    if fmt == "csv":
        return report.to_csv()
    if fmt == "json":
        return report.to_json()
    if fmt in ("markdown", "md"):
        return report.to_markdown()
    raise ValueError(f"unknown format {fmt!r}")


def write_atomic(path: str, text: str):
    """Write through a temporary file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".ergolab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
