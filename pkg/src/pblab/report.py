"""Experiment reports and their deterministic CSV/JSON serialization.

Floats are always written as ``%.16e`` (17 significant digits, scientific
notation, ``.`` decimal separator) and files use ``\\n`` line endings, so equal
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import numbers
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

__all__ = ["Assertion", "Table", "ExperimentReport", "emit_report", "format_float", "to_json"]


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return f"{x:.16e}"


@dataclass
class Assertion:
    """One checked property: ``value`` compared against ``bound``.

    ``bound`` is None for informational rows, which always pass.
    """

    name: str
    value: float
    bound: Optional[float]
    comparison: str
    ref: str
    passed: bool = field(init=False)

    def __post_init__(self):
        v = float(self.value)
        if self.bound is None:
            self.passed = True
        elif self.comparison == "<":
            self.passed = v < self.bound
        elif self.comparison == "<=":
            self.passed = v <= self.bound
        elif self.comparison == ">":
            self.passed = v > self.bound
        elif self.comparison == ">=":
            self.passed = v >= self.bound
        elif self.comparison == "==":
            self.passed = v == self.bound
        else:
            raise ValueError(f"unknown comparison {self.comparison!r}")


@dataclass
class Table:
    columns: Sequence[str]
    rows: List[Sequence[Any]]


@dataclass
class ExperimentReport:
    suite: str
    assertions: List[Assertion] = field(default_factory=list)
    tables: Dict[str, Table] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def check(self, name, value, bound, comparison="<", ref=""):
        self.assertions.append(Assertion(name, float(value), None if bound is None else float(bound), comparison, ref))

    def info(self, name, value, ref=""):
        self.check(name, value, None, "<", ref)

    def table(self, name, columns, rows):
        self.tables[name] = Table(list(columns), [list(r) for r in rows])

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def failures(self) -> List[Assertion]:
        return [a for a in self.assertions if not a.passed]

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "assertions": [
                {
                    "name": a.name,
                    "value": a.value,
                    "bound": a.bound,
                    "comparison": a.comparison,
                    "ref": a.ref,
                    "passed": a.passed,
                }
                for a in self.assertions
            ],
            "tables": {k: {"columns": list(t.columns), "rows": t.rows} for k, t in self.tables.items()},
            "notes": list(self.notes),
            "provenance": self.provenance,
        }


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        return format_float(v)
    if v is None:
        return ""
    return str(v)


def _json_value(v, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        x = float(v)
        # JSON has no non-finite numbers
        return format_float(x) if math.isfinite(x) else json.dumps(format_float(x))
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=True)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v[k], indent, level + 1)}" for k in sorted(v)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple)) for x in v):
            return "[" + ", ".join(_json_value(x, indent, level + 1) for x in v) + "]"
        items = [pad + _json_value(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(obj, indent: int = 1) -> str:
    """Sorted-key JSON with fixed float formatting."""
    return _json_value(obj, indent, 0) + "\n"


def _write(path: Path, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report file: {exc.strerror}", str(path)) from exc


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def emit_report(report: ExperimentReport, out_dir, fmt: str = "csv") -> List[Path]:
    """Write ``report`` under ``out_dir`` and return the written paths.

    ``csv``: ``assertions.csv`` plus one ``<table>.csv`` per table and ``provenance.json``.
    ``json``: a single ``report.json``.
    """
    out = Path(out_dir)
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create output directory: {exc.strerror}", str(out)) from exc
    paths = []
    if fmt == "json":
        p = out / "report.json"
        _write(p, to_json(report.to_dict()))
        return [p]
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    rows = [[a.name, a.value, a.bound, a.comparison, a.passed, a.ref] for a in report.assertions]
    p = out / "assertions.csv"
    _write(p, _csv_text(["name", "value", "bound", "comparison", "passed", "ref"], rows))
    paths.append(p)
    for name in sorted(report.tables):
        t = report.tables[name]
        p = out / f"{name}.csv"
        _write(p, _csv_text(t.columns, t.rows))
        paths.append(p)
    p = out / "provenance.json"
    _write(p, to_json({"suite": report.suite, "notes": report.notes, "provenance": report.provenance}))
    paths.append(p)
    return paths
