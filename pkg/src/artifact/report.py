"""Uniform result record for every numerical check."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

__all__ = [
    "CheckReport",
    "identity_report",
    "inequality_report",
    "format_float",
    "to_jsonable",
    "dump_json",
    "reports_to_json",
    "reports_to_csv",
]

KEY_ORDER = ("id", "params", "lhs", "rhs", "abs_err", "rel_err", "pass", "diagnostics")


def format_float(x: float) -> str:
    """17-significant-digit text form used by every writer."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays and tuples to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return to_jsonable(obj.tolist())
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    return str(obj)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one check: both sides, their discrepancy and a verdict.

    For inequality checks ``lhs >= rhs`` is asserted; ``abs_err`` is then the
    size of the violation (zero when it holds) and the signed margin is kept
    in ``diagnostics``.
    """

    id: str
    params: dict
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    passed: bool
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        values = (
            self.id,
            to_jsonable(self.params),
            float(self.lhs),
            float(self.rhs),
            float(self.abs_err),
            float(self.rel_err),
            bool(self.passed),
            to_jsonable(self.diagnostics),
        )
        return dict(zip(KEY_ORDER, values))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), allow_nan=True)

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.id} lhs={format_float(self.lhs)} rhs={format_float(self.rhs)} rel_err={self.rel_err:.3e}"


def _rel(num: float, den: float) -> float:
    den = abs(den)
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return num / den


def identity_report(check_id: str, params: dict, lhs: float, rhs: float, rel_tol: float, abs_tol: float = 0.0, **diag):
    """Report for ``lhs == rhs`` within ``max(abs_tol, rel_tol |rhs|)``."""
    lhs, rhs = float(lhs), float(rhs)
    abs_err = abs(lhs - rhs)
    ok = bool(abs_err <= max(abs_tol, rel_tol * abs(rhs)))
    return CheckReport(check_id, params, lhs, rhs, abs_err, _rel(abs_err, rhs), ok, dict(diag, rel_tol=rel_tol))


def inequality_report(check_id: str, params: dict, lhs: float, rhs: float, rel_tol: float = 1e-10, **diag):
    """Report for ``lhs >= rhs`` up to ``rel_tol * max(|lhs|, |rhs|)``."""
    lhs, rhs = float(lhs), float(rhs)
    violation = max(0.0, rhs - lhs)
    scale = max(abs(lhs), abs(rhs))
    ok = bool(violation <= rel_tol * scale)
    diag = dict(diag, margin=lhs - rhs, ratio=lhs / rhs if rhs != 0 else math.inf, rel_tol=rel_tol)
    return CheckReport(check_id, params, lhs, rhs, violation, _rel(violation, rhs), ok, diag)


def dump_json(obj: Any) -> str:
    """Compact JSON with every float written by :func:`format_float`.

    Non-finite floats become the bare tokens ``NaN``/``Infinity``, as the
    stdlib encoder does.
    """
    obj = to_jsonable(obj)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, list):
        return "[" + ",".join(dump_json(v) for v in obj) + "]"
    return "{" + ",".join(json.dumps(k, ensure_ascii=False) + ":" + dump_json(v) for k, v in obj.items()) + "}"


def reports_to_json(reports) -> str:
    """One report object per line inside a JSON array; keys in :data:`KEY_ORDER`."""
    body = ",\n".join(dump_json(r.to_dict()) for r in reports)
    return "[\n" + body + "\n]\n" if body else "[]\n"


def reports_to_csv(reports) -> str:
    """Flat CSV; ``params`` and ``diagnostics`` are embedded as JSON text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(KEY_ORDER)
    for r in reports:
        d = r.to_dict()
        w.writerow([
            d["id"], dump_json(d["params"]), format_float(d["lhs"]), format_float(d["rhs"]),
            format_float(d["abs_err"]), format_float(d["rel_err"]), "true" if d["pass"] else "false",
            dump_json(d["diagnostics"]),
        ])
    return buf.getvalue()
