"""Row schemas and CSV / JSON Lines encoding for reports.

Reals are written with 17 significant digits so every double survives a
round trip unchanged.  Column order is part of the output contract.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .bounds import BoundReport
from .identities import IdentityReport

FRAME_COLUMNS = ("a", "b", "x", "alpha", "function", "weight")

IDENTITY_COLUMNS = FRAME_COLUMNS + (
    "kind",
    "lhs",
    "term_main",
    "term_correction",
    "term_derivative",
    "residual",
    "quadrature_err",
    "tolerance",
    "note",
    "status",
)

BOUND_COLUMNS = FRAME_COLUMNS + (
    "M",
    "lhs",
    "A_paper",
    "A_corrected",
    "B",
    "rhs_closed_paper",
    "rhs_closed_corrected",
    "rhs_direct",
    "tightness",
    "degenerate",
    "asserted_bound",
    "quadrature_err",
    "tolerance",
    "note",
    "status",
)

SWEEP_COLUMNS = FRAME_COLUMNS + (
    "M",
    "lhs",
    "term_main",
    "term_correction",
    "term_derivative",
    "residual",
    "deviation",
    "A_paper",
    "A_corrected",
    "B",
    "rhs_closed_paper",
    "rhs_closed_corrected",
    "rhs_direct",
    "tightness",
    "degenerate",
    "asserted_bound",
    "identity_err",
    "bound_err",
    "identity_tolerance",
    "bound_tolerance",
    "note",
    "status",
)

ORACLE_COLUMNS = ("a", "b", "function", "weight", "mu", "value", "oracle", "difference", "quadrature_err", "tolerance", "note", "status")

TEXT_FIELDS = frozenset({"function", "weight", "kind", "asserted_bound", "note", "status"})
BOOL_FIELDS = frozenset({"degenerate"})


def _frame_fields(report):
    fr = report.frame
    return {"a": fr.a, "b": fr.b, "x": fr.x, "alpha": fr.alpha, "function": report.function, "weight": report.weight}


def identity_row(report: IdentityReport) -> dict:
    row = _frame_fields(report)
    row.update(report.terms())
    row.update(
        kind=report.kind,
        residual=report.residual,
        quadrature_err=report.quadrature_err,
        tolerance=report.tolerance,
        note=report.error or "",
        status=report.status,
    )
    return {k: row[k] for k in IDENTITY_COLUMNS}


def bound_row(report: BoundReport) -> dict:
    row = _frame_fields(report)
    for k in BOUND_COLUMNS:
        if k not in row and hasattr(report, k):
            row[k] = getattr(report, k)
    row["note"] = report.error or ("degenerate: zero kernel norm" if report.degenerate else "")
    return {k: row[k] for k in BOUND_COLUMNS}


def sweep_row(identity: IdentityReport, bound: BoundReport) -> dict:
    row = _frame_fields(identity)
    row.update(identity.terms())
    row.update(
        M=bound.M,
        residual=identity.residual,
        deviation=bound.lhs,
        identity_err=identity.quadrature_err,
        bound_err=bound.quadrature_err,
        identity_tolerance=identity.tolerance,
        bound_tolerance=bound.tolerance,
        note="; ".join(m for m in (identity.error, bound.error) if m),
        status="PASS" if identity.passed and bound.passed else "FAIL",
    )
    for k in ("A_paper", "A_corrected", "B", "rhs_closed_paper", "rhs_closed_corrected", "rhs_direct",
              "tightness", "degenerate", "asserted_bound"):
        row[k] = getattr(bound, k)
    return {k: row[k] for k in SWEEP_COLUMNS}


def report_row(report) -> dict:
    if isinstance(report, IdentityReport):
        return identity_row(report)
    if isinstance(report, BoundReport):
        return bound_row(report)
    if isinstance(report, dict):
        return report
    raise TypeError(f"cannot serialise {type(report).__name__}")


def format_real(v) -> str:
    return format(float(v), ".17g")


def _csv_cell(key, v):
    if key in BOOL_FIELDS:
        return "true" if v else "false"
    if key in TEXT_FIELDS:
        return str(v)
    return format_real(v)


def _json_value(key, v):
    if key in BOOL_FIELDS:
        return bool(v)
    if key in TEXT_FIELDS:
        return str(v)
    v = float(v)
    return v if math.isfinite(v) else None


def to_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(k, row[k]) for k in columns])
    return buf.getvalue()


def to_jsonl(rows, columns) -> str:
    lines = [json.dumps({k: _json_value(k, row[k]) for k in columns}) for row in rows]
    return "".join(line + "\n" for line in lines)


def serialize_report(report, fmt: str = "csv", header: bool = True) -> bytes:
    """Encode one report as CSV (optionally with header) or one JSON object."""
    row = report_row(report)
    columns = tuple(row)
    if fmt == "csv":
        text = to_csv([row], columns)
        if not header:
            text = text.split("\n", 1)[1]
        return text.encode()
    if fmt == "json":
        return to_jsonl([row], columns).encode()
    raise ValueError(f"unknown format {fmt!r}")


def _parse_cell(key, text):
    if key in BOOL_FIELDS:
        return text == "true"
    if key in TEXT_FIELDS:
        return text
    return float(text)


def parse_csv(data) -> list[dict]:
    if isinstance(data, bytes):
        data = data.decode()
    reader = csv.DictReader(io.StringIO(data))
    return [{k: _parse_cell(k, v) for k, v in row.items()} for row in reader]


def parse_jsonl(data) -> list[dict]:
    if isinstance(data, bytes):
        data = data.decode()
    out = []
    for line in data.splitlines():
        if line.strip():
            obj = json.loads(line)
            out.append({k: (float("nan") if v is None else v) for k, v in obj.items()})
    return out
