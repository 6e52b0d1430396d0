"""CSV ingestion, series transforms and report emission.

Input CSV: UTF-8, comma-separated, optional header row, one numeric
observation per row (or a named/indexed column).  Reports are emitted as JSON
or CSV with numbers rounded to 6 significant digits; the study CSV header is
fixed: ``scenario_d,phi,theta,method,mean_estimate,ci_lo,ci_hi,coverage,n_replicates``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..baselines import DiagnosticsReport
from ..errors import DomainError, InvalidInputError
from ..spectral import TimeSeries

SCHEMA_VERSION = "1"
STUDY_CSV_HEADER = (
    "scenario_d,phi,theta,method,mean_estimate,ci_lo,ci_hi,coverage,n_replicates"
)


@dataclass(frozen=True)
class EstimateReport:
    """One method's point estimate and 95% interval for a single series."""

    method: str
    d_point: float
    d_low: float
    d_high: float
    n: int
    m: int
    K: int
    ell: int
    seed: int | None
    runtime_seconds: float
    extra: dict = field(default_factory=dict)


def ingest_csv(path, column=None) -> TimeSeries:
    """Read one numeric column into a TimeSeries, preserving file order.

    ``column`` may be a 0-based index or a header name; by default the first
    column is used (with an optional header row auto-skipped).  Any missing or
    non-numeric cell aborts with the offending row number (1-based, header
    included).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise InvalidInputError(f"{path}: file holds no data rows")

    col_idx = 0
    start = 0
    header = rows[0]
    if isinstance(column, str):
        names = [cell.strip() for cell in header]
        if column not in names:
            raise InvalidInputError(f"{path}: no column named {column!r} in header {names}")
        col_idx = names.index(column)
        start = 1
    else:
        if column is not None:
            col_idx = int(column)
        if not _is_number(header[min(col_idx, len(header) - 1)]):
            start = 1  # header row

    values = []
    for i, row in enumerate(rows[start:], start=start + 1):
        if col_idx >= len(row):
            raise InvalidInputError(f"{path}: row {i} has no column {col_idx}")
        cell = row[col_idx].strip()
        if not _is_number(cell):
            raise InvalidInputError(
                f"{path}: row {i} holds a non-numeric or missing value {cell!r}"
            )
        values.append(float(cell))
    if not values:
        raise InvalidInputError(f"{path}: selected column is empty")
    return TimeSeries(np.asarray(values))


def _is_number(cell: str) -> bool:
    try:
        value = float(cell)
    except ValueError:
        return False
    return np.isfinite(value)


def transform(series: TimeSeries, op: str = "none") -> TimeSeries:
    """Apply 'none', 'log-returns' or 'first-difference' to a series.

    Both differencing transforms shorten the series by one observation;
    log-returns require strictly positive levels.
    """
    if op == "none":
        return series
    x = series.values
    if op == "log-returns":
        if np.any(x <= 0.0):
            raise DomainError("log-returns need strictly positive levels")
        return TimeSeries(np.diff(np.log(x)))
    if op == "first-difference":
        return TimeSeries(np.diff(x))
    raise InvalidInputError(f"unknown transform {op!r}")


def _sig6(value):
    """Round floats to 6 significant digits for serialization."""
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, float):
        if not np.isfinite(value):
            return None
        return float(f"{value:.6g}")
    if isinstance(value, dict):
        return {k: _sig6(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sig6(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return _sig6(float(value))
    return value


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _estimate_payload(report: EstimateReport) -> dict:
    return _sig6(
        {
            "schema_version": SCHEMA_VERSION,
            "method": report.method,
            "d_point": report.d_point,
            "d_interval": [report.d_low, report.d_high],
            "n": report.n,
            "m": report.m,
            "K": report.K,
            "ell": report.ell,
            "seed": report.seed,
            "runtime_seconds": report.runtime_seconds,
            "extra": report.extra,
        }
    )


def _diagnostics_payload(report: DiagnosticsReport) -> dict:
    return _sig6(
        {
            "schema_version": SCHEMA_VERSION,
            "method": "diagnostics",
            **dataclasses.asdict(report),
        }
    )


def emit_report(obj, fmt: str, path) -> None:
    """Write an estimate, diagnostics report or study result to disk.

    ``fmt`` is "json" or "csv".  Study CSV output is a flat table with one
    row per (scenario, method) under the fixed documented header.
    """
    from .study import StudyResult  # local import to avoid a cycle

    if fmt not in ("json", "csv"):
        raise InvalidInputError(f"unknown report format {fmt!r}")
    path = Path(path)
    try:
        if isinstance(obj, EstimateReport):
            _write(path, fmt, _estimate_payload(obj), _estimate_rows(obj))
        elif isinstance(obj, DiagnosticsReport):
            _write(path, fmt, _diagnostics_payload(obj), _diagnostics_rows(obj))
        elif isinstance(obj, StudyResult):
            _write(path, fmt, obj.payload(), obj.csv_rows())
        else:
            raise InvalidInputError(f"cannot emit a report for {type(obj).__name__}")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def _estimate_rows(report: EstimateReport):
    header = ["method", "d_point", "ci_lo", "ci_hi", "n", "m", "K", "ell", "seed"]
    row = [report.method, report.d_point, report.d_low, report.d_high,
           report.n, report.m, report.K, report.ell, report.seed]
    return header, [row]


def _diagnostics_rows(report: DiagnosticsReport):
    header = ["rs_hurst", "corrected_rs_hurst", "empirical_hurst", "dfa2_slope"]
    row = [report.rs_hurst, report.corrected_rs_hurst,
           report.empirical_hurst, report.dfa2_slope]
    return header, [row]


def _write(path: Path, fmt: str, payload: dict, table) -> None:
    if fmt == "json":
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    else:
        header, rows = table
        lines = [",".join(header)]
        lines += [",".join(_fmt(_sig6(cell)) for cell in row) for row in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
