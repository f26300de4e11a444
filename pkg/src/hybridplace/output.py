"""Plot-ready CSV/JSON serialization of traces, summaries and comparisons.

Floats are printed with six decimals using round-half-even on the exact
binary value (what Python's ``format`` and C's ``printf`` both do), so
outputs diff byte-for-byte across runs and implementations.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from .backends import ServiceOutcome
from .metrics import Comparison, MetricsReport
from .placer import PlacementDecision

TRACE_COLUMNS = (
    "request_id",
    "arrival_s",
    "data_size_bytes",
    "platform",
    "dispatch_s",
    "end_s",
    "status",
    "response_s",
    "session_s",
)

FORMATS = ("csv", "json")


def fmt_time(x: float) -> str:
    return f"{x:.6f}"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float):
        return fmt_time(value)
    return str(value)


def _json_value(value):
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float):
        return float(fmt_time(value))
    if isinstance(value, dict):
        return {(k.value if isinstance(k, enum.Enum) else k): _json_value(v) for k, v in value.items()}
    return value


def trace_rows(outcomes: Sequence[ServiceOutcome], decisions: Sequence[PlacementDecision]) -> list[dict]:
    placed = {d.request_id: d.platform for d in decisions}
    rows = []
    for o in sorted(outcomes, key=lambda o: o.request_id):
        if placed.get(o.request_id) is not o.platform:
            raise ValueError(f"request {o.request_id}: outcome platform does not match its placement")
        rows.append(
            {
                "request_id": o.request_id,
                "arrival_s": o.arrival_time,
                "data_size_bytes": o.data_size,
                "platform": o.platform,
                "dispatch_s": o.dispatch_time,
                "end_s": o.end_time,
                "status": o.status,
                "response_s": o.response_time,
                "session_s": o.session_length,
            }
        )
    return rows


def render(rows: Iterable[dict], columns: Sequence[str], fmt: str) -> str:
    rows = list(rows)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[c]) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([{c: _json_value(row[c]) for c in columns} for row in rows], indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def render_trace(outcomes, decisions, fmt: str = "csv") -> str:
    return render(trace_rows(outcomes, decisions), TRACE_COLUMNS, fmt)


def write_trace(outcomes, decisions, path: str | Path, fmt: str = "csv") -> None:
    write_text(path, render_trace(outcomes, decisions, fmt))


def render_summary(reports: Sequence[MetricsReport], fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps([_json_value(r.to_dict()) for r in reports], indent=2) + "\n"
    rows = [r.scalar_fields() for r in reports]
    return render(rows, list(rows[0]) if rows else [], fmt)


def render_comparison(comparison: Comparison, fmt: str = "csv") -> str:
    return render(comparison.rows(), Comparison.COLUMNS, fmt)


def write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
