"""Deterministic rendering of sweep tables.

CSV schema (stable): axis columns first, then g2, g3, g4, mean_clicks,
pipeline, diagnostics.  Numbers carry 12 significant digits and rows end
with a single line feed, so identical tables produce identical bytes.
"""

from __future__ import annotations

import json
import math

from .sweep import SweepTable

_FIXED_COLUMNS = ("g2", "g3", "g4", "mean_clicks", "pipeline", "diagnostics")


def format_number(x: float) -> str:
    return f"{x:.12g}"


def table_columns(table: SweepTable) -> tuple[str, ...]:
    return table.axis_names + _FIXED_COLUMNS


def to_csv(table: SweepTable) -> str:
    lines = [",".join(table_columns(table))]
    for row in table.rows:
        cells = [format_number(v) for v in row.axis_values]
        cells += [
            format_number(row.g2),
            format_number(row.g3),
            format_number(row.g4),
            format_number(row.mean),
            row.pipeline,
            row.diagnostics,
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _jsonable(x: float) -> float | None:
    # Strict JSON has no NaN; failed rows serialize as null.
    if isinstance(x, float) and math.isnan(x):
        return None
    return x


def to_json(table: SweepTable) -> str:
    records = []
    for row in table.rows:
        record = {k: _jsonable(v) for k, v in zip(table.axis_names, row.axis_values)}
        record.update(
            g2=_jsonable(row.g2),
            g3=_jsonable(row.g3),
            g4=_jsonable(row.g4),
            mean_clicks=_jsonable(row.mean),
            pipeline=row.pipeline,
            diagnostics=row.diagnostics,
        )
        records.append(record)
    return json.dumps(records, indent=2, sort_keys=True) + "\n"
