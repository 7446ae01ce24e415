"""Time-feature engineering and redundancy screening.

Cyclical encodings expose hour-of-day style patterns; the sequential
encoding (whole minutes from a fixed epoch) exposes one-off events and is
decoded back to a calendar timestamp for reporting.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import UsageError
from .model import MISSING, Column, ColumnKind, Table, is_missing

DEFAULT_EPOCH = datetime(1990, 1, 1, 0, 0)

SEQUENTIAL_COLUMN = "minutes_from_epoch"
BATCH_ORDER_COLUMN = "batch_order"
CYCLICAL_COLUMNS = ("hour_of_day", "day_of_week", "week_of_month", "is_weekend", "is_holiday")

DEFAULT_CORRELATION_THRESHOLD = 0.95


class TimeMode(str, Enum):
    CYCLICAL = "cyclical"
    SEQUENTIAL = "sequential"


@dataclass(frozen=True)
class TimeEncodingSpec:
    mode: TimeMode
    epoch: datetime = DEFAULT_EPOCH
    holiday_dates: frozenset[date] = frozenset()


def _cyclical_cells(ts: datetime, holidays: frozenset[date]) -> tuple[int, int, int, int, int]:
    day_of_week = ts.weekday()  # 0 = Monday
    week_of_month = math.ceil(ts.day / 7)
    is_weekend = 1 if day_of_week in (5, 6) else 0
    is_holiday = 1 if ts.date() in holidays else 0
    return ts.hour, day_of_week, week_of_month, is_weekend, is_holiday


def encode_cyclical(
    table: Table, time_column: str, holidays: Iterable[date] = ()
) -> Table:
    """Add hour_of_day, day_of_week, week_of_month, is_weekend, is_holiday.

    Missing timestamps yield missing encoded cells. day_of_week uses
    0 = Monday; week_of_month is ceil(day_of_month / 7).
    """
    if table.column(time_column).kind is not ColumnKind.TIMESTAMP:
        raise UsageError(f"column {time_column!r} is not a timestamp")
    holiday_set = frozenset(holidays)
    index = table.column_index(time_column)
    added = []
    for row in table.rows:
        ts = row.cells[index]
        if is_missing(ts):
            added.append((MISSING,) * len(CYCLICAL_COLUMNS))
        else:
            added.append(_cyclical_cells(ts, holiday_set))
    columns = [Column(name, ColumnKind.NUMERIC) for name in CYCLICAL_COLUMNS]
    return table.with_added_columns(columns, added)


def encode_sequential(table: Table, time_column: str, spec: TimeEncodingSpec) -> Table:
    """Add minutes_from_epoch: whole minutes from spec.epoch (negative allowed)."""
    if spec.mode is not TimeMode.SEQUENTIAL:
        raise UsageError("encode_sequential needs a sequential TimeEncodingSpec")
    if table.column(time_column).kind is not ColumnKind.TIMESTAMP:
        raise UsageError(f"column {time_column!r} is not a timestamp")
    index = table.column_index(time_column)
    added = []
    for row in table.rows:
        ts = row.cells[index]
        if is_missing(ts):
            added.append((MISSING,))
        else:
            added.append(((ts - spec.epoch) // timedelta(minutes=1),))
    column = Column(SEQUENTIAL_COLUMN, ColumnKind.NUMERIC, units="minutes")
    return table.with_added_columns([column], added)


def decode_sequential(minutes: int, spec: TimeEncodingSpec) -> datetime:
    """Inverse of encode_sequential for minute-precision timestamps."""
    if spec.mode is not TimeMode.SEQUENTIAL:
        raise UsageError("decode_sequential needs a sequential TimeEncodingSpec")
    return spec.epoch + timedelta(minutes=int(minutes))


def order_from_batch_id(table: Table, id_column: str) -> Table:
    """Add batch_order: the integer formed by concatenating the ID's digit runs.

    id_column may name an identifier-kind data column or one of the key
    fields (batch_id, wafer_id, site_id, ic_id) at or above the table's
    level. IDs without digits get a missing batch_order.
    """
    if table.has_column(id_column):
        if table.column(id_column).kind is not ColumnKind.IDENTIFIER:
            raise UsageError(f"column {id_column!r} is not identifier-kind")
        index = table.column_index(id_column)
        ids = [row.cells[index] for row in table.rows]
    elif id_column in table.level.key_fields:
        position = table.level.key_fields.index(id_column)
        ids = [row.key.ids[position] for row in table.rows]
    else:
        raise UsageError(
            f"{id_column!r} is neither an identifier column nor a key field "
            f"of the {table.level.name} table"
        )

    added = []
    for value in ids:
        digits = "" if is_missing(value) else "".join(ch for ch in value if ch.isdigit())
        added.append((int(digits),) if digits else (MISSING,))
    column = Column(BATCH_ORDER_COLUMN, ColumnKind.NUMERIC)
    return table.with_added_columns([column], added)


@dataclass(frozen=True)
class CorrelationReport:
    """Pairwise Pearson coefficients over a table's numeric columns.

    matrix entries are None where the coefficient is undefined (constant
    column or fewer than two complete pair rows). Constant columns are
    auto-flagged into suggested_drops.
    """

    columns: tuple[str, ...]
    matrix: tuple[tuple[float | None, ...], ...]
    flagged_pairs: tuple[tuple[str, str, float], ...]
    suggested_drops: tuple[str, ...]
    threshold: float

    def coefficient(self, a: str, b: str) -> float | None:
        i, j = self.columns.index(a), self.columns.index(b)
        return self.matrix[i][j]


def _pearson(xs: list[float], ys: list[float]) -> float | None:
    n = len(xs)
    if n < 2:
        return None
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    cov = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    var_x = sum((x - mean_x) ** 2 for x in xs)
    var_y = sum((y - mean_y) ** 2 for y in ys)
    if var_x == 0.0 or var_y == 0.0:
        return None
    return cov / math.sqrt(var_x * var_y)


def correlation_table(
    table: Table, flag_threshold: float = DEFAULT_CORRELATION_THRESHOLD
) -> CorrelationReport:
    """Pearson coefficient per numeric-column pair over rows where both
    cells are present.

    Pairs with |r| >= flag_threshold are flagged; the later column of each
    flagged pair (schema order) and every constant column land in
    suggested_drops.
    """
    numeric = [c.name for c in table.columns if c.kind is ColumnKind.NUMERIC]
    if len(numeric) < 2:
        raise UsageError("correlation table needs at least 2 numeric columns")
    series = {name: table.values(name) for name in numeric}
    complete = sum(
        1
        for i in range(len(table))
        if all(not is_missing(series[name][i]) for name in numeric)
    )
    if complete < 2:
        raise UsageError("correlation table needs at least 2 complete rows")

    constant = [
        name
        for name in numeric
        if len({v for v in series[name] if not is_missing(v)}) <= 1
    ]

    size = len(numeric)
    matrix: list[list[float | None]] = [[None] * size for _ in range(size)]
    flagged: list[tuple[str, str, float]] = []
    drops: list[str] = list(constant)
    for i in range(size):
        if numeric[i] not in constant:
            matrix[i][i] = 1.0
        for j in range(i + 1, size):
            pairs = [
                (a, b)
                for a, b in zip(series[numeric[i]], series[numeric[j]])
                if not is_missing(a) and not is_missing(b)
            ]
            r = _pearson([p[0] for p in pairs], [p[1] for p in pairs])
            matrix[i][j] = matrix[j][i] = r
            if r is not None and abs(r) >= flag_threshold:
                flagged.append((numeric[i], numeric[j], r))
                if numeric[j] not in drops:
                    drops.append(numeric[j])

    ordered_drops = tuple(name for name in numeric if name in drops)
    return CorrelationReport(
        columns=tuple(numeric),
        matrix=tuple(tuple(row) for row in matrix),
        flagged_pairs=tuple(flagged),
        suggested_drops=ordered_drops,
        threshold=flag_threshold,
    )


def flag_correlated(report: CorrelationReport, table: Table) -> Table:
    """Remove the report's suggested_drops columns from the table.

    Single pass: the kept columns are not guaranteed to be pairwise below
    the flag threshold.
    """
    numeric = tuple(c.name for c in table.columns if c.kind is ColumnKind.NUMERIC)
    if report.columns != numeric:
        raise UsageError(
            "correlation report does not match table's numeric columns"
        )
    if not report.suggested_drops:
        return table
    return table.without_columns(report.suggested_drops)


def write_correlation_csv(report: CorrelationReport, path: str | Path) -> None:
    """Export all pairs as CSV with columns col_a, col_b, r, flagged."""
    flagged_set = {(a, b) for a, b, _ in report.flagged_pairs}
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["col_a", "col_b", "r", "flagged"])
        for i, a in enumerate(report.columns):
            for j in range(i + 1, len(report.columns)):
                b = report.columns[j]
                r = report.matrix[i][j]
                writer.writerow(
                    [a, b, "" if r is None else repr(r), int((a, b) in flagged_set)]
                )
