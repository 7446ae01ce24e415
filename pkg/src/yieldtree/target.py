"""Target-class engineering: thresholding a continuous yield-like variable
into a binary class, grey-region deletion, and per-problem targets.

Equality at the threshold is always class 0; the grey region is the open
interval (t - delta, t + delta).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Sequence

from .errors import DataError, EmptyDatasetError, NoValleyError, UsageError
from .lift import RejectionRule, lift_reject_rate
from .model import (
    GranularityLevel,
    HierarchicalDataset,
    LabeledDataset,
    Table,
    is_missing,
)

DEFAULT_HISTOGRAM_BINS = 10


class Direction(str, Enum):
    """Side of the threshold on which a value is labeled class 1."""

    BELOW = "below"
    ABOVE = "above"

    def is_target(self, value: float, t: float) -> bool:
        if self is Direction.BELOW:
            return value < t
        return value > t


class ThresholdStrategy(str, Enum):
    FIXED = "fixed"
    MEDIAN = "median"
    VALLEY = "valley"


@dataclass(frozen=True)
class TargetSpec:
    """Recipe for turning a continuous source column into a binary class."""

    source_column: str
    strategy: ThresholdStrategy
    threshold: float | None = None  # fixed strategy
    bins: int | None = None  # valley strategy
    direction: Direction = Direction.BELOW
    grey_half_width: float = 0.0

    def __post_init__(self) -> None:
        if self.strategy is ThresholdStrategy.FIXED:
            if self.threshold is None or not math.isfinite(self.threshold):
                raise UsageError("fixed strategy needs a finite threshold")
        if self.strategy is ThresholdStrategy.VALLEY:
            if self.bins is None or self.bins < 3:
                raise UsageError("valley strategy needs bins >= 3")
        if self.grey_half_width < 0:
            raise UsageError("grey_half_width must be >= 0")

    def resolve_threshold(self, values: Sequence[float]) -> float:
        if self.strategy is ThresholdStrategy.FIXED:
            assert self.threshold is not None
            return self.threshold
        if self.strategy is ThresholdStrategy.MEDIAN:
            return threshold_median(values)
        assert self.bins is not None
        return threshold_valley(values, self.bins)


def label_by_threshold(
    values: Sequence[float], t: float, direction: Direction = Direction.BELOW
) -> list[int]:
    """Binary labels: 1 where the value lies strictly on the direction side of t."""
    labels = []
    for i, value in enumerate(values):
        if is_missing(value):
            raise DataError(f"target value at row {i} is missing; targets must be complete")
        labels.append(1 if direction.is_target(value, t) else 0)
    return labels


def threshold_median(values: Sequence[float]) -> float:
    """Median threshold, balancing examples and counter-examples."""
    if len(values) < 2:
        raise UsageError("median threshold needs at least 2 values")
    ordered = sorted(values)
    n = len(ordered)
    if n % 2:
        return ordered[n // 2]
    return (ordered[n // 2 - 1] + ordered[n // 2]) / 2


@dataclass(frozen=True)
class HistogramReport:
    """Equal-width histogram; the last bin is right-inclusive."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]

    def midpoint(self, bin_index: int) -> float:
        return (self.bin_edges[bin_index] + self.bin_edges[bin_index + 1]) / 2


def histogram(values: Sequence[float], bins: int) -> HistogramReport:
    """Equal-width histogram over [min, max].

    A degenerate range (all values equal) is widened by 0.5 on each side so
    the edges stay strictly ascending.
    """
    if not values:
        raise UsageError("histogram needs at least 1 value")
    if bins < 1:
        raise UsageError("histogram needs bins >= 1")
    lo, hi = min(values), max(values)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    width = (hi - lo) / bins
    counts = [0] * bins
    for value in values:
        index = int((value - lo) / (hi - lo) * bins)
        if index >= bins:  # value == hi lands in the last bin
            index = bins - 1
        counts[index] += 1
    edges = tuple(lo + i * width for i in range(bins)) + (hi,)
    return HistogramReport(edges, tuple(counts))


def _interior_valleys(counts: Sequence[int]) -> list[int]:
    """Bins strictly below their nearest non-equal neighbor on both sides."""
    valleys = []
    for i in range(len(counts)):
        left = next((counts[j] for j in range(i - 1, -1, -1) if counts[j] != counts[i]), None)
        right = next((counts[j] for j in range(i + 1, len(counts)) if counts[j] != counts[i]), None)
        if left is not None and right is not None and counts[i] < left and counts[i] < right:
            valleys.append(i)
    return valleys


def threshold_valley(values: Sequence[float], bins: int) -> float:
    """Threshold at the midpoint of the deepest (leftmost on ties) histogram
    valley; raises NoValleyError when the histogram has none."""
    if bins < 3:
        raise UsageError("valley detection needs bins >= 3")
    if len(set(values)) < 2:
        raise UsageError("valley detection needs at least 2 distinct values")
    report = histogram(values, bins)
    valleys = _interior_valleys(report.counts)
    if not valleys:
        raise NoValleyError(
            f"histogram with {bins} bins has no interior valley; "
            "choose a fixed or median threshold instead"
        )
    chosen = min(valleys, key=lambda i: (report.counts[i], i))
    return report.midpoint(chosen)


def yield_series(
    table: Table, source_column: str, time_column: str
) -> list[tuple[datetime, float]]:
    """(time, value) pairs sorted ascending by time; ties keep input order.

    Rows with a missing time or value are left out.
    """
    times = table.values(time_column)
    values = table.values(source_column)
    series = [
        (t, v)
        for t, v in zip(times, values)
        if not is_missing(t) and not is_missing(v)
    ]
    series.sort(key=lambda pair: pair[0])  # stable: ties keep input order
    return series


def apply_grey_region(
    features: Table,
    values: Sequence[float],
    t: float,
    delta: float,
    direction: Direction = Direction.BELOW,
) -> tuple[LabeledDataset, int]:
    """Delete rows whose value lies in the open interval (t - delta, t + delta),
    then label the remainder by threshold."""
    if delta < 0:
        raise UsageError("grey half-width must be >= 0")
    if len(values) != len(features.rows):
        raise UsageError("values do not align with feature rows")
    for i, value in enumerate(values):
        if is_missing(value):
            raise DataError(f"target value at row {i} is missing; targets must be complete")
    keep = [not (t - delta < v < t + delta) for v in values]
    kept_table = features.filter_rows(keep)
    if not kept_table.rows:
        raise EmptyDatasetError(
            f"grey region ({t - delta}, {t + delta}) deleted every row"
        )
    kept_values = [v for v, k in zip(values, keep) if k]
    labels = label_by_threshold(kept_values, t, direction)
    return LabeledDataset(kept_table, tuple(labels)), len(values) - len(kept_values)


def make_problem_target(
    dataset: HierarchicalDataset,
    rule: RejectionRule,
    U: float,
    direction: Direction = Direction.BELOW,
    grey_half_width: float = 0.0,
) -> LabeledDataset:
    """Per-problem target: lift the rejection rate Y per batch, then label
    batches by Y against U. Features are the batch table's columns."""
    rate_table = lift_reject_rate(dataset, rule)
    rates = {row.key: row.cells[0] for row in rate_table.rows}
    batch = dataset.table(GranularityLevel.BATCH)
    values = [rates[row.key] for row in batch.rows]
    labeled, _ = apply_grey_region(batch, values, U, grey_half_width, direction)
    return labeled


def one_vs_rest(
    features: Table, labelings: Sequence[tuple[str, Sequence[int]]]
) -> list[tuple[str, LabeledDataset]]:
    """One LabeledDataset per named labeling over the shared feature table.

    Labelings may overlap: a row can be class 1 in several of them.
    """
    datasets = []
    for name, labels in labelings:
        if len(labels) != len(features.rows):
            raise UsageError(
                f"labeling {name!r} has {len(labels)} labels for {len(features.rows)} rows"
            )
        datasets.append((name, LabeledDataset(features, tuple(labels))))
    return datasets


def write_histogram_csv(report: HistogramReport, path: str | Path) -> None:
    """Export as CSV with columns bin_lo, bin_hi, count."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["bin_lo", "bin_hi", "count"])
        for i, count in enumerate(report.counts):
            writer.writerow([repr(report.bin_edges[i]), repr(report.bin_edges[i + 1]), count])


def write_series_csv(series: Sequence[tuple[datetime, float]], path: str | Path) -> None:
    """Export a (time, value) series as CSV with columns time, value."""
    from .ingest import format_timestamp

    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["time", "value"])
        for ts, value in series:
            writer.writerow([format_timestamp(ts), repr(float(value))])
