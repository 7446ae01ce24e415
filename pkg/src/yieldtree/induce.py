"""Binary classification-tree induction and rule extraction.

Greedy recursive partitioning on Gini impurity decrease. Candidate
enumeration and tie-breaking are fully ordered (schema column order, then
ascending threshold / lexicographic category), so identical input yields a
byte-identical tree no matter how the search is scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .errors import DataError, UsageError
from .features import SEQUENTIAL_COLUMN, TimeEncodingSpec, TimeMode, decode_sequential
from .ingest import format_timestamp
from .model import Column, ColumnKind, LabeledDataset, Table, is_missing


@dataclass(frozen=True)
class SplitTest:
    """Numeric: value <= threshold. Categorical: value == category."""

    column: str
    threshold: float | None = None
    category: str | None = None

    def __post_init__(self) -> None:
        if (self.threshold is None) == (self.category is None):
            raise UsageError("split test needs exactly one of threshold or category")
        if self.threshold is not None and not math.isfinite(self.threshold):
            raise UsageError("split threshold must be finite")

    @property
    def is_numeric(self) -> bool:
        return self.threshold is not None

    def passes(self, value: Any) -> bool:
        if self.is_numeric:
            return value <= self.threshold
        return value == self.category


@dataclass(frozen=True)
class TrainConfig:
    max_depth: int = 5
    min_leaf: int = 5
    min_gain: float = 1e-6

    def __post_init__(self) -> None:
        if self.max_depth < 1:
            raise UsageError("max_depth must be >= 1")
        if self.min_leaf < 0 or self.min_gain < 0:
            raise UsageError("min_leaf and min_gain must be >= 0")


@dataclass(frozen=True)
class TreeNode:
    """Internal node (test set, both children present) or leaf (test None)."""

    counts: tuple[int, int]  # (class 0, class 1) training rows here
    depth: int
    test: SplitTest | None = None
    true_child: "TreeNode | None" = None
    false_child: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.test is None

    @property
    def predicted_class(self) -> int:
        # tie predicts the non-target class
        return 1 if self.counts[1] > self.counts[0] else 0


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode
    config: TrainConfig
    feature_columns: tuple[Column, ...]

    def leaves(self) -> list[TreeNode]:
        out: list[TreeNode] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.extend((node.false_child, node.true_child))
        return out

    def tested_columns(self) -> set[str]:
        out: set[str] = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                out.add(node.test.column)
                stack.extend((node.false_child, node.true_child))
        return out

    def to_dict(self) -> dict:
        def encode(node: TreeNode) -> dict:
            doc: dict[str, Any] = {
                "counts": list(node.counts),
                "depth": node.depth,
            }
            if node.is_leaf:
                doc["leaf"] = True
                doc["class"] = node.predicted_class
            else:
                doc["leaf"] = False
                doc["test"] = {
                    "column": node.test.column,
                    "op": "le" if node.test.is_numeric else "eq",
                    "value": node.test.threshold if node.test.is_numeric else node.test.category,
                }
                doc["true"] = encode(node.true_child)
                doc["false"] = encode(node.false_child)
            return doc

        return {
            "config": {
                "max_depth": self.config.max_depth,
                "min_leaf": self.config.min_leaf,
                "min_gain": self.config.min_gain,
            },
            "columns": [
                {"name": c.name, "kind": c.kind.name.lower()} for c in self.feature_columns
            ],
            "root": encode(self.root),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DecisionTree":
        def decode(node_doc: dict, depth: int) -> TreeNode:
            counts = (node_doc["counts"][0], node_doc["counts"][1])
            if node_doc["leaf"]:
                return TreeNode(counts, depth)
            test_doc = node_doc["test"]
            if test_doc["op"] == "le":
                test = SplitTest(test_doc["column"], threshold=test_doc["value"])
            else:
                test = SplitTest(test_doc["column"], category=test_doc["value"])
            return TreeNode(
                counts,
                depth,
                test,
                decode(node_doc["true"], depth + 1),
                decode(node_doc["false"], depth + 1),
            )

        config = TrainConfig(**doc["config"])
        columns = tuple(
            Column(c["name"], ColumnKind[c["kind"].upper()]) for c in doc["columns"]
        )
        return cls(decode(doc["root"], 0), config, columns)


def _gini(n0: int, n1: int) -> float:
    n = n0 + n1
    if n == 0:
        return 0.0
    p1 = n1 / n
    p0 = n0 / n
    return 1.0 - p0 * p0 - p1 * p1


def _best_split(
    columns: Sequence[Column],
    column_values: Mapping[str, list[Any]],
    rows: Sequence[int],
    labels: Sequence[int],
    min_leaf: int,
) -> tuple[float, SplitTest] | None:
    """Highest-gain candidate in canonical order; ties keep the first.

    Candidate order is schema column order, then ascending threshold for
    numeric columns and lexicographic category for categorical ones.
    """
    n = len(rows)
    n1 = sum(labels[i] for i in rows)
    parent = _gini(n - n1, n1)
    floor = max(min_leaf, 1)  # an empty child is never a meaningful split

    best: tuple[float, SplitTest] | None = None

    def consider(gain: float, test: SplitTest) -> None:
        nonlocal best
        if best is None or gain > best[0]:
            best = (gain, test)

    for column in columns:
        values = column_values[column.name]
        if column.kind is ColumnKind.NUMERIC:
            ordered = sorted(rows, key=lambda i: values[i])
            prefix_n1 = 0
            for position in range(1, n):
                prefix_n1 += labels[ordered[position - 1]]
                left_value = values[ordered[position - 1]]
                right_value = values[ordered[position]]
                if left_value == right_value:
                    continue
                left_n = position
                right_n = n - position
                if left_n < floor or right_n < floor:
                    continue
                left_n1 = prefix_n1
                right_n1 = n1 - left_n1
                children = (left_n / n) * _gini(left_n - left_n1, left_n1) + (
                    right_n / n
                ) * _gini(right_n - right_n1, right_n1)
                consider(parent - children, SplitTest(column.name, threshold=(left_value + right_value) / 2))
        else:
            tallies: dict[str, list[int]] = {}
            for i in rows:
                tally = tallies.setdefault(values[i], [0, 0])
                tally[labels[i]] += 1
            if len(tallies) < 2:
                continue
            for category in sorted(tallies):
                left_n0, left_n1 = tallies[category]
                left_n = left_n0 + left_n1
                right_n = n - left_n
                if left_n < floor or right_n < floor:
                    continue
                right_n1 = n1 - left_n1
                children = (left_n / n) * _gini(left_n0, left_n1) + (
                    right_n / n
                ) * _gini(right_n - right_n1, right_n1)
                consider(parent - children, SplitTest(column.name, category=category))

    return best


def train(data: LabeledDataset, config: TrainConfig = TrainConfig()) -> DecisionTree:
    """Grow a binary classification tree by greedy Gini partitioning.

    Numeric and categorical columns of the feature table participate;
    identifier and timestamp columns are ignored (encode timestamps first).
    Feature cells must be complete: screens run upstream.
    """
    if not data.features.rows:
        raise UsageError("cannot train on an empty dataset")
    columns = tuple(
        c
        for c in data.features.columns
        if c.kind in (ColumnKind.NUMERIC, ColumnKind.CATEGORICAL)
    )
    column_values: dict[str, list[Any]] = {}
    for column in columns:
        values = data.features.values(column.name)
        for i, value in enumerate(values):
            if is_missing(value):
                raise DataError(
                    f"missing cell in column {column.name!r} at row {i}; "
                    "run the screens before training"
                )
        column_values[column.name] = values
    labels = data.labels

    def build(rows: list[int], depth: int) -> TreeNode:
        n1 = sum(labels[i] for i in rows)
        counts = (len(rows) - n1, n1)
        if (
            n1 in (0, len(rows))
            or depth >= config.max_depth
            or len(rows) < 2 * config.min_leaf
        ):
            return TreeNode(counts, depth)
        found = _best_split(columns, column_values, rows, labels, config.min_leaf)
        if found is None or found[0] < config.min_gain:
            return TreeNode(counts, depth)
        gain, test = found
        values = column_values[test.column]
        true_rows = [i for i in rows if test.passes(values[i])]
        false_rows = [i for i in rows if not test.passes(values[i])]
        return TreeNode(
            counts,
            depth,
            test,
            build(true_rows, depth + 1),
            build(false_rows, depth + 1),
        )

    root = build(list(range(len(labels))), 0)
    return DecisionTree(root, config, columns)


def predict(tree: DecisionTree, row: Mapping[str, Any]) -> int:
    """Route one row (column name -> value) to a leaf and return its class."""
    node = tree.root
    while not node.is_leaf:
        if node.test.column not in row:
            raise DataError(f"row lacks tested column {node.test.column!r}")
        value = row[node.test.column]
        if is_missing(value):
            raise DataError(f"tested cell {node.test.column!r} is missing")
        node = node.true_child if node.test.passes(value) else node.false_child
    return node.predicted_class


def predict_table(tree: DecisionTree, table: Table) -> list[int]:
    return [predict(tree, table.row_mapping(row)) for row in table.rows]


@dataclass(frozen=True)
class Condition:
    """One step of a root-to-leaf path; negated means the false branch."""

    test: SplitTest
    negated: bool = False

    def holds(self, value: Any) -> bool:
        return self.test.passes(value) != self.negated

    def describe(self) -> str:
        value = _format_value(
            self.test.threshold if self.test.is_numeric else self.test.category
        )
        if self.test.is_numeric:
            op = ">" if self.negated else "<="
        else:
            op = "!=" if self.negated else "="
        return f"{self.test.column} {op} {value}"


@dataclass(frozen=True)
class Rule:
    """Conjunctive path to a class-1 leaf, with its training evidence."""

    conditions: tuple[Condition, ...]
    support: int
    confidence: float
    predicted_class: int = 1


def extract_rules(tree: DecisionTree) -> list[Rule]:
    """One rule per class-1 leaf, ordered by descending confidence then
    descending support."""
    rules: list[Rule] = []

    def walk(node: TreeNode, path: tuple[Condition, ...]) -> None:
        if node.is_leaf:
            if node.predicted_class == 1:
                support = node.counts[0] + node.counts[1]
                rules.append(Rule(path, support, node.counts[1] / support))
            return
        walk(node.true_child, path + (Condition(node.test, False),))
        walk(node.false_child, path + (Condition(node.test, True),))

    walk(tree.root, ())
    rules.sort(key=lambda r: (-r.confidence, -r.support))
    return rules


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return str(int(value)) if value.is_integer() else repr(value)
    return str(value)


def _render_condition(condition: Condition, sequential: TimeEncodingSpec | None) -> str:
    test = condition.test
    if sequential is not None and test.is_numeric and test.column == SEQUENTIAL_COLUMN:
        moment = decode_sequential(math.floor(test.threshold), sequential)
        op = ">" if condition.negated else "<="
        return f"time {op} {format_timestamp(moment)}"
    return condition.describe()


def render_report(
    rules: Sequence[Rule], encodings: Sequence[TimeEncodingSpec] = ()
) -> str:
    """Plain-text report, one line per rule.

    Conditions on the minutes_from_epoch column are decoded back to calendar
    timestamps when a sequential encoding spec is supplied.
    """
    sequential = next(
        (spec for spec in encodings if spec.mode is TimeMode.SEQUENTIAL), None
    )
    if not rules:
        return "No rules found: no leaf predicts the target class.\n"
    lines = []
    for rule in rules:
        if rule.conditions:
            body = " AND ".join(_render_condition(c, sequential) for c in rule.conditions)
        else:
            body = "always"
        lines.append(
            f"IF {body} THEN reject [support {rule.support}, confidence {rule.confidence:.2f}]"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EvalReport:
    """Confusion counts and class-1 precision/recall (None when undefined)."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def precision(self) -> float | None:
        denominator = self.tp + self.fp
        return self.tp / denominator if denominator else None

    @property
    def recall(self) -> float | None:
        denominator = self.tp + self.fn
        return self.tp / denominator if denominator else None


def evaluate(tree: DecisionTree, holdout: LabeledDataset) -> EvalReport:
    """Confusion counts of the tree's predictions on a labeled holdout."""
    tp = fp = tn = fn = 0
    for row, label in zip(holdout.features.rows, holdout.labels):
        predicted = predict(tree, holdout.features.row_mapping(row))
        if predicted == 1 and label == 1:
            tp += 1
        elif predicted == 1:
            fp += 1
        elif label == 1:
            fn += 1
        else:
            tn += 1
    return EvalReport(tp, fp, tn, fn)
