import random
from fractions import Fraction

import pytest

from conftest import BATCH, SITE, WAFER, batch_key, build_hierarchy, random_hierarchy
from oracles import reject_rate_oracle, stats_oracle
from yieldtree.errors import DataError, UsageError
from yieldtree.lift import (
    Comparator,
    RejectionRule,
    broadcast_down,
    lift_reject_rate,
    lift_stats,
)
from yieldtree.model import (
    MISSING,
    Column,
    ColumnKind,
    Row,
    Table,
    group_by_ancestor,
    is_missing,
)


def one_batch_dataset(values):
    return build_hierarchy({"b1": {"w1": values}})


class TestLiftStats:
    def test_constant_group(self):
        table = lift_stats(one_batch_dataset([7.0] * 6), "x", SITE, BATCH)
        assert table.rows[0].cells == (7.0, 0.0, 7.0, 7.0, 7.0)

    def test_textbook_example_matches_oracle(self):
        # oracle computed before build: mean 3, sample std sqrt(2.5), median 3
        values = [1.0, 2.0, 3.0, 4.0, 5.0]
        table = lift_stats(one_batch_dataset(values), "x", SITE, BATCH)
        mean, std, median, lo, hi = table.rows[0].cells
        assert (mean, median, lo, hi) == (3.0, 3.0, 1.0, 5.0)
        assert std == pytest.approx(1.5811388300841898, abs=0.0)
        assert (mean, std, median, lo, hi) == pytest.approx(stats_oracle(values))

    def test_10_batches_of_120_measurements_give_10_vectors(self):
        nest = {
            f"b{b:02d}": {f"w{w:02d}": [float(b + w + s) for s in range(5)] for w in range(24)}
            for b in range(10)
        }
        dataset = build_hierarchy(nest)
        assert len(dataset.table(SITE)) == 1200
        table = lift_stats(dataset, "x", SITE, BATCH)
        assert len(table) == 10
        assert table.column_names == ("x_mean", "x_std", "x_median", "x_min", "x_max")

    def test_empty_group_names_entity(self):
        dataset = build_hierarchy({"b1": {"w1": [1.0]}})
        extra_batch = Table(
            BATCH, (), dataset.table(BATCH).rows + (Row(batch_key("b9"), ()),)
        )
        with pytest.raises(DataError, match="b9"):
            lift_stats(dataset.with_table(extra_batch), "x", SITE, BATCH)

    def test_non_numeric_parameter_rejected(self):
        dataset = one_batch_dataset([1.0])
        site = dataset.table(SITE).with_added_columns(
            [Column("tag", ColumnKind.CATEGORICAL)], [("a",)]
        )
        with pytest.raises(UsageError):
            lift_stats(dataset.with_table(site), "tag", SITE, BATCH)

    def test_levels_must_be_finer_to_coarser(self):
        with pytest.raises(UsageError):
            lift_stats(one_batch_dataset([1.0]), "x", BATCH, SITE)

    def test_ordering_invariants_on_random_groups(self):
        rng = random.Random(2)
        for _ in range(30):
            _, dataset = random_hierarchy(rng)
            table = lift_stats(dataset, "x", SITE, BATCH)
            for row in table.rows:
                mean, std, median, lo, hi = row.cells
                assert lo <= median <= hi and lo <= mean <= hi
                assert std >= 0.0
                values = set()
                for site_row in dataset.table(SITE).rows:
                    if site_row.key.ancestor(BATCH) == row.key:
                        values.add(site_row.cells[0])
                assert (std == 0.0) == (len(values) == 1)


class TestLiftRejectRate:
    def test_worked_batch_from_oracle(self):
        wafers = [[11.0, 12.0, 1.0, 1.0, 1.0], [11.0, 1.0, 1.0, 1.0, 1.0], [11.0, 12.0, 13.0, 1.0, 1.0]]
        dataset = build_hierarchy({"b1": {f"w{i}": w for i, w in enumerate(wafers)}})
        rule = RejectionRule("x", 10.0, 2)
        table = lift_reject_rate(dataset, rule)
        expected = reject_rate_oracle(wafers, 10.0, 2)  # 2 of 3 wafers
        assert expected == Fraction(200, 3)
        assert table.rows[0].cells[0] == float(expected) == pytest.approx(66.66666666666667, abs=0.0)

    def test_no_value_above_threshold_gives_zero(self):
        dataset = build_hierarchy({"b1": {"w1": [1.0, 2.0], "w2": [3.0, 0.5]}})
        table = lift_reject_rate(dataset, RejectionRule("x", 10.0, 1))
        assert table.rows[0].cells[0] == 0.0

    def test_saturation_gives_100(self):
        dataset = build_hierarchy({"b1": {"w1": [11.0] * 5, "w2": [12.0] * 5}})
        table = lift_reject_rate(dataset, RejectionRule("x", 10.0, 2))
        assert table.rows[0].cells[0] == 100.0

    def test_strict_comparison_at_threshold(self):
        dataset = build_hierarchy({"b1": {"w1": [10.0, 10.0, 10.0]}})
        table = lift_reject_rate(dataset, RejectionRule("x", 10.0, 1))
        assert table.rows[0].cells[0] == 0.0  # equality is not "above"

    def test_below_comparator(self):
        dataset = build_hierarchy({"b1": {"w1": [1.0, 1.0, 9.0], "w2": [9.0, 9.0, 9.0]}})
        rule = RejectionRule("x", 5.0, 2, Comparator.BELOW)
        table = lift_reject_rate(dataset, rule)
        assert table.rows[0].cells[0] == 50.0

    def test_batch_with_zero_wafers_is_error(self):
        dataset = build_hierarchy({"b1": {"w1": [1.0]}})
        extra = Table(BATCH, (), dataset.table(BATCH).rows + (Row(batch_key("b9"), ()),))
        with pytest.raises(DataError, match="b9"):
            lift_reject_rate(dataset.with_table(extra), RejectionRule("x", 10.0))

    def test_min_count_validated(self):
        with pytest.raises(UsageError):
            RejectionRule("x", 10.0, 0)

    def test_threshold_monotonicity_and_bounds(self):
        rng = random.Random(3)
        nest, dataset = random_hierarchy(rng)
        rates = []
        max_value = max(v for wafers in nest.values() for sites in wafers.values() for v in sites)
        for threshold in [0.0, 5.0, 10.0, 15.0, max_value]:
            table = lift_reject_rate(dataset, RejectionRule("x", threshold, 2))
            values = table.values(table.column_names[0])
            assert all(0.0 <= v <= 100.0 for v in values)
            rates.append(values)
        for earlier, later in zip(rates, rates[1:]):
            assert all(a >= b for a, b in zip(earlier, later))  # nonincreasing in T
        assert all(v == 0.0 for v in rates[-1])  # threshold at max: nothing above


class TestOracleEquivalence:
    def test_both_lifts_match_brute_force_on_random_hierarchies(self):
        rng = random.Random(4)
        for _ in range(100):
            nest, dataset = random_hierarchy(rng)
            stats = lift_stats(dataset, "x", SITE, BATCH)
            for row in stats.rows:
                batch_values = [
                    v for wafers in [nest[row.key.batch_id]] for sites in wafers.values() for v in sites
                ]
                expected = stats_oracle(batch_values)
                for got, want in zip(row.cells, expected):
                    assert got == pytest.approx(want, rel=1e-9)

            threshold = rng.uniform(2.0, 18.0)
            k = rng.randint(1, 3)
            rates = lift_reject_rate(dataset, RejectionRule("x", threshold, k))
            for row in rates.rows:
                wafers = list(nest[row.key.batch_id].values())
                assert row.cells[0] == float(reject_rate_oracle(wafers, threshold, k))


class TestBroadcastDown:
    def _dataset(self, temp=350.0):
        dataset = build_hierarchy({"b1": {f"w{w:02d}": [0.0] * 5 for w in range(24)}})
        batch = Table(
            BATCH,
            (Column("oven_temp", ColumnKind.NUMERIC),),
            tuple(Row(r.key, (temp,)) for r in dataset.table(BATCH).rows),
        )
        return dataset.with_table(batch)

    def test_replicates_to_all_descendants(self):
        table = broadcast_down(self._dataset(), "oven_temp", BATCH, SITE)
        assert len(table) == 120
        assert set(table.values("oven_temp")) == {350.0}

    def test_group_round_trip_recovers_value(self):
        table = broadcast_down(self._dataset(), "oven_temp", BATCH, SITE)
        for group in group_by_ancestor(table, BATCH):
            assert group.rows[0].cells[0] == 350.0

    def test_missing_value_broadcasts_missing(self):
        table = broadcast_down(self._dataset(MISSING), "oven_temp", BATCH, WAFER)
        assert all(is_missing(v) for v in table.values("oven_temp"))

    def test_levels_must_be_coarser_to_finer(self):
        with pytest.raises(UsageError):
            broadcast_down(self._dataset(), "oven_temp", SITE, BATCH)
