import json
from pathlib import Path

import pytest

from yieldtree.cli import main
from yieldtree.errors import UsageError
from yieldtree.pipeline import config_from_dict, run_pipeline


def base_config(out_dir, n_batches=40, seed=3):
    return {
        "input": {"scenario": {
            "seed": seed,
            "n_batches": n_batches,
            "effects": [{"type": "machine_defect", "n_machines": 4, "bad_machine_id": 3, "delta_p": 0.4}],
        }},
        "lifts": [{"method": "reject_rate", "parameter": "x", "threshold": 10.0, "min_count": 2}],
        "encodings": {"cyclical": {"time_column": "timestamp"},
                      "sequential": {"time_column": "timestamp"}},
        "features": {"exclude": ["yield"]},
        "targets": [{"name": "prob", "source_column": "x_reject_pct",
                     "strategy": "median", "direction": "above"}],
        "train": {"max_depth": 3, "min_leaf": 5},
        "outputs": {"dir": str(out_dir)},
    }


def run_config(doc, base="."):
    return run_pipeline(config_from_dict(doc, base))


def read_all_artifacts(directory: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


class TestConfigValidation:
    def test_no_target_names_the_field(self, tmp_path):
        doc = base_config(tmp_path / "out")
        del doc["targets"]
        with pytest.raises(UsageError, match="target"):
            config_from_dict(doc, tmp_path)

    def test_exactly_one_input_source(self, tmp_path):
        doc = base_config(tmp_path / "out")
        doc["input"] = {}
        with pytest.raises(UsageError, match="scenario|csv"):
            config_from_dict(doc, tmp_path)

    def test_unknown_top_level_field(self, tmp_path):
        doc = base_config(tmp_path / "out")
        doc["surprise"] = 1
        with pytest.raises(UsageError, match="surprise"):
            config_from_dict(doc, tmp_path)

    def test_duplicate_target_names(self, tmp_path):
        doc = base_config(tmp_path / "out")
        doc["targets"] = doc["targets"] * 2
        with pytest.raises(UsageError, match="unique"):
            config_from_dict(doc, tmp_path)

    def test_single_target_alias(self, tmp_path):
        doc = base_config(tmp_path / "out")
        doc["target"] = doc.pop("targets")[0]
        config = config_from_dict(doc, tmp_path)
        assert [t.name for t in config.targets] == ["prob"]


class TestHappyPath:
    def test_all_declared_outputs_exist(self, tmp_path):
        out = tmp_path / "out"
        result = run_config(base_config(out), tmp_path)
        names = {p.name for p in out.iterdir()}
        assert {
            "manifest.json", "correlation.csv", "prob_rules.txt",
            "prob_tree.json", "prob_histogram.csv", "prob_over_time.csv",
        } <= names
        assert result.manifest["targets"][0]["rules"] >= 1

    def test_manifest_accounts_for_every_case(self, tmp_path):
        result = run_config(base_config(tmp_path / "out"), tmp_path)
        manifest = result.manifest
        batch_in = manifest["input"]["rows"]["batch"]
        screens = manifest["screens"]
        survivors = (
            batch_in
            - screens["missing_dropped"]["batch"]
            - screens["limit_dropped"]["batch"]
        )
        target = manifest["targets"][0]
        assert target["labeled"]["rows"] + target["grey_deleted"] == survivors

    def test_rerun_is_byte_identical(self, tmp_path):
        doc = base_config(tmp_path / "out")
        run_config(doc, tmp_path)
        first = read_all_artifacts(tmp_path / "out")
        run_config(doc, tmp_path)
        second = read_all_artifacts(tmp_path / "out")
        assert first == second

    def test_test_split_evaluation_recorded(self, tmp_path):
        doc = base_config(tmp_path / "out", n_batches=80)
        doc["train"]["test_fraction"] = 0.25
        doc["train"]["split_seed"] = 5
        result = run_config(doc, tmp_path)
        evaluation = result.manifest["targets"][0]["evaluation"]
        assert evaluation is not None
        assert evaluation["tp"] + evaluation["fp"] + evaluation["tn"] + evaluation["fn"] == 20

    def test_target_sources_never_reach_training(self, tmp_path):
        result = run_config(base_config(tmp_path / "out"), tmp_path)
        feature_names = set(result.feature_table.column_names)
        assert "x_reject_pct" not in feature_names
        assert "yield" not in feature_names
        assert result.targets["prob"].tree.tested_columns() <= feature_names


class TestGreyRegion:
    def test_grey_deletion_matches_interval_membership(self, tmp_path):
        doc = base_config(tmp_path / "out")
        doc["targets"][0]["strategy"] = "fixed"
        doc["targets"][0]["threshold"] = 10.0
        doc["targets"][0]["grey_half_width"] = 6.0
        result = run_config(doc, tmp_path)
        rates = result.analysis.values("x_reject_pct")
        inside = [v for v in rates if 4.0 < v < 16.0]
        assert result.targets["prob"].grey_deleted == len(inside)

    def test_zero_width_matches_no_grey_pipeline_byte_for_byte(self, tmp_path):
        explicit = base_config(tmp_path / "a")
        explicit["targets"][0]["grey_half_width"] = 0.0
        run_config(explicit, tmp_path)
        implicit = base_config(tmp_path / "b")
        run_config(implicit, tmp_path)
        a = read_all_artifacts(tmp_path / "a")
        b = read_all_artifacts(tmp_path / "b")
        # manifests differ only through the config hash; all analysis
        # artifacts must be byte-identical
        del a["manifest.json"], b["manifest.json"]
        assert a == b


class TestCorrelationScreen:
    def _csv_config(self, tmp_path):
        (tmp_path / "batch.csv").write_text(
            "batch_id,oven_temp,oven_temp_copy,noise,outcome\n"
            + "".join(
                f"b{i:02d},{300 + i},{300 + i},{(i * 7) % 13},{100 - i}\n"
                for i in range(30)
            ),
            encoding="utf-8",
        )
        return {
            "input": {"csv": [{
                "path": "batch.csv", "level": "batch", "key_columns": ["batch_id"],
                "columns": [
                    {"name": "oven_temp", "kind": "numeric"},
                    {"name": "oven_temp_copy", "kind": "numeric"},
                    {"name": "noise", "kind": "numeric"},
                    {"name": "outcome", "kind": "numeric"},
                ],
            }]},
            "targets": [{"name": "t", "source_column": "outcome", "strategy": "median"}],
            "train": {"max_depth": 3, "min_leaf": 2},
            "outputs": {"dir": "out"},
        }

    def test_duplicate_column_flagged_dropped_and_never_tested(self, tmp_path):
        result = run_config(self._csv_config(tmp_path), tmp_path)
        report = result.correlation
        assert report.coefficient("oven_temp", "oven_temp_copy") == pytest.approx(1.0)
        assert "oven_temp_copy" in report.suggested_drops
        assert "oven_temp_copy" not in result.feature_table.column_names
        tree = result.targets["t"].tree
        assert "oven_temp_copy" not in tree.tested_columns()
        # the surviving duplicate carries the signal instead
        assert "oven_temp" in tree.tested_columns()

    def test_screen_can_be_disabled(self, tmp_path):
        doc = self._csv_config(tmp_path)
        doc["screens"] = {"correlation": {"enabled": False}}
        result = run_config(doc, tmp_path)
        assert result.correlation is None
        assert "oven_temp_copy" in result.feature_table.column_names


class TestScreensAndCascade:
    def test_missing_batch_cascades_to_descendants(self, tmp_path):
        (tmp_path / "batch.csv").write_text(
            "batch_id,oven_temp,yield\nb1,350,95\nb2,NA,85\n", encoding="utf-8"
        )
        (tmp_path / "wafer.csv").write_text(
            "batch_id,wafer_id,rejected\nb1,w1,0\nb1,w2,1\nb2,w1,0\n", encoding="utf-8"
        )
        doc = {
            "input": {"csv": [
                {"path": "batch.csv", "level": "batch", "key_columns": ["batch_id"],
                 "columns": [{"name": "oven_temp", "kind": "numeric"},
                             {"name": "yield", "kind": "numeric"}]},
                {"path": "wafer.csv", "level": "wafer", "key_columns": ["batch_id", "wafer_id"],
                 "columns": [{"name": "rejected", "kind": "numeric"}]},
            ]},
            "screens": {"correlation": {"enabled": False}},
            "targets": [{"name": "t", "source_column": "yield", "strategy": "fixed", "threshold": 90.0}],
            "train": {"min_leaf": 1},
            "outputs": {"dir": "out"},
        }
        result = run_config(doc, tmp_path)
        screens = result.manifest["screens"]
        assert screens["missing_dropped"]["batch"] == 1
        assert screens["orphans_pruned"]["wafer"] == 1
        assert len(result.analysis) == 1


class TestExitCodes:
    def write_config(self, tmp_path, doc):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    def test_happy_path_exit_zero(self, tmp_path, capsys):
        path = self.write_config(tmp_path, base_config("out", n_batches=30))
        assert main(["analyze", "--config", path]) == 0
        assert (tmp_path / "out" / "manifest.json").exists()

    def test_config_without_target_exits_one(self, tmp_path, capsys):
        doc = base_config("out")
        del doc["targets"]
        path = self.write_config(tmp_path, doc)
        assert main(["analyze", "--config", path]) == 1
        assert "target" in capsys.readouterr().err

    def test_no_valley_exits_three(self, tmp_path, capsys):
        doc = base_config("out", n_batches=30)
        doc["input"]["scenario"]["effects"] = []
        doc["input"]["scenario"]["base_reject_prob"] = 0.0
        doc["targets"] = [{"name": "v", "source_column": "oven_temp", "strategy": "valley", "bins": 3}]
        path = self.write_config(tmp_path, doc)
        assert main(["analyze", "--config", path]) == 3
        assert "valley" in capsys.readouterr().err.lower()

    def test_orphan_data_exits_two(self, tmp_path, capsys):
        (tmp_path / "batch.csv").write_text("batch_id,yield\nb1,95\n", encoding="utf-8")
        (tmp_path / "wafer.csv").write_text(
            "batch_id,wafer_id,rejected\nB99,w1,0\n", encoding="utf-8"
        )
        doc = {
            "input": {"csv": [
                {"path": "batch.csv", "level": "batch", "key_columns": ["batch_id"],
                 "columns": [{"name": "yield", "kind": "numeric"}]},
                {"path": "wafer.csv", "level": "wafer", "key_columns": ["batch_id", "wafer_id"],
                 "columns": [{"name": "rejected", "kind": "numeric"}]},
            ]},
            "targets": [{"name": "t", "source_column": "yield", "strategy": "fixed", "threshold": 90.0}],
            "outputs": {"dir": "out"},
        }
        path = self.write_config(tmp_path, doc)
        assert main(["analyze", "--config", path]) == 2
        assert "B99" in capsys.readouterr().err

    def test_bad_cli_arguments_exit_one(self, capsys):
        assert main(["analyze"]) == 1
        assert main(["not-a-command"]) == 1


class TestMultipleTargets:
    def test_one_tree_per_target_with_shared_features(self, tmp_path):
        doc = base_config(tmp_path / "out", n_batches=60)
        doc["targets"] = [
            {"name": "low_yield", "source_column": "yield", "strategy": "fixed", "threshold": 75.0},
            {"name": "x_problem", "problem": {"parameter": "x", "threshold": 10.0, "min_count": 2},
             "strategy": "fixed", "U": 25.0, "direction": "above"},
        ]
        result = run_config(doc, tmp_path)
        assert set(result.targets) == {"low_yield", "x_problem"}
        names = {p.name for p in (tmp_path / "out").iterdir()}
        for target in ("low_yield", "x_problem"):
            assert {f"{target}_rules.txt", f"{target}_tree.json", f"{target}_histogram.csv"} <= names
        # both sources are shielded from the shared feature table
        assert {"yield", "x_reject_pct"} & set(result.feature_table.column_names) == set()


class TestReportMode:
    def test_no_valley_is_a_null_threshold_preview(self, tmp_path):
        doc = base_config(tmp_path / "out", n_batches=30)
        doc["input"]["scenario"]["effects"] = []
        doc["input"]["scenario"]["base_reject_prob"] = 0.0
        doc["targets"] = [{"name": "v", "source_column": "oven_temp", "strategy": "valley", "bins": 3}]
        result = run_pipeline(config_from_dict(doc, tmp_path), report_only=True)
        assert result.targets["v"].threshold is None
        assert result.manifest["targets"][0]["threshold"] is None

    def test_report_writes_aids_but_never_trains(self, tmp_path):
        out = tmp_path / "out"
        doc = base_config(out, n_batches=30)
        result = run_pipeline(config_from_dict(doc, tmp_path), report_only=True)
        names = {p.name for p in out.iterdir()}
        assert {"manifest.json", "correlation.csv", "prob_histogram.csv", "prob_over_time.csv"} <= names
        assert not any(n.endswith("_rules.txt") or n.endswith("_tree.json") for n in names)
        assert result.manifest["mode"] == "report"
        assert result.targets["prob"].threshold is not None
        assert result.targets["prob"].tree is None

    def test_report_command_exit_zero(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(base_config("out", n_batches=30)), encoding="utf-8")
        assert main(["report", "--config", str(path)]) == 0
