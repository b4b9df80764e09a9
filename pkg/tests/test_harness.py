import json
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from common.errors import DegenerateModelError, InvalidInputError, ParseError, UndefinedMetricError
from common.rng import derive_rng
from forest import ForestConfig, TreeConfig, fit_tree
from harness.config import from_dict, load_experiment_config, parse_benchmark_config
from harness.datasets import generate_synthetic, load_csv, save_csv
from harness.evaluation import FoldReport, fold_partition, three_fold_eval
from harness.experiment import DatasetSpec, ExperimentConfig, MissingnessSpec, run_experiment, run_grid
from harness.gbt import GBTConfig, fit_gbt, predict_gbt
from harness.metrics import auc
from harness.reporting import auc_frame, rmse_frame, write_reports
from impute import ImputeConfig

FAST_GBT = GBTConfig(n_rounds=10)


def small_experiment(sampler: str, **overrides) -> ExperimentConfig:
    """120 x 4 synthetic set, 20% MCAR, one imputation iteration with three trees."""
    cfg = ExperimentConfig(
        dataset=DatasetSpec(n_rows=120, n_features=4, n_informative=4, seed=3),
        missingness=MissingnessSpec(kind="mcar", rate=0.2),
        impute=ImputeConfig(method="missforest", sampler=sampler, n_iterations=1,
                            forest=ForestConfig(n_trees=3, batch_size=60)),
        classifier=FAST_GBT,
        repeats=3,
        seed=1,
        fixed_missingness=True,
    )
    return replace(cfg, **overrides)


class TestAUC:
    def test_perfect(self):
        assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0

    def test_all_tied(self):
        assert auc([0.5] * 4, [0, 1, 0, 1]) == 0.5

    def test_hand_computed(self):
        assert auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)

    def test_single_class(self):
        with pytest.raises(UndefinedMetricError):
            auc([0.1, 0.2], [1, 1])

    def test_complement_and_monotone_invariance(self, rng):
        scores = rng.random(50)
        labels = rng.integers(0, 2, 50)
        base = auc(scores, labels)
        assert auc(1.0 - scores, labels) == pytest.approx(1.0 - base)
        assert auc(np.exp(3.0 * scores), labels) == pytest.approx(base)


class TestGBT:
    def test_separable_training_auc(self, rng):
        X = rng.standard_normal((200, 2))
        y = (X[:, 0] + X[:, 1] > 0).astype(int)
        model = fit_gbt(X, y, GBTConfig(), seed=0)
        assert auc(predict_gbt(model, X), y) > 0.99

    def test_no_op_boosting_returns_prior(self, rng):
        X = rng.standard_normal((40, 2))
        y = np.array([1] * 10 + [0] * 30)
        scores = predict_gbt(fit_gbt(X, y, GBTConfig(n_rounds=1, learning_rate=0.0)), X)
        np.testing.assert_allclose(scores, 0.25)

    def test_seeded_determinism(self, rng):
        X = rng.standard_normal((80, 3))
        y = rng.integers(0, 2, 80)
        first = predict_gbt(fit_gbt(X, y, FAST_GBT, seed=4), X)
        second = predict_gbt(fit_gbt(X, y, FAST_GBT, seed=4), X)
        np.testing.assert_array_equal(first, second)
        assert np.all((first > 0) & (first < 1))

    def test_single_class_rejected(self, rng):
        with pytest.raises(DegenerateModelError):
            fit_gbt(rng.standard_normal((10, 2)), np.zeros(10, dtype=int), FAST_GBT)


class TestSynthetic:
    def test_shape_and_balance(self):
        data = generate_synthetic(2000, 25, 25, seed=0)
        assert data.X.shape == (2000, 25)
        assert 0.4 < data.y.mean() < 0.6

    def test_reproducible(self):
        a = generate_synthetic(100, 5, 3, seed=7)
        b = generate_synthetic(100, 5, 3, seed=7)
        np.testing.assert_array_equal(a.X, b.X)
        np.testing.assert_array_equal(a.y, b.y)
        assert not np.array_equal(a.X, generate_synthetic(100, 5, 3, seed=8).X)

    def test_invalid_counts(self):
        with pytest.raises(InvalidInputError):
            generate_synthetic(100, 3, 4)
        with pytest.raises(InvalidInputError):
            generate_synthetic(100, 3, 1)

    def test_large_separation_is_learnable(self):
        data = generate_synthetic(400, 4, 4, class_sep=5.0, seed=2)
        tree = fit_tree(data.X[:200], data.y[:200].astype(float), TreeConfig(max_depth=4), derive_rng(0, "t"))
        assert auc(tree.predict(data.X[200:]), data.y[200:]) > 0.95


class TestCSV:
    def test_complete_file(self, tmp_path):
        path = tmp_path / "full.csv"
        path.write_text("a,b,outcome\n1,2,0\n3,4.5,1\n")
        data = load_csv(path)
        assert data.mask.all()
        assert data.feature_names == ("a", "b")
        np.testing.assert_array_equal(data.outcome, [0, 1])

    def test_empty_cells_masked(self, tmp_path):
        path = tmp_path / "gaps.csv"
        path.write_text("a,b,outcome\n1,,0\n,4,1\n5,6,0\n")
        data = load_csv(path)
        np.testing.assert_array_equal(data.mask, [[True, False], [False, True], [True, True]])

    def test_parse_error_location(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,outcome\n1,2,0\n3,abc,1\n")
        with pytest.raises(ParseError) as excinfo:
            load_csv(path)
        assert (excinfo.value.row, excinfo.value.column) == (3, "b")

    def test_missing_outcome(self, tmp_path):
        path = tmp_path / "no_outcome.csv"
        path.write_text("a,outcome\n1,0\n2,\n")
        with pytest.raises(InvalidInputError):
            load_csv(path)
        with pytest.raises(InvalidInputError):
            load_csv(path, outcome_column="label")

    def test_reduced_shape_and_writer(self, tmp_path):
        data = generate_synthetic(200, 3, 3, seed=1)
        mask = np.ones((200, 3), dtype=bool)
        mask[::7, 1] = False
        path = save_csv(tmp_path / "reduced.csv", data.X, data.y, data.feature_names, mask=mask)
        loaded = load_csv(path)
        assert loaded.shape == (200, 3)
        np.testing.assert_array_equal(loaded.mask, mask)
        np.testing.assert_allclose(loaded.values[mask], data.X[mask])


class TestEvaluation:
    def test_consecutive_folds(self):
        folds = fold_partition(9)
        assert [list(h) for _, h in folds] == [[0, 1, 2], [3, 4, 5], [6, 7, 8]]
        for dev, holdout in folds:
            assert np.intersect1d(dev, holdout).size == 0
            assert np.union1d(dev, holdout).size == 9

    def test_separable(self, rng):
        X = rng.standard_normal((90, 2))
        y = (X[:, 0] > 0).astype(int)
        report = three_fold_eval(X, y, FAST_GBT)
        assert all(report.mean(h) > 0.95 for h in ("H1", "H2", "H3"))

    def test_random_labels(self, rng):
        X = rng.standard_normal((600, 3))
        y = rng.integers(0, 2, 600)
        report = three_fold_eval(X, y, FAST_GBT)
        assert np.mean([report.mean(h) for h in ("H1", "H2", "H3")]) == pytest.approx(0.5, abs=0.08)

    def test_single_class_holdout(self, rng):
        y = np.array([0] * 30 + [0, 1] * 15)
        with pytest.raises(UndefinedMetricError):
            three_fold_eval(rng.standard_normal((60, 2)), y, FAST_GBT)

    def test_too_few_rows(self, rng):
        with pytest.raises(InvalidInputError):
            three_fold_eval(rng.standard_normal((20, 2)), rng.integers(0, 2, 20), FAST_GBT)

    def test_fold_report_statistics(self):
        report = FoldReport()
        for value in (0.7, 0.7, 0.7):
            report.add({"H1": value, "H2": 0.6, "H3": value})
        assert report.n_repeats == 3
        assert report.sd("H1") == 0.0
        assert report.mean("H2") == pytest.approx(0.6)
        with pytest.raises(InvalidInputError):
            report.add({"H1": 1.2, "H2": 0.5, "H3": 0.5})


class TestExperiment:
    def test_deterministic_method_has_zero_sd(self):
        result = run_experiment(small_experiment("detdpp"))
        assert len(set(result.imputed_digests)) == 1
        assert all(result.report.sd(h) == 0.0 for h in ("H1", "H2", "H3"))
        assert len(result.rmse) == 3
        assert result.key == ("SYNTH-120x4", "MCAR 0.2", "detDPP-MissForest")

    def test_uniform_varies_between_repeats(self):
        result = run_experiment(small_experiment("uniform"))
        assert len(set(result.imputed_digests)) == 3

    def test_redrawn_missingness(self):
        result = run_experiment(small_experiment("detdpp", fixed_missingness=False, repeats=2))
        assert len(set(result.imputed_digests)) == 2

    def test_bit_reproducible(self):
        cfg = small_experiment("dpp", repeats=2)
        assert run_experiment(cfg).imputed_digests == run_experiment(cfg).imputed_digests

    def test_grid_and_reports(self, tmp_path):
        base = small_experiment("uniform", repeats=2)
        missingness = [MissingnessSpec("mcar", 0.2), MissingnessSpec("mnar", 0.2, 0.5)]
        methods = [("missforest", "uniform"), ("mice_pmm", "detdpp")]
        results = run_grid(base, missingness, methods)
        assert len(results) == 4
        assert [r.method for r in results] == ["MissForest", "detDPP-MICE"] * 2

        table = auc_frame(results)
        assert len(table) == 12
        assert {"mean", "sd", "auc_1", "auc_2"} <= set(table.columns)
        assert len(rmse_frame(results)) == 4

        written = write_reports(results, tmp_path, stem="grid", formats=("csv", "json", "xlsx"))
        assert len(pd.read_csv(written["auc_csv"])) == 12
        assert len(json.loads(written["rmse_json"].read_text())) == 4
        assert set(pd.read_excel(written["xlsx"], sheet_name=None)) == {"auc", "rmse"}

    def test_repeats_validated(self):
        with pytest.raises(InvalidInputError):
            ExperimentConfig(repeats=0)

    def test_missingness_labels(self):
        assert MissingnessSpec("mnar", 0.2, 0.5).label == "MNAR 0.2 delta=0.5"
        assert MissingnessSpec("none").label == "none"


class TestConfig:
    def test_nested_dataclasses(self):
        cfg = from_dict(ExperimentConfig, {
            "dataset": {"n_rows": 300},
            "impute": {"sampler": "detdpp", "forest": {"n_trees": 4, "tree": {"min_samples_leaf": 2}}},
            "repeats": 2,
        })
        assert cfg.dataset.n_rows == 300
        assert cfg.impute.forest.n_trees == 4
        assert cfg.impute.forest.tree.min_samples_leaf == 2
        assert cfg.repeats == 2

    def test_unknown_keys_rejected(self):
        with pytest.raises(InvalidInputError):
            from_dict(ExperimentConfig, {"impute": {"samplr": "dpp"}})

    def test_load_file(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({"missingness": {"kind": "mnar", "rate": 0.2, "delta": 0.5}}))
        assert load_experiment_config(path).missingness.delta == 0.5
        with pytest.raises(InvalidInputError):
            load_experiment_config(tmp_path / "missing.json")

    def test_benchmark_config(self):
        base, missingness, methods = parse_benchmark_config({
            "experiment": {"repeats": 1},
            "missingness": [{"kind": "mcar", "rate": 0.1}],
            "methods": [["missforest", "dpp"]],
        })
        assert base.repeats == 1
        assert missingness[0].rate == 0.1
        assert methods == [("missforest", "dpp")]
        with pytest.raises(InvalidInputError):
            parse_benchmark_config({"missingness": [], "methods": []})
