from collections import Counter

import numpy as np
import pytest

from common.errors import DegenerateKernelError, InvalidInputError
from common.rng import derive_rng
from dpp import LEnsemble, kdpp_distribution_bruteforce
from forest import ForestConfig, ForestModel, TreeConfig, fit_forest, fit_tree, partition_batches, predict_forest
from forest.forest import forest_scores, resolve_k
from forest.subsampling import bootstrap_indices, is_deterministic, quantum_kdpp_sample, standardize

EXACT_TREE = TreeConfig(max_depth=None, min_samples_leaf=1, max_features=1.0)


class TestTree:
    def test_constant_target_is_single_leaf(self, rng):
        X = rng.standard_normal((20, 3))
        tree = fit_tree(X, np.full(20, 4.5), EXACT_TREE, rng)
        assert tree.depth == 0
        np.testing.assert_array_equal(tree.predict(rng.standard_normal((5, 3))), 4.5)

    def test_perfect_split_at_midpoint(self, rng):
        tree = fit_tree([[0.0], [1.0]], [0.0, 10.0], EXACT_TREE, rng)
        assert tree.root.threshold == pytest.approx(0.5)
        np.testing.assert_array_equal(tree.predict([[0.0], [1.0], [0.4], [0.6]]), [0.0, 10.0, 0.0, 10.0])

    def test_staircase_interpolated(self, rng):
        x = np.arange(30, dtype=float)[:, None]
        y = np.floor(x[:, 0] / 3.0) * 2.0
        tree = fit_tree(x, y, EXACT_TREE, rng)
        np.testing.assert_array_equal(tree.predict(x), y)

    def test_gini_classification(self, rng):
        X = np.array([[0.0], [0.1], [0.2], [1.0], [1.1], [1.2]])
        y = np.array([0, 0, 0, 1, 1, 1])
        tree = fit_tree(X, y, TreeConfig.for_task("classification"), rng)
        np.testing.assert_array_equal(tree.predict(X), y)

    def test_max_depth_respected(self, rng):
        X = rng.standard_normal((100, 2))
        tree = fit_tree(X, rng.standard_normal(100), TreeConfig(max_depth=2), rng)
        assert tree.depth <= 2
        assert tree.n_leaves <= 4

    def test_min_samples_leaf(self, rng):
        X = rng.standard_normal((60, 2))
        tree = fit_tree(X, rng.standard_normal(60), TreeConfig(min_samples_leaf=7), rng)
        assert all(rows.size >= 7 for rows, _ in tree.leaf_groups(X))

    def test_column_mismatch(self, rng):
        tree = fit_tree(rng.standard_normal((10, 2)), rng.standard_normal(10), EXACT_TREE, rng)
        with pytest.raises(InvalidInputError):
            tree.predict(np.zeros((3, 3)))

    def test_config_validation(self):
        with pytest.raises(InvalidInputError):
            TreeConfig(max_features=0.0)
        with pytest.raises(InvalidInputError):
            TreeConfig(min_samples_leaf=0)


class TestPartitionBatches:
    def test_two_full_batches(self, rng):
        batches = partition_batches(300, None, 150, False, rng)
        assert [b.size for b in batches] == [150, 150]

    def test_clamped_to_one_batch(self, rng):
        batches = partition_batches(10, None, 150, False, rng)
        assert len(batches) == 1
        np.testing.assert_array_equal(batches[0], np.arange(10))

    def test_disjoint_cover_balanced(self, rng):
        batches = partition_batches(331, None, 50, False, rng)
        assert len(batches) == 7
        np.testing.assert_array_equal(np.sort(np.concatenate(batches)), np.arange(331))
        sizes = [b.size for b in batches]
        assert max(sizes) - min(sizes) <= 1

    def test_stratified(self, rng):
        y = np.array([1] * 30 + [0] * 70)
        batches = partition_batches(100, y, 50, True, rng)
        assert len(batches) == 2
        for batch in batches:
            assert abs(int(y[batch].sum()) - 15) <= 1

    def test_batch_size_validation(self, rng):
        with pytest.raises(InvalidInputError):
            partition_batches(10, None, 1, False, rng)


class TestSubsampling:
    def test_standardize_constant_column(self):
        Z = standardize(np.array([[1.0, 5.0], [3.0, 5.0]]))
        np.testing.assert_allclose(Z, [[-1.0, 0.0], [1.0, 0.0]])

    def test_bootstrap_unique_fraction(self):
        fractions = [
            np.unique(bootstrap_indices(500, derive_rng(0, "boot", t))).size / 500 for t in range(200)
        ]
        assert np.mean(fractions) == pytest.approx(1.0 - np.exp(-1.0), abs=0.03)

    def test_quantum_sample_matches_bruteforce(self):
        rng = derive_rng(17, "quantum-kdpp")
        ensemble = LEnsemble.from_features(rng.standard_normal((7, 3)))
        counts = Counter(quantum_kdpp_sample(ensemble, 2, rng) for _ in range(20000))
        oracle = kdpp_distribution_bruteforce(ensemble, 2)
        assert oracle.total_variation(counts) <= 0.02

    @pytest.mark.parametrize("sampler,shots,expected", [
        ("detdpp", 1000, True),
        ("qdetdpp", None, True),
        ("qdetdpp", 1000, False),
        ("qdpp", None, False),
        ("dpp", None, False),
        ("uniform", None, False),
    ])
    def test_is_deterministic(self, sampler, shots, expected):
        assert is_deterministic(sampler, shots) is expected


class TestFitForest:
    def test_sequential_kernel_sizes(self, rng):
        X = rng.standard_normal((10, 3))
        y = rng.standard_normal(10)
        cfg = ForestConfig(n_trees=4, sampler="detdpp", batch_size=10, k_per_batch=2, tree=EXACT_TREE)
        model = fit_forest(X, y, cfg)
        assert [(use.size, use.k) for use in model.kernel_uses] == [(10, 2), (8, 2), (6, 2), (4, 2)]
        rows = np.concatenate(model.train_indices)
        assert rows.size == 8 and np.unique(rows).size == 8

    def test_detdpp_ignores_seed(self, rng):
        X = rng.standard_normal((120, 4))
        y = rng.standard_normal(120)
        fits = [
            fit_forest(X, y, ForestConfig(n_trees=5, sampler="detdpp", batch_size=60, seed=seed))
            for seed in (1, 2)
        ]
        for a, b in zip(fits[0].train_indices, fits[1].train_indices):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(predict_forest(fits[0], X), predict_forest(fits[1], X))

    def test_dpp_training_sets(self, rng):
        X = rng.standard_normal((100, 3))
        y = rng.standard_normal(100)
        model = fit_forest(X, y, ForestConfig(n_trees=6, sampler="dpp", batch_size=50, seed=4))
        assert len(model.trees) == 6
        for rows in model.train_indices:
            assert rows.size == 3 * 2
            assert np.unique(rows).size == rows.size

    def test_qdpp_training_sets(self, rng):
        X = rng.standard_normal((28, 3))
        y = rng.standard_normal(28)
        model = fit_forest(X, y, ForestConfig(n_trees=4, sampler="qdpp", batch_size=14, seed=6))
        assert len(model.trees) == 4
        assert model.kernel_uses == []
        for rows in model.train_indices:
            assert rows.size == 3 * 2
            assert np.unique(rows).size == rows.size

    def test_finite_shot_qdetdpp(self, rng):
        X = rng.standard_normal((24, 3))
        y = rng.standard_normal(24)
        cfg = ForestConfig(n_trees=3, sampler="qdetdpp", batch_size=12, k_per_batch=2, shots=200, seed=5)
        assert not cfg.deterministic
        assert cfg.stream_seed == 5
        first, second = fit_forest(X, y, cfg), fit_forest(X, y, cfg)
        for a, b in zip(first.train_indices, second.train_indices):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(predict_forest(first, X), predict_forest(second, X))
        assert [(use.size, use.k) for use in first.kernel_uses] == [(12, 2), (10, 2), (8, 2)] * 2
        rows = np.concatenate(first.train_indices)
        assert rows.size == 12 and np.unique(rows).size == 12

    def test_uniform_reproducible(self, rng):
        X = rng.standard_normal((50, 3))
        y = rng.standard_normal(50)
        cfg = ForestConfig(n_trees=1, sampler="uniform", seed=9)
        first, second = fit_forest(X, y, cfg), fit_forest(X, y, cfg)
        np.testing.assert_array_equal(first.train_indices[0], second.train_indices[0])
        np.testing.assert_array_equal(predict_forest(first, X), predict_forest(second, X))
        assert first.train_indices[0].size == 50

    def test_oob_complements_training_rows(self, rng):
        X = rng.standard_normal((40, 2))
        model = fit_forest(X, rng.standard_normal(40), ForestConfig(n_trees=3, seed=1))
        for rows, oob in zip(model.train_indices, model.oob_indices):
            assert np.intersect1d(rows, oob).size == 0
            assert np.union1d(rows, oob).size == 40

    def test_rank_deficient_batch_named(self, rng):
        X = np.repeat(rng.standard_normal((20, 1)), 3, axis=1)
        with pytest.raises(DegenerateKernelError) as excinfo:
            fit_forest(X, rng.standard_normal(20), ForestConfig(n_trees=2, sampler="dpp", batch_size=20,
                                                                 k_per_batch=2))
        assert excinfo.value.batch == 0

    def test_detdpp_capacity_checked(self):
        cfg = ForestConfig(n_trees=10, sampler="detdpp", batch_size=20, k_per_batch=3)
        with pytest.raises(InvalidInputError):
            resolve_k(cfg, n_features=3, smallest_batch=20)

    def test_detdpp_default_k_capped(self):
        cfg = ForestConfig(n_trees=10, sampler="detdpp", batch_size=150)
        assert resolve_k(cfg, n_features=25, smallest_batch=150) == 15
        assert resolve_k(cfg, n_features=8, smallest_batch=150) == 8

    def test_config_validation(self):
        with pytest.raises(InvalidInputError):
            ForestConfig(sampler="bagging")
        with pytest.raises(InvalidInputError):
            ForestConfig(batch_size=10, k_per_batch=11)


class TestPredictForest:
    def _constant_trees(self, values, task, rng):
        cfg = TreeConfig.for_task(task)
        X = np.zeros((4, 1))
        return [fit_tree(X, np.full(4, v), cfg, rng) for v in values]

    def test_regression_mean(self, rng):
        trees = self._constant_trees([1.0, 2.0, 3.0], "regression", rng)
        model = ForestModel(trees, ForestConfig(n_trees=3), n_features=1, train_indices=[], oob_indices=[])
        np.testing.assert_allclose(predict_forest(model, np.zeros((2, 1))), [2.0, 2.0])

    def test_majority_vote(self, rng):
        trees = self._constant_trees([1, 1, 0], "classification", rng)
        cfg = ForestConfig(n_trees=3, tree=TreeConfig.for_task("classification"))
        model = ForestModel(trees, cfg, n_features=1, train_indices=[], oob_indices=[], classes=np.array([0, 1]))
        np.testing.assert_array_equal(predict_forest(model, np.zeros((1, 1))), [1])
        np.testing.assert_allclose(forest_scores(model, np.zeros((1, 1))), [[1 / 3, 2 / 3]])

    def test_vote_tie_goes_to_lowest_class(self, rng):
        trees = self._constant_trees([1, 0], "classification", rng)
        cfg = ForestConfig(n_trees=2, tree=TreeConfig.for_task("classification"))
        model = ForestModel(trees, cfg, n_features=1, train_indices=[], oob_indices=[], classes=np.array([0, 1]))
        np.testing.assert_array_equal(predict_forest(model, np.zeros((1, 1))), [0])

    def test_single_tree_forest(self, rng):
        X = rng.standard_normal((30, 2))
        y = X[:, 0] * 3.0
        model = fit_forest(X, y, ForestConfig(n_trees=1, seed=2, tree=EXACT_TREE))
        np.testing.assert_array_equal(predict_forest(model, X), model.trees[0].predict(X))

    def test_column_mismatch(self, rng):
        model = fit_forest(rng.standard_normal((20, 2)), rng.standard_normal(20), ForestConfig(n_trees=2))
        with pytest.raises(InvalidInputError):
            predict_forest(model, np.zeros((3, 4)))
