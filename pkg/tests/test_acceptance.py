"""
End-to-end properties of the samplers, the imputation pipeline and the
circuit simulator at benchmark scale. Run with `pytest -m slow`.

The benchmark comparisons use reduced settings for runtime: 2 imputation
iterations and a 20-round classifier, where configs/benchmark.json uses 10
and 100.
"""

import itertools
import logging
import math
import warnings
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from common.rng import derive_rng
from dpp import LEnsemble, det_kdpp, kdpp_distribution_bruteforce, marginal_kernel, sample_kdpp, subset_prob
from forest import ForestConfig, TreeConfig, fit_forest
from harness.datasets import generate_synthetic
from harness.experiment import DatasetSpec, ExperimentConfig, MissingnessSpec, run_experiment
from harness.gbt import GBTConfig
from impute import ImputeConfig, impute, induce_mcar
from qdpp import LoaderTopology, build_qdpp_circuit, measure, most_frequent_outcome, resources, simulate_qdpp
from tests.helpers import greedy_oracle, random_orthonormal, random_psd

pytestmark = pytest.mark.slow

logger = logging.getLogger(__name__)

BENCH_GBT = GBTConfig(n_rounds=20)


def bench_config(method: str, sampler: str, missingness: MissingnessSpec, repeats: int) -> ExperimentConfig:
    return ExperimentConfig(
        dataset=DatasetSpec(n_rows=500, n_features=8, n_informative=8, seed=0),
        missingness=missingness,
        impute=ImputeConfig(method=method, sampler=sampler, n_iterations=2),
        classifier=BENCH_GBT,
        repeats=repeats,
        seed=11,
        fixed_missingness=True,
    )


def chi_square_pvalue(counts: Counter, distribution, n_samples: int) -> float:
    """Goodness of fit with bins of expected count below 5 merged into one."""
    observed, expected = [], []
    small_observed = small_expected = 0.0
    for subset, p in distribution.probabilities.items():
        if p * n_samples < 5:
            small_observed += counts.get(subset, 0)
            small_expected += p * n_samples
        else:
            observed.append(counts.get(subset, 0))
            expected.append(p * n_samples)
    if small_expected > 0:
        observed.append(small_observed)
        expected.append(small_expected)
    expected = np.array(expected) * (sum(observed) / sum(expected))
    return float(stats.chisquare(observed, expected).pvalue)


def test_kdpp_sampler_matches_enumeration():
    n_samples = 50_000
    for trial in range(20):
        rng = derive_rng(trial, "acceptance", "kdpp")
        ensemble = LEnsemble(random_psd(rng, 6))
        k = 2 + trial % 2
        exact = kdpp_distribution_bruteforce(ensemble, k)
        counts = Counter(sample_kdpp(ensemble, k, rng).indices for _ in range(n_samples))
        assert exact.total_variation(counts) <= 0.02
        assert chi_square_pvalue(counts, exact, n_samples) > 0.001


def test_greedy_selection_matches_pinv_oracle():
    rng = derive_rng(0, "acceptance", "greedy")
    for _ in range(200):
        n = int(rng.integers(3, 13))
        k = int(rng.integers(1, n))
        K = random_psd(rng, n)
        assert det_kdpp(K, k).indices == greedy_oracle(K, k)

    K = random_psd(rng, 12)
    first = det_kdpp(K, 5)
    assert all(det_kdpp(K, 5) == first for _ in range(100))


@pytest.mark.parametrize("method", ["missforest", "mice_pmm"])
def test_deterministic_imputation_has_zero_variance(method):
    mcar = MissingnessSpec("mcar", 0.2)
    detdpp = run_experiment(bench_config(method, "detdpp", mcar, repeats=10))
    assert len(set(detdpp.imputed_digests)) == 1
    assert all(detdpp.report.sd(h) == 0.0 for h in ("H1", "H2", "H3"))

    uniform = run_experiment(bench_config(method, "uniform", mcar, repeats=3))
    assert len(set(uniform.imputed_digests)) == 3
    assert any(uniform.report.sd(h) > 0.0 for h in ("H1", "H2", "H3"))


@pytest.mark.parametrize("missingness", [MissingnessSpec("mcar", 0.2), MissingnessSpec("mnar", 0.2, 0.5)])
def test_dpp_samplers_keep_up_with_uniform(missingness):
    means = {}
    for sampler in ("uniform", "dpp", "detdpp"):
        result = run_experiment(bench_config("missforest", sampler, missingness, repeats=10))
        means[result.method] = float(np.mean([result.report.mean(h) for h in ("H1", "H2", "H3")]))
    logger.info(f"{missingness.label}: " + ", ".join(f"{m}={v:.4f}" for m, v in means.items()))

    baseline = means["MissForest"]
    for method in ("DPP-MissForest", "detDPP-MissForest"):
        assert 0.0 <= means[method] <= 1.0
        if means[method] < baseline - 0.005:
            warnings.warn(f"{method} mean AUC {means[method]:.4f} is below MissForest {baseline:.4f} "
                          f"under {missingness.label}")


@pytest.mark.parametrize("n,d", [(4, 2), (6, 3), (8, 4)])
def test_circuit_amplitudes_are_minors(n, d):
    rng = derive_rng(n, "acceptance", "minors")
    for _ in range(50):
        A = random_orthonormal(rng, n, d)
        state = simulate_qdpp(A)
        in_sector = state.hamming_weights() == d
        assert np.max(np.abs(state.amplitudes[~in_sector])) <= 1e-9
        for S in itertools.combinations(range(n), d):
            assert state.amplitude(S) == pytest.approx(np.linalg.det(A[list(S)]), abs=1e-9)


def test_measurements_match_projection_kdpp():
    rng = derive_rng(0, "acceptance", "bridge")
    A = random_orthonormal(rng, 6, 3)
    exact = kdpp_distribution_bruteforce(LEnsemble.from_features(A), 3)
    counts = measure(simulate_qdpp(A), 100_000, rng)
    assert exact.total_variation(counts) <= 0.02


def test_finite_shot_mode_is_reliable():
    rng = derive_rng(1, "acceptance", "mode")
    hits = trials = 0
    while trials < 100:
        A = random_orthonormal(rng, 6, 3)
        probabilities = sorted(kdpp_distribution_bruteforce(LEnsemble.from_features(A), 3).probabilities.values())
        if probabilities[-1] - probabilities[-2] < 0.05:
            continue
        truth = most_frequent_outcome(A, None, None)
        for _ in range(10):
            hits += most_frequent_outcome(A, 1000, rng) == truth
            trials += 1
    assert hits >= 95


def test_small_batch_protocol():
    data = generate_synthetic(100, 3, 3, seed=5)
    X = data.X[:10]
    cfg = ForestConfig(n_trees=4, sampler="detdpp", batch_size=10, k_per_batch=2, tree=TreeConfig(min_samples_leaf=1))
    model = fit_forest(X, data.y[:10].astype(float), cfg)
    assert [(use.size, use.k) for use in model.kernel_uses] == [(10, 2), (8, 2), (6, 2), (4, 2)]

    masked = induce_mcar(data.to_masked(), 0.2, derive_rng(0, "acceptance", "mask"))
    forest_cfg = ForestConfig(n_trees=4, batch_size=10, k_per_batch=2, shots=None)
    runs = [
        impute(masked, ImputeConfig(sampler="qdetdpp", n_iterations=2, forest=forest_cfg, seed=seed))
        for seed in (1, 2)
    ]
    np.testing.assert_array_equal(runs[0], runs[1])
    assert np.all(np.isfinite(runs[0]))


def test_parallel_depth_at_scale():
    A = random_orthonormal(derive_rng(0, "acceptance", "depth"), 150, 14)
    depth = resources(build_qdpp_circuit(A, LoaderTopology.PARALLEL))["depth"]
    target = 4 * 14 * math.log2(150)
    assert target / 2 <= depth <= target * 2


def test_diagonal_depth_is_linear():
    sizes = [8, 16, 32, 64]
    rng = derive_rng(0, "acceptance", "diagonal")
    depths = [resources(build_qdpp_circuit(random_orthonormal(rng, n, 2), LoaderTopology.DIAGONAL))["depth"]
              for n in sizes]
    slope = np.polyfit(np.log(sizes), np.log(depths), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.15)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_marginals_from_enumeration(n):
    rng = derive_rng(n, "acceptance", "marginals")
    ensemble = LEnsemble.from_features(rng.standard_normal((n, n)))
    K = marginal_kernel(ensemble)
    probabilities = {
        S: subset_prob(ensemble, S)
        for size in range(n + 1)
        for S in itertools.combinations(range(n), size)
    }
    for size in (1, 2):
        for T in itertools.combinations(range(n), size):
            inclusion = sum(p for S, p in probabilities.items() if set(T) <= set(S))
            assert inclusion == pytest.approx(np.linalg.det(K[np.ix_(T, T)]), abs=1e-8)
