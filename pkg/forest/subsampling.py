"""
Row subsampling strategies for forest training sets.

    uniform   bootstrap: n draws with replacement
    dpp       fresh k-DPP sample from every batch, per tree
    detdpp    per batch, greedy k-DPP selection for tree 0, remove the rows,
              repeat on the remaining rows for tree 1, ...
    qdpp      like dpp, with the projection step done by measuring the
              simulated determinantal circuit once
    qdetdpp   like detdpp, with the most frequent circuit outcome in place
              of the greedy selection (shots=None: exact, deterministic)

Batch kernels are L = Z Z^T where Z holds the batch rows z-scored per feature.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from common import settings
from common.errors import DegenerateKernelError, InvalidInputError
from dpp import LEnsemble, SubsetSample, det_kdpp, sample_kdpp, select_eigen_indices
from qdpp.sampling import measure, most_frequent_outcome, simulate_qdpp

logger = logging.getLogger(__name__)

SAMPLERS = ("uniform", "dpp", "detdpp", "qdpp", "qdetdpp")
SEQUENTIAL_SAMPLERS = ("detdpp", "qdetdpp")
QUANTUM_SAMPLERS = ("qdpp", "qdetdpp")


@dataclass(frozen=True)
class KernelUse:
    """One sequential selection: which batch and tree, kernel size and k."""

    batch: int
    tree: int
    size: int
    k: int


def is_deterministic(sampler: str, shots: Optional[int]) -> bool:
    return sampler == "detdpp" or (sampler == "qdetdpp" and shots is None)


def standardize(X: np.ndarray) -> np.ndarray:
    """Per-column z-score; constant columns are only centered."""
    X = np.asarray(X, dtype=np.float64)
    std = X.std(axis=0)
    std[std == 0.0] = 1.0
    return (X - X.mean(axis=0)) / std


def batch_ensemble(X_batch: np.ndarray) -> LEnsemble:
    return LEnsemble.from_features(standardize(X_batch))


def bootstrap_indices(n_rows: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, n_rows, size=n_rows)


def top_eigenvectors(ensemble: LEnsemble, k: int) -> np.ndarray:
    eig = ensemble.eig
    rank = eig.rank(settings.RANK_TOL)
    if rank < k:
        raise DegenerateKernelError(f"kernel rank {rank} is below k={k}")
    return eig.eigenvectors[:, :k]


def quantum_kdpp_sample(ensemble: LEnsemble, k: int, rng: np.random.Generator) -> SubsetSample:
    """k-DPP sample whose projection phase is one measurement of the simulated circuit."""
    if k > ensemble.n:
        raise InvalidInputError(f"cannot sample k={k} items from n={ensemble.n}")
    eig = ensemble.eig
    nonzero = eig.eigenvalues > settings.RANK_TOL
    if int(nonzero.sum()) < k:
        raise DegenerateKernelError(f"kernel rank {int(nonzero.sum())} is below k={k}")
    selected = select_eigen_indices(eig.eigenvalues[nonzero], k, rng)
    V = eig.eigenvectors[:, nonzero][:, selected]
    counts = measure(simulate_qdpp(V), shots=1, rng=rng)
    return next(iter(counts))


def stochastic_selection(ensemble: LEnsemble, k: int, sampler: str, rng: np.random.Generator) -> SubsetSample:
    if sampler == "qdpp":
        return quantum_kdpp_sample(ensemble, k, rng)
    return sample_kdpp(ensemble, k, rng)


def sequential_selection(
    ensemble: LEnsemble,
    k: int,
    n_trees: int,
    sampler: str,
    shots: Optional[int],
    rng_for_tree: Callable[[int], np.random.Generator],
) -> Tuple[List[np.ndarray], List[int]]:
    """
    Selection with removal within one batch.

    Tree t gets k rows chosen from the rows not yet assigned to trees 0..t-1.
    The kernel for tree t is the principal submatrix of the batch kernel on
    the remaining rows.

    Returns:
        (per-tree arrays of batch-local row indices, kernel size used per tree)
    """
    if n_trees * k > ensemble.n:
        raise InvalidInputError(
            f"{n_trees} trees x k={k} rows exceed the batch of {ensemble.n} rows"
        )

    remaining = np.arange(ensemble.n)
    picks: List[np.ndarray] = []
    sizes: List[int] = []
    for tree in range(n_trees):
        sub = ensemble if remaining.size == ensemble.n else ensemble.restrict(remaining)
        sizes.append(int(remaining.size))
        if sampler == "qdetdpp":
            chosen = most_frequent_outcome(top_eigenvectors(sub, k), shots, rng_for_tree(tree))
        else:
            chosen = det_kdpp(sub.L, k, eig=sub.eig)
        local = remaining[chosen.as_array()]
        picks.append(local)
        remaining = np.setdiff1d(remaining, local)
    return picks, sizes
