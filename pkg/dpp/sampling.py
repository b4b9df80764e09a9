"""
Spectral k-DPP sampler.

Phase 1 picks k eigenvectors with probability proportional to the product of
their eigenvalues, using the elementary symmetric polynomial table
E[l, m] = e_l(lam_1, ..., lam_m). Phase 2 samples the projection DPP spanned by
the chosen eigenvectors, one item at a time.

Usage:
    rng = derive_rng(seed, "batch", 0)
    sample = sample_kdpp(LEnsemble.from_features(A), k=3, rng=rng)
"""

import logging
from typing import List

import numpy as np

from common import settings
from common.errors import DegenerateKernelError, InvalidInputError
from dpp.ensemble import LEnsemble, SubsetSample
from numerics import qr_orthonormalize

logger = logging.getLogger(__name__)


def elementary_symmetric_polynomials(eigenvalues, k: int) -> np.ndarray:
    """
    Table of elementary symmetric polynomials.

    Args:
        eigenvalues: Length-N array
        k: Highest order needed

    Returns:
        (k + 1) x (N + 1) array with E[l, m] = e_l of the first m eigenvalues
    """
    values = np.asarray(eigenvalues, dtype=np.float64)
    N = values.size
    E = np.zeros((k + 1, N + 1))
    E[0, :] = 1.0
    for l in range(1, k + 1):
        for m in range(1, N + 1):
            E[l, m] = E[l, m - 1] + values[m - 1] * E[l - 1, m - 1]
    return E


def log_elementary_symmetric_polynomials(eigenvalues, k: int) -> np.ndarray:
    """Same table as elementary_symmetric_polynomials, in natural-log space."""
    values = np.asarray(eigenvalues, dtype=np.float64)
    N = values.size
    with np.errstate(divide="ignore"):
        log_values = np.log(values)
    logE = np.full((k + 1, N + 1), -np.inf)
    logE[0, :] = 0.0
    for l in range(1, k + 1):
        for m in range(1, N + 1):
            logE[l, m] = np.logaddexp(logE[l, m - 1], log_values[m - 1] + logE[l - 1, m - 1])
    return logE


def select_eigen_indices(eigenvalues, k: int, rng: np.random.Generator) -> List[int]:
    """
    Draw k eigenvector indices with probability proportional to the product
    of their eigenvalues.

    Args:
        eigenvalues: Nonzero eigenvalues
        k: Number of indices
        rng: Random stream

    Returns:
        Sorted list of k indices into eigenvalues
    """
    values = np.asarray(eigenvalues, dtype=np.float64)
    N = values.size
    if k > N:
        raise DegenerateKernelError(f"need {k} nonzero eigenvalues, have {N}")

    log_space = N > settings.LOG_SPACE_MIN_N
    if log_space:
        logE = log_elementary_symmetric_polynomials(values, k)
        with np.errstate(divide="ignore"):
            log_values = np.log(values)
    else:
        E = elementary_symmetric_polynomials(values, k)

    chosen = []
    remaining = k
    for m in range(N, 0, -1):
        if remaining == 0:
            break
        if m == remaining:
            keep = 1.0
        elif log_space:
            keep = np.exp(log_values[m - 1] + logE[remaining - 1, m - 1] - logE[remaining, m])
        else:
            keep = values[m - 1] * E[remaining - 1, m - 1] / E[remaining, m]
        if rng.random() < keep:
            chosen.append(m - 1)
            remaining -= 1

    return sorted(chosen)


def sample_projection_dpp(V: np.ndarray, rng: np.random.Generator) -> SubsetSample:
    """
    Sample the projection DPP with kernel V V^T (V has orthonormal columns).

    Each step picks item i with probability ||V[i]||^2 / (columns left), then
    restricts the span to vectors vanishing at i.
    """
    V = np.array(V, dtype=np.float64)
    n, k = V.shape
    picked: List[int] = []
    for step in range(k):
        weights = np.clip(np.sum(V ** 2, axis=1), 0.0, None)
        weights[picked] = 0.0
        i = int(rng.choice(n, p=weights / weights.sum()))
        picked.append(i)
        if step == k - 1:
            break

        j = int(np.argmax(np.abs(V[i])))
        pivot = V[:, j] / V[i, j]
        V = V - np.outer(pivot, V[i])
        V = np.delete(V, j, axis=1)
        V = qr_orthonormalize(V)

    return SubsetSample.of(picked)


def sample_kdpp(ensemble: LEnsemble, k: int, rng: np.random.Generator) -> SubsetSample:
    """
    Exact sample of size k from the k-DPP of an L-ensemble.

    Args:
        ensemble: L-ensemble with at least k eigenvalues above RANK_TOL
        k: Subset size
        rng: Random stream

    Returns:
        SubsetSample of k distinct indices
    """
    n = ensemble.n
    if k > n:
        raise InvalidInputError(f"cannot sample k={k} items from n={n}")
    if k < 1:
        raise InvalidInputError(f"k must be at least 1, got {k}")

    eig = ensemble.eig
    nonzero = eig.eigenvalues > settings.RANK_TOL
    if int(nonzero.sum()) < k:
        raise DegenerateKernelError(f"kernel rank {int(nonzero.sum())} is below k={k}")

    values = eig.eigenvalues[nonzero]
    vectors = eig.eigenvectors[:, nonzero]
    selected = select_eigen_indices(values, k, rng)
    return sample_projection_dpp(vectors[:, selected], rng)
