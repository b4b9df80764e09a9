"""
Brute-force k-DPP distributions for small ground sets.

These enumerate every k-subset and are meant as oracles for tests and for
comparing the greedy selection with the true mode.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Mapping, Tuple

import numpy as np

from common import settings
from common.errors import CapacityError, DegenerateKernelError, InvalidInputError
from dpp.ensemble import LEnsemble, SubsetSample
from numerics import det

logger = logging.getLogger(__name__)

# Probability mass tolerance for a valid distribution
_MASS_TOL = 1e-9


@dataclass(frozen=True)
class SubsetDistribution:
    """Probabilities of index subsets, keyed by strictly increasing tuples."""

    probabilities: Dict[Tuple[int, ...], float]

    def __post_init__(self):
        values = np.array(list(self.probabilities.values()), dtype=np.float64)
        if np.any(values < 0):
            raise InvalidInputError("subset probabilities must be non-negative")
        total = float(values.sum())
        if abs(total - 1.0) > _MASS_TOL:
            raise InvalidInputError(f"subset probabilities sum to {total}, not 1")

    @classmethod
    def from_counts(cls, counts: Mapping) -> "SubsetDistribution":
        """Empirical distribution of observed subsets."""
        total = sum(counts.values())
        if total <= 0:
            raise InvalidInputError("cannot build a distribution from zero counts")
        return cls({tuple(key): count / total for key, count in counts.items()})

    def prob(self, subset) -> float:
        return self.probabilities.get(tuple(subset), 0.0)

    def mode(self) -> SubsetSample:
        """Most probable subset; near-ties go to the lexicographically smallest."""
        best = max(self.probabilities.values())
        candidates = [s for s, p in self.probabilities.items() if p >= best - settings.TIE_TOL]
        return SubsetSample(min(candidates))

    def total_variation(self, other) -> float:
        """Total-variation distance to another distribution or a Counter of samples."""
        if isinstance(other, Counter):
            other = SubsetDistribution.from_counts(other)
        keys = set(self.probabilities) | set(other.probabilities)
        return 0.5 * sum(abs(self.prob(key) - other.prob(key)) for key in keys)

    def __len__(self) -> int:
        return len(self.probabilities)


def kdpp_distribution_bruteforce(ensemble: LEnsemble, k: int) -> SubsetDistribution:
    """
    Exact k-DPP distribution by enumerating all k-subsets.

    Args:
        ensemble: L-ensemble with n <= BRUTEFORCE_MAX_N
        k: Subset size, 0 < k <= n

    Returns:
        SubsetDistribution with P(T) = det(L_TT) / sum over |T'| = k of det(L_T'T')
    """
    n = ensemble.n
    if n > settings.BRUTEFORCE_MAX_N:
        raise CapacityError(f"brute-force enumeration supports n <= {settings.BRUTEFORCE_MAX_N}, got {n}")
    if not 0 < k <= n:
        raise InvalidInputError(f"k must satisfy 0 < k <= n={n}, got {k}")
    rank = ensemble.rank()
    if rank < k:
        raise DegenerateKernelError(f"kernel rank {rank} is below k={k}")

    weights = {}
    for subset in itertools.combinations(range(n), k):
        weights[subset] = max(det(ensemble.submatrix(subset)), 0.0)

    total = sum(weights.values())
    if total <= 0.0:
        raise DegenerateKernelError(f"all {k}x{k} principal minors vanish")
    return SubsetDistribution({subset: w / total for subset, w in weights.items()})


def highest_prob_subset_bruteforce(ensemble: LEnsemble, k: int) -> SubsetSample:
    """Mode of the k-DPP; ties go to the lexicographically smallest subset."""
    return kdpp_distribution_bruteforce(ensemble, k).mode()
