"""
Determinantal sampling by statevector simulation.

Loading the columns of an orthonormal n x d matrix A with Clifford loaders
on |0...0> gives the state sum over |S| = d of det(A_S) |e_S>. Measuring it
draws S with probability det(A_S)^2, the k-DPP of the projection kernel A A^T.

Usage:
    state = simulate_qdpp(A)
    counts = measure(state, shots=1000, rng=rng)
"""

import logging
from collections import Counter
from typing import Optional

import numpy as np

from common import settings
from common.errors import CapacityError, InvalidInputError
from dpp.ensemble import SubsetSample
from qdpp.statevector import StateVector, clifford_apply, subset_of_index

logger = logging.getLogger(__name__)


def _check_orthonormal(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < A.shape[1] or A.shape[1] < 1:
        raise InvalidInputError(f"A must be n x d with n >= d >= 1, got shape {A.shape}")
    if A.shape[0] > settings.STATEVECTOR_MAX_QUBITS:
        raise CapacityError(
            f"statevector simulation supports at most {settings.STATEVECTOR_MAX_QUBITS} qubits, got n={A.shape[0]}"
        )
    error = float(np.max(np.abs(A.T @ A - np.eye(A.shape[1]))))
    if error > settings.ORTHONORMAL_TOL:
        raise InvalidInputError(f"A must have orthonormal columns (max |A^T A - I| = {error:.3e})")
    return A


def simulate_qdpp(A) -> StateVector:
    """
    Statevector of the determinantal sampling circuit.

    Loaders are applied from the last column to the first, which makes the
    amplitude on |e_S> exactly det(A_S), sign included.

    Args:
        A: n x d matrix with A^T A = I (within ORTHONORMAL_TOL), n <= 14

    Returns:
        StateVector supported on Hamming weight d
    """
    A = _check_orthonormal(A)
    state = StateVector.zeros(A.shape[0])
    for j in reversed(range(A.shape[1])):
        state = clifford_apply(state, A[:, j])
    return state


def measure(state: StateVector, shots: int, rng: np.random.Generator) -> Counter:
    """
    Sample basis states with probability amplitude^2.

    Returns:
        Counter mapping SubsetSample (qubits measured as 1) to shot counts
    """
    if shots < 1:
        raise InvalidInputError(f"shots must be >= 1, got {shots}")
    probabilities = state.probabilities()
    outcomes = rng.choice(probabilities.size, size=shots, p=probabilities / probabilities.sum())
    counts: Counter = Counter()
    for index, count in zip(*np.unique(outcomes, return_counts=True)):
        counts[SubsetSample(subset_of_index(state.n_qubits, int(index)))] = int(count)
    return counts


def _lexicographic_mode(weights: dict, tol: float) -> SubsetSample:
    best = max(weights.values())
    return min((s for s, w in weights.items() if w >= best - tol), key=lambda s: s.indices)


def most_frequent_outcome(A, shots: Optional[int], rng: Optional[np.random.Generator]) -> SubsetSample:
    """
    Modal subset of the determinantal sampling circuit.

    With shots=None the mode is read from the exact output distribution
    (infinite-shot limit) and the result is deterministic. Otherwise the
    circuit is measured `shots` times and the most frequent subset returned;
    count ties go to the lexicographically smallest subset.
    """
    state = simulate_qdpp(A)
    if shots is None:
        probabilities = state.probabilities()
        support = np.flatnonzero(probabilities > settings.STATE_NORM_TOL ** 2)
        weights = {SubsetSample(subset_of_index(state.n_qubits, int(i))): float(probabilities[i]) for i in support}
        return _lexicographic_mode(weights, settings.TIE_TOL)
    if rng is None:
        raise InvalidInputError("a random stream is required when shots is finite")
    return _lexicographic_mode(dict(measure(state, shots, rng)), 0)
