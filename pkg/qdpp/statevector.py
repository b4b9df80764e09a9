"""
Real statevectors and the gates the determinantal sampling circuit uses.

Basis ordering: qubit 0 is the most significant bit, so qubit q sits at bit
position n - 1 - q of the basis index and the subset S maps to the integer
with those bits set.

All gate functions are pure: they return a new StateVector.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from common import settings
from common.errors import CapacityError, InvalidInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=np.float64)
        if amplitudes.shape != (2 ** self.n_qubits,):
            raise InvalidInputError(
                f"{self.n_qubits} qubits need {2 ** self.n_qubits} amplitudes, got shape {amplitudes.shape}"
            )
        norm = float(np.sum(amplitudes ** 2))
        if abs(norm - 1.0) > settings.STATE_NORM_TOL:
            raise InvalidInputError(f"state is not normalized (squared norm {norm})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def zeros(cls, n_qubits: int) -> "StateVector":
        """The all-zero state |0...0>."""
        if n_qubits < 1:
            raise InvalidInputError(f"need at least one qubit, got {n_qubits}")
        if n_qubits > settings.STATEVECTOR_MAX_QUBITS:
            raise CapacityError(
                f"statevector simulation supports at most {settings.STATEVECTOR_MAX_QUBITS} qubits, got {n_qubits}"
            )
        amplitudes = np.zeros(2 ** n_qubits)
        amplitudes[0] = 1.0
        return cls(n_qubits, amplitudes)

    @classmethod
    def basis(cls, n_qubits: int, subset: Iterable[int]) -> "StateVector":
        """The basis state with qubits in subset set to 1."""
        state = np.zeros(2 ** n_qubits)
        state[index_of_subset(n_qubits, subset)] = 1.0
        return cls(n_qubits, state)

    def amplitude(self, subset: Iterable[int]) -> float:
        return float(self.amplitudes[index_of_subset(self.n_qubits, subset)])

    def probabilities(self) -> np.ndarray:
        return self.amplitudes ** 2

    def hamming_weights(self) -> np.ndarray:
        return _bits(self.n_qubits).sum(axis=0)


def index_of_subset(n_qubits: int, subset: Iterable[int]) -> int:
    index = 0
    for q in subset:
        _check_qubit(n_qubits, q)
        index |= _mask(n_qubits, q)
    return index


def subset_of_index(n_qubits: int, index: int) -> Tuple[int, ...]:
    return tuple(q for q in range(n_qubits) if index & _mask(n_qubits, q))


def _mask(n_qubits: int, q: int) -> int:
    return 1 << (n_qubits - 1 - q)


def _bits(n_qubits: int) -> np.ndarray:
    """bits[q, i] = value of qubit q in basis state i."""
    index = np.arange(2 ** n_qubits)
    shifts = n_qubits - 1 - np.arange(n_qubits)
    return (index[None, :] >> shifts[:, None]) & 1


def _check_qubit(n_qubits: int, q: int) -> None:
    if not 0 <= q < n_qubits:
        raise InvalidInputError(f"qubit index {q} out of range for {n_qubits} qubits")


def _check_pair(state: StateVector, q1: int, q2: int) -> None:
    _check_qubit(state.n_qubits, q1)
    _check_qubit(state.n_qubits, q2)
    if q1 == q2:
        raise InvalidInputError(f"two-qubit gate needs distinct qubits, got {q1} twice")


def _rotate_pair(state: StateVector, q1: int, q2: int, theta: float, signs: np.ndarray) -> StateVector:
    # |01> -> cos|01> - s|10>, |10> -> s|01> + cos|10>, with s = sin(theta) * signs
    n = state.n_qubits
    bits = _bits(n)
    psi = state.amplitudes
    i01 = np.flatnonzero((bits[q1] == 0) & (bits[q2] == 1))
    i10 = i01 ^ _mask(n, q1) ^ _mask(n, q2)
    c = np.cos(theta)
    s = np.sin(theta) * signs[i01]
    out = psi.copy()
    out[i01] = c * psi[i01] + s * psi[i10]
    out[i10] = -s * psi[i01] + c * psi[i10]
    return StateVector(n, out)


def apply_rbs(state: StateVector, q1: int, q2: int, theta: float) -> StateVector:
    """
    Reconfigurable beam splitter on (q1, q2).

    Rotates the {|01>, |10>} subspace by theta and fixes |00> and |11>, so the
    Hamming weight is preserved.
    """
    _check_pair(state, q1, q2)
    return _rotate_pair(state, q1, q2, theta, np.ones(2 ** state.n_qubits))


def apply_fbs(state: StateVector, q1: int, q2: int, theta: float) -> StateVector:
    """
    Fermionic beam splitter: RBS with angle (-1)^p * theta, p the parity of the
    qubits strictly between q1 and q2. Equal to RBS on neighbouring qubits.
    """
    _check_pair(state, q1, q2)
    lo, hi = min(q1, q2), max(q1, q2)
    parity = _bits(state.n_qubits)[lo + 1:hi].sum(axis=0) % 2
    return _rotate_pair(state, q1, q2, theta, 1.0 - 2.0 * parity)


def apply_x(state: StateVector, q: int) -> StateVector:
    _check_qubit(state.n_qubits, q)
    index = np.arange(2 ** state.n_qubits)
    return StateVector(state.n_qubits, state.amplitudes[index ^ _mask(state.n_qubits, q)])


def apply_z(state: StateVector, q: int) -> StateVector:
    _check_qubit(state.n_qubits, q)
    signs = 1.0 - 2.0 * _bits(state.n_qubits)[q]
    return StateVector(state.n_qubits, state.amplitudes * signs)


def apply_cz(state: StateVector, q1: int, q2: int) -> StateVector:
    _check_pair(state, q1, q2)
    bits = _bits(state.n_qubits)
    signs = 1.0 - 2.0 * (bits[q1] & bits[q2])
    return StateVector(state.n_qubits, state.amplitudes * signs)


def clifford_apply(state: StateVector, x) -> StateVector:
    """
    Apply the Clifford loader C(x) = sum_i x_i Z_0 ... Z_{i-1} X_i.

    Term i flips qubit i and multiplies by the parity of qubits 0..i-1. For a
    unit vector x the terms anticommute, so C(x) is unitary and C(x)^2 = I.

    Args:
        state: Input state on n qubits
        x: Unit vector of length n

    Returns:
        StateVector: C(x) applied to state
    """
    n = state.n_qubits
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise InvalidInputError(f"loader vector must have length {n}, got shape {x.shape}")
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > settings.UNIT_NORM_TOL:
        raise InvalidInputError(f"loader vector must have unit norm, got {norm}")

    bits = _bits(n)
    prefix_parity = np.vstack([np.zeros((1, 2 ** n), dtype=bits.dtype), np.cumsum(bits, axis=0)[:-1]]) % 2
    index = np.arange(2 ** n)
    psi = state.amplitudes
    out = np.zeros_like(psi)
    for i in range(n):
        if x[i] == 0.0:
            continue
        signed = psi * (1.0 - 2.0 * prefix_parity[i])
        out += x[i] * signed[index ^ _mask(n, i)]
    return StateVector(n, out)
