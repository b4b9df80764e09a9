"""
L-ensemble kernels and subset samples.

An L-ensemble assigns a subset T of {0, ..., n-1} the probability
det(L_TT) / det(I + L). Its marginal kernel K = L (I + L)^-1 gives inclusion
probabilities: P(T is contained in the sample) = det(K_TT).
"""

import logging
import threading
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from common import settings
from common.errors import InvalidInputError
from numerics import EigenDecomposition, as_matrix, det, gram, normalize_signs, qr_orthonormalize, sym_eig
from numerics.matrix import is_symmetric

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubsetSample:
    """Strictly increasing tuple of row indices."""

    indices: Tuple[int, ...]

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", indices)
        if any(i < 0 for i in indices):
            raise InvalidInputError(f"subset indices must be non-negative: {indices}")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise InvalidInputError(f"subset indices must be strictly increasing: {indices}")

    @classmethod
    def of(cls, items: Iterable[int]) -> "SubsetSample":
        """Build a sample from unordered distinct indices."""
        items = [int(i) for i in items]
        if len(set(items)) != len(items):
            raise InvalidInputError(f"subset indices must be distinct: {items}")
        return cls(tuple(sorted(items)))

    @property
    def k(self) -> int:
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.array(self.indices, dtype=np.int64)

    def check_bounds(self, n: int) -> None:
        if self.indices and self.indices[-1] >= n:
            raise InvalidInputError(f"subset index {self.indices[-1]} out of range for n={n}")

    def __iter__(self):
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)


SubsetLike = Union[SubsetSample, Iterable[int]]


def _as_subset(T: SubsetLike) -> SubsetSample:
    return T if isinstance(T, SubsetSample) else SubsetSample.of(T)


def _thin_eig(A: np.ndarray) -> EigenDecomposition:
    """
    Eigenpairs of A A^T from the small d x d matrix A^T A.

    A^T A w = lam w implies (A A^T)(A w) = lam (A w) and ||A w||^2 = lam, so the
    nonzero spectrum is lifted as A w / sqrt(lam). Zero eigenvalues are dropped.
    """
    small = sym_eig(gram(A.T))
    keep = small.eigenvalues > settings.RANK_TOL
    values = small.eigenvalues[keep]
    if values.size == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((A.shape[0], 0)))
    lifted = (A @ small.eigenvectors[:, keep]) / np.sqrt(values)
    vectors = normalize_signs(qr_orthonormalize(lifted))
    return EigenDecomposition(values.copy(), vectors)


class LEnsemble:
    """
    Symmetric PSD kernel L with a lazily computed, cached eigendecomposition.

    When built from a feature matrix A (L = A A^T) with more rows than columns,
    the eigendecomposition is computed from A^T A and is thin: only the
    nonzero eigenpairs are kept.
    """

    def __init__(self, L, source: Optional[np.ndarray] = None):
        L = as_matrix(L, "L")
        if L.shape[0] != L.shape[1]:
            raise InvalidInputError(f"L must be square, got shape {L.shape}")
        if not is_symmetric(L):
            raise InvalidInputError("L must be symmetric")
        self._L = L
        self._source = None if source is None else as_matrix(source, "source")
        self._eig: Optional[EigenDecomposition] = None
        self._lock = threading.Lock()

    @classmethod
    def from_features(cls, A) -> "LEnsemble":
        """L-ensemble with L = A A^T for an n x d feature matrix A."""
        A = as_matrix(A, "A")
        return cls(gram(A), source=A)

    @property
    def L(self) -> np.ndarray:
        return self._L

    @property
    def n(self) -> int:
        return self._L.shape[0]

    @property
    def source(self) -> Optional[np.ndarray]:
        return self._source

    @property
    def eig(self) -> EigenDecomposition:
        """Eigendecomposition with negative rounding noise clamped to zero."""
        if self._eig is None:
            with self._lock:
                if self._eig is None:
                    self._eig = self._compute_eig()
        return self._eig

    def rank(self) -> int:
        return self.eig.rank(settings.RANK_TOL)

    def _compute_eig(self) -> EigenDecomposition:
        A = self._source
        if A is not None and A.shape[0] > A.shape[1]:
            return _thin_eig(A)

        eig = sym_eig(self._L)
        lowest = float(eig.eigenvalues[-1]) if eig.eigenvalues.size else 0.0
        if lowest < -settings.PSD_TOL:
            raise InvalidInputError(f"L is not positive semidefinite (eigenvalue {lowest:.3e})")
        values = np.clip(eig.eigenvalues, 0.0, None)
        return EigenDecomposition(values, np.array(eig.eigenvectors))

    def submatrix(self, T: SubsetLike) -> np.ndarray:
        T = _as_subset(T)
        T.check_bounds(self.n)
        idx = T.as_array()
        return self._L[np.ix_(idx, idx)]

    def restrict(self, rows: Iterable[int]) -> "LEnsemble":
        """L-ensemble of the given rows (in the given order)."""
        rows = np.asarray(list(rows), dtype=np.int64)
        if self._source is not None:
            return LEnsemble.from_features(self._source[rows])
        return LEnsemble(self._L[np.ix_(rows, rows)])

    def __repr__(self) -> str:
        return f"<LEnsemble(n={self.n}, from_features={self._source is not None})>"


def marginal_kernel(ensemble: LEnsemble) -> np.ndarray:
    """
    Marginal kernel K = L (I + L)^-1, computed spectrally.

    Returns:
        n x n matrix V diag(lam / (1 + lam)) V^T with eigenvalues in [0, 1)
    """
    eig = ensemble.eig
    V = eig.eigenvectors
    K = (V * (eig.eigenvalues / (1.0 + eig.eigenvalues))) @ V.T
    return (K + K.T) / 2.0


def normalizer(ensemble: LEnsemble) -> float:
    """det(I + L), from the spectrum."""
    return float(np.prod(1.0 + ensemble.eig.eigenvalues))


def subset_prob(ensemble: LEnsemble, T: SubsetLike) -> float:
    """
    Probability det(L_TT) / det(I + L) of drawing exactly T.

    The empty subset has probability 1 / det(I + L).
    """
    T = _as_subset(T)
    T.check_bounds(ensemble.n)
    minor = det(ensemble.submatrix(T)) if T.k else 1.0
    return max(minor, 0.0) / normalizer(ensemble)
