"""
Symmetric eigendecomposition by cyclic Jacobi rotations.

Eigenvalues are returned in descending order (stable for ties) and every
eigenvector is sign-normalized so that its largest-magnitude entry is
positive. Together these make downstream greedy selection reproducible
bit-for-bit across runs.

Usage:
    eig = sym_eig(K)
    eig.eigenvalues[0], eig.eigenvectors[:, 0]
"""

import logging
from dataclasses import dataclass

import numpy as np

from common import settings
from common.errors import ConvergenceError, InvalidInputError
from numerics.matrix import as_matrix, is_symmetric

logger = logging.getLogger(__name__)

# Entries within this distance of the column's max magnitude count as tied
_SIGN_TIE_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """
    Eigenpairs of a symmetric matrix.

    eigenvectors may be thin (fewer columns than rows) when zero eigenvalues
    were dropped; the reconstruction V diag(eigenvalues) V^T is exact either way.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        if self.eigenvectors.ndim != 2 or self.eigenvectors.shape[1] != self.eigenvalues.shape[0]:
            raise InvalidInputError(
                f"eigenvector matrix shape {self.eigenvectors.shape} does not match "
                f"{self.eigenvalues.shape[0]} eigenvalues"
            )
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    @property
    def size(self) -> int:
        return self.eigenvectors.shape[0]

    def rank(self, tol: float = settings.RANK_TOL) -> int:
        """Number of eigenvalues strictly above tol."""
        return int(np.sum(self.eigenvalues > tol))

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


def normalize_signs(V: np.ndarray) -> np.ndarray:
    """Flip columns so the first largest-magnitude entry of each is positive."""
    V = np.array(V, dtype=np.float64)
    for j in range(V.shape[1]):
        magnitudes = np.abs(V[:, j])
        if magnitudes.size == 0:
            continue
        lead = int(np.flatnonzero(magnitudes >= magnitudes.max() - _SIGN_TIE_TOL)[0])
        if V[lead, j] < 0:
            V[:, j] = -V[:, j]
    return V


def _rotate(A: np.ndarray, V: np.ndarray, p: int, q: int) -> None:
    """Apply the Jacobi rotation that zeroes A[p, q], in place."""
    apq = A[p, q]
    theta = (A[q, q] - A[p, p]) / (2.0 * apq)
    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    col_p = A[:, p].copy()
    col_q = A[:, q].copy()
    A[:, p] = c * col_p - s * col_q
    A[:, q] = s * col_p + c * col_q

    row_p = A[p, :].copy()
    row_q = A[q, :].copy()
    A[p, :] = c * row_p - s * row_q
    A[q, :] = s * row_p + c * row_q
    A[p, q] = A[q, p] = 0.0

    vec_p = V[:, p].copy()
    vec_q = V[:, q].copy()
    V[:, p] = c * vec_p - s * vec_q
    V[:, q] = s * vec_p + c * vec_q


def sym_eig(K) -> EigenDecomposition:
    """
    Eigendecomposition of a symmetric matrix.

    Runs cyclic Jacobi sweeps until every off-diagonal entry is at most
    JACOBI_TOL * max|K|.

    Args:
        K: Square matrix with max |K - K^T| <= SYMMETRY_TOL

    Returns:
        EigenDecomposition with descending eigenvalues
    """
    K = as_matrix(K, "K")
    n = K.shape[0]
    if K.shape[0] != K.shape[1]:
        raise InvalidInputError(f"sym_eig needs a square matrix, got shape {K.shape}")
    if not is_symmetric(K):
        raise InvalidInputError("sym_eig needs a symmetric matrix")

    A = (K + K.T) / 2.0
    V = np.eye(n)
    scale = float(np.max(np.abs(A))) if n else 0.0
    threshold = settings.JACOBI_TOL * scale

    if n > 1 and scale > 0.0:
        off_diagonal = ~np.eye(n, dtype=bool)
        for sweep in range(settings.JACOBI_MAX_SWEEPS):
            if float(np.max(np.abs(A[off_diagonal]))) <= threshold:
                logger.debug(f"Jacobi converged after {sweep} sweeps (n={n})")
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    if abs(A[p, q]) > threshold:
                        _rotate(A, V, p, q)
        else:
            if float(np.max(np.abs(A[off_diagonal]))) > threshold:
                raise ConvergenceError(
                    f"Jacobi did not converge in {settings.JACOBI_MAX_SWEEPS} sweeps (n={n})"
                )

    eigenvalues = np.diag(A).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return EigenDecomposition(
        eigenvalues=eigenvalues[order],
        eigenvectors=normalize_signs(V[:, order]),
    )


def pinv_sym(M, tol: float = settings.PINV_TOL) -> np.ndarray:
    """
    Moore-Penrose pseudo-inverse of a symmetric matrix.

    Eigenvalues with magnitude at or below tol are treated as zero.
    """
    eig = sym_eig(M)
    values = eig.eigenvalues
    inverted = np.zeros_like(values)
    keep = np.abs(values) > tol
    inverted[keep] = 1.0 / values[keep]
    V = eig.eigenvectors
    return (V * inverted) @ V.T
