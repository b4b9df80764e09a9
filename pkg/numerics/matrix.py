"""
Matrix validation, Gram matrices, determinants and QR orthonormalization.

A Matrix is a read-only 2-D float64 numpy array with finite entries. Every
function here validates its input through as_matrix and never mutates it.
"""

import logging

import numpy as np

from common import settings
from common.errors import InvalidInputError, RankDeficiencyError

logger = logging.getLogger(__name__)


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """
    Validate and freeze a 2-D real matrix.

    Args:
        data: Array-like of shape (rows, cols)
        name: Name used in error messages

    Returns:
        Read-only float64 copy of the data
    """
    try:
        matrix = np.array(data, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{name} is not numeric: {e}") from e

    if matrix.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError(f"{name} contains NaN or infinite entries")

    matrix.setflags(write=False)
    return matrix


def is_symmetric(M: np.ndarray, tol: float = settings.SYMMETRY_TOL) -> bool:
    """True when M is square and max |M - M^T| <= tol."""
    return M.shape[0] == M.shape[1] and (M.size == 0 or float(np.max(np.abs(M - M.T))) <= tol)


def gram(A) -> np.ndarray:
    """
    Gram matrix L = A A^T of the rows of A.

    Args:
        A: n x d matrix with n, d >= 1

    Returns:
        Symmetric PSD n x n matrix with L[i, j] = dot(row i, row j)
    """
    A = as_matrix(A, "A")
    if A.shape[0] == 0 or A.shape[1] == 0:
        raise InvalidInputError(f"gram needs at least one row and one column, got shape {A.shape}")

    L = A @ A.T
    # Exact symmetry: downstream symmetry checks compare entries directly
    L = (L + L.T) / 2.0
    L.setflags(write=False)
    return L


def det(M) -> float:
    """
    Determinant by LU decomposition with partial pivoting.

    Returns 0.0 as soon as a pivot falls below DET_PIVOT_FLOOR in magnitude.
    The empty matrix has determinant 1.

    Args:
        M: Square matrix

    Returns:
        float: det(M)
    """
    M = as_matrix(M, "M")
    n, m = M.shape
    if n != m:
        raise InvalidInputError(f"det needs a square matrix, got shape {M.shape}")

    U = M.copy()
    sign = 1.0
    result = 1.0
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(U[col:, col])))
        pivot = U[pivot_row, col]
        if abs(pivot) < settings.DET_PIVOT_FLOOR:
            return 0.0
        if pivot_row != col:
            U[[col, pivot_row]] = U[[pivot_row, col]]
            sign = -sign
        result *= pivot
        if col + 1 < n:
            factors = U[col + 1:, col] / pivot
            U[col + 1:, col:] -= np.outer(factors, U[col, col:])

    return float(sign * result)


def qr_orthonormalize(A) -> np.ndarray:
    """
    Orthonormal basis for the column span of A (modified Gram-Schmidt).

    Each column is orthogonalized twice against the previous ones, so the
    returned Q satisfies Q^T Q = I to working precision. R has a positive
    diagonal, which makes the operation idempotent: an orthonormal input is
    returned unchanged up to rounding.

    Args:
        A: n x d matrix with n >= d

    Returns:
        n x d matrix Q with orthonormal columns spanning the columns of A

    Raises:
        RankDeficiencyError: a column's residual norm is below
            QR_RANK_TOL * ||A||_F
    """
    A = as_matrix(A, "A")
    n, d = A.shape
    if n < d:
        raise InvalidInputError(f"qr_orthonormalize needs rows >= cols, got shape {A.shape}")

    scale = float(np.linalg.norm(A))
    Q = np.zeros((n, d))
    for j in range(d):
        v = A[:, j].copy()
        for _ in range(2):
            for i in range(j):
                v -= (Q[:, i] @ v) * Q[:, i]
        norm = float(np.linalg.norm(v))
        if scale == 0.0 or norm < settings.QR_RANK_TOL * scale:
            raise RankDeficiencyError(
                f"column {j} is linearly dependent on the previous columns "
                f"(residual {norm:.3e}, matrix norm {scale:.3e})",
                column=j,
            )
        Q[:, j] = v / norm

    Q.setflags(write=False)
    return Q
