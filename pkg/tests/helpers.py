"""Random matrices and reference implementations shared by the test modules."""

import numpy as np


def random_psd(rng, n: int, rank=None) -> np.ndarray:
    B = rng.standard_normal((n, rank or n))
    return B @ B.T


def random_orthonormal(rng, n: int, d: int) -> np.ndarray:
    Q, _ = np.linalg.qr(rng.standard_normal((n, d)))
    return Q


def greedy_oracle(K: np.ndarray, k: int) -> tuple:
    """Step-by-step greedy selection with an explicit pseudo-inverse at every step."""
    _, vectors = np.linalg.eigh(K)
    V = vectors[:, ::-1][:, :k]
    P = V @ V.T
    p0 = np.diag(P).copy()
    chosen = []
    p = p0.copy()
    for _ in range(k):
        masked = p.copy()
        masked[chosen] = -np.inf
        chosen.append(int(np.argmax(masked)))
        P_TT_pinv = np.linalg.pinv(P[np.ix_(chosen, chosen)])
        p = np.array([p0[j] - P[chosen, j] @ P_TT_pinv @ P[chosen, j] for j in range(K.shape[0])])
    return tuple(sorted(chosen))
