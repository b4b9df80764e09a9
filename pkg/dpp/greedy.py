"""
Deterministic greedy k-DPP selection.

Starting from the projection onto the top-k eigenvectors of K, repeatedly
take the item with the largest conditional marginal

    p(j) = p0(j) - P_Tj^T pinv(P_TT) P_Tj,    P = V V^T,  p0(j) = ||V^T e_j||^2

and add it to T. Argmax ties (within TIE_TOL) go to the lowest index, so the
output depends only on K.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from common import settings
from common.errors import DegenerateKernelError, InvalidInputError
from dpp.ensemble import SubsetSample
from numerics import EigenDecomposition, as_matrix, pinv_sym, sym_eig
from numerics.matrix import is_symmetric

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GreedyStep:
    chosen: int
    scores: np.ndarray


def _argmax_lowest(scores: np.ndarray) -> int:
    best = scores.max()
    return int(np.flatnonzero(scores >= best - settings.TIE_TOL)[0])


def det_kdpp_trace(K, k: int, *, eig: Optional[EigenDecomposition] = None) -> Tuple[SubsetSample, List[GreedyStep]]:
    """
    Greedy selection with the score vector seen at every step.

    Args:
        K: Symmetric PSD n x n kernel
        k: Subset size, 1 <= k <= rank(K)
        eig: Precomputed eigendecomposition of K (may be thin)

    Returns:
        (selected subset, list of GreedyStep in selection order)
    """
    if eig is None:
        K = as_matrix(K, "K")
        if K.shape[0] != K.shape[1] or not is_symmetric(K):
            raise InvalidInputError(f"det_kdpp needs a symmetric square kernel, got shape {K.shape}")
        eig = sym_eig(K)

    n = eig.size
    if k < 1 or k > n:
        raise InvalidInputError(f"k must satisfy 1 <= k <= n={n}, got {k}")
    rank = eig.rank(settings.RANK_TOL)
    if k > rank:
        raise DegenerateKernelError(f"kernel rank {rank} is below k={k}")

    V = eig.eigenvectors[:, :k]
    P = V @ V.T
    p0 = np.sum(V ** 2, axis=1)

    chosen: List[int] = []
    steps: List[GreedyStep] = []
    scores = p0.copy()
    for _ in range(k):
        masked = scores.copy()
        masked[chosen] = -np.inf
        t = _argmax_lowest(masked)
        steps.append(GreedyStep(chosen=t, scores=scores.copy()))
        chosen.append(t)

        P_T = P[chosen, :]
        P_TT = P[np.ix_(chosen, chosen)]
        scores = p0 - np.sum(P_T * (pinv_sym(P_TT) @ P_T), axis=0)

    logger.debug(f"det_kdpp picked {chosen} from n={n}")
    return SubsetSample.of(chosen), steps


def det_kdpp(K, k: int, *, eig: Optional[EigenDecomposition] = None) -> SubsetSample:
    """Deterministic greedy k-subset of the kernel K."""
    subset, _ = det_kdpp_trace(K, k, eig=eig)
    return subset
