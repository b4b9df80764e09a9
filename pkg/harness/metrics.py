"""Ranking metrics."""

import numpy as np
from scipy.stats import rankdata

from common.errors import InvalidInputError, UndefinedMetricError


def auc(scores, labels) -> float:
    """
    Area under the ROC curve as the Mann-Whitney statistic.

    Tied scores get midranks, so a tie between a positive and a negative
    counts one half.

    Args:
        scores: Real-valued scores, higher means more likely positive
        labels: Binary labels (0/1)

    Returns:
        float: P(score of a random positive > score of a random negative)
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise InvalidInputError(f"scores and labels must be 1-D of equal length: {scores.shape} vs {labels.shape}")
    if not np.all(np.isin(labels, (0, 1))):
        raise InvalidInputError("labels must be binary (0/1)")

    positives = labels == 1
    n_pos = int(positives.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs both classes present")

    ranks = rankdata(scores, method="average")
    u_statistic = ranks[positives].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u_statistic / (n_pos * n_neg))
