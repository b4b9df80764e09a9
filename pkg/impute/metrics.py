"""Imputation quality metrics."""

import numpy as np

from common.errors import InvalidInputError, UndefinedMetricError


def imputation_rmse(imputed, truth, mask) -> float:
    """
    Root mean squared error over the masked (imputed) cells.

    Args:
        imputed: Imputed matrix
        truth: Values before masking
        mask: True where observed

    Returns:
        float: RMSE over cells where mask is False
    """
    imputed = np.asarray(imputed, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if not imputed.shape == truth.shape == mask.shape:
        raise InvalidInputError(f"shape mismatch: {imputed.shape}, {truth.shape}, {mask.shape}")
    hidden = ~mask
    if not hidden.any():
        raise UndefinedMetricError("RMSE is undefined without masked cells")
    return float(np.sqrt(np.mean((imputed[hidden] - truth[hidden]) ** 2)))
