"""Row batching for per-batch DPP sampling."""

import logging
import math
from typing import List, Optional

import numpy as np

from common.errors import InvalidInputError

logger = logging.getLogger(__name__)


def partition_batches(
    n_rows: int,
    y: Optional[np.ndarray],
    batch_size: int,
    stratify: bool,
    rng: np.random.Generator,
) -> List[np.ndarray]:
    """
    Split row indices into ceil(n_rows / batch_size) disjoint batches.

    Rows are shuffled by rng and dealt round-robin, so batch sizes differ by
    at most one. With stratify, rows are dealt class by class, which spreads
    every class over the batches as evenly as the counts allow. A batch size
    larger than n_rows gives a single batch.

    Args:
        n_rows: Number of rows
        y: Class labels used for stratification (ignored unless stratify)
        batch_size: Target batch size, at least 2
        stratify: Balance class proportions across batches
        rng: Random stream

    Returns:
        List of sorted index arrays covering range(n_rows)
    """
    if batch_size < 2:
        raise InvalidInputError(f"batch_size must be >= 2, got {batch_size}")
    if n_rows < 1:
        raise InvalidInputError(f"cannot batch {n_rows} rows")

    n_batches = max(1, math.ceil(n_rows / batch_size))

    if stratify:
        if y is None or len(y) != n_rows:
            raise InvalidInputError("stratified batching needs one label per row")
        labels = np.asarray(y)
        order = np.concatenate([
            rng.permutation(np.flatnonzero(labels == label)) for label in np.unique(labels)
        ])
    else:
        order = rng.permutation(n_rows)

    batches = [np.sort(order[b::n_batches]) for b in range(n_batches)]
    logger.debug(f"Partitioned {n_rows} rows into {n_batches} batches (stratify={stratify})")
    return batches
