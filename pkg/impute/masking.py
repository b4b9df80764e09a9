"""
Masked data matrices and missingness induction.

Missing cells hold NaN in memory; mask is True where a value is observed.
Induced masks only ever hide cells that were observed, and every column keeps
at least two observed values: if a draw would leave fewer, enough of the
newly hidden cells in that column are restored, chosen uniformly.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from common.errors import InvalidInputError

logger = logging.getLogger(__name__)

MIN_OBSERVED_PER_COLUMN = 2


@dataclass(frozen=True)
class MaskedData:
    values: np.ndarray
    mask: np.ndarray
    outcome: np.ndarray
    feature_names: Tuple[str, ...] = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        mask = np.array(self.mask, dtype=bool)
        outcome = np.array(self.outcome)
        if values.ndim != 2:
            raise InvalidInputError(f"values must be 2-D, got shape {values.shape}")
        if mask.shape != values.shape:
            raise InvalidInputError(f"mask shape {mask.shape} does not match values {values.shape}")
        if outcome.shape != (values.shape[0],):
            raise InvalidInputError(f"outcome must have one entry per row, got shape {outcome.shape}")
        if not np.all(np.isin(outcome, (0, 1))):
            raise InvalidInputError("outcome must be binary (0/1)")
        if not np.all(np.isfinite(values[mask])):
            raise InvalidInputError("observed entries must be finite")

        values[~mask] = np.nan
        names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(values.shape[1]))
        if len(names) != values.shape[1]:
            raise InvalidInputError(f"{len(names)} feature names for {values.shape[1]} columns")

        for array in (values, mask, outcome):
            array.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "outcome", outcome.astype(np.int64))
        object.__setattr__(self, "feature_names", names)

    @classmethod
    def complete(cls, X, outcome, feature_names: Optional[Sequence[str]] = None) -> "MaskedData":
        """Fully observed data."""
        X = np.asarray(X, dtype=np.float64)
        return cls(X, np.ones(X.shape, dtype=bool), outcome, tuple(feature_names or ()))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def missing_counts(self) -> np.ndarray:
        return (~self.mask).sum(axis=0)

    @property
    def missing_fraction(self) -> float:
        return float((~self.mask).mean()) if self.mask.size else 0.0

    def __repr__(self) -> str:
        return f"<MaskedData(shape={self.shape}, missing={self.missing_fraction:.3f})>"


def _apply_drop(data: MaskedData, drop: np.ndarray, rng: np.random.Generator) -> MaskedData:
    hidden = drop & data.mask
    new_mask = data.mask & ~hidden

    for col in range(new_mask.shape[1]):
        observed = int(new_mask[:, col].sum())
        if observed >= MIN_OBSERVED_PER_COLUMN:
            continue
        candidates = np.flatnonzero(hidden[:, col])
        restore = min(MIN_OBSERVED_PER_COLUMN - observed, candidates.size)
        if restore:
            new_mask[rng.choice(candidates, size=restore, replace=False), col] = True
        if int(new_mask[:, col].sum()) < MIN_OBSERVED_PER_COLUMN:
            logger.warning(f"Column {data.feature_names[col]} has fewer than "
                           f"{MIN_OBSERVED_PER_COLUMN} observed values")

    return replace(data, mask=new_mask)


def induce_mcar(data: MaskedData, rate: float, rng: np.random.Generator) -> MaskedData:
    """
    Missing completely at random: hide each feature cell with probability rate.

    Args:
        data: Input data (already-missing cells stay missing)
        rate: Masking probability, 0 <= rate < 1
        rng: Random stream

    Returns:
        MaskedData with the extended mask
    """
    if not 0.0 <= rate < 1.0:
        raise InvalidInputError(f"MCAR rate must be in [0, 1), got {rate}")
    drop = rng.random(data.shape) < rate
    return _apply_drop(data, drop, rng)


def induce_mnar(data: MaskedData, rate: float, delta: float, rng: np.random.Generator) -> MaskedData:
    """
    Missing not at random: masking depends on the outcome.

    Cells in rows with outcome 1 are hidden with probability rate * (1 + delta),
    rows with outcome 0 with probability rate * (1 - delta).

    Args:
        data: Input data
        rate: Base masking probability
        delta: Relative class shift, 0 <= delta <= 1
        rng: Random stream
    """
    if not 0.0 <= delta <= 1.0:
        raise InvalidInputError(f"MNAR delta must be in [0, 1], got {delta}")
    if rate < 0.0 or rate * (1.0 + delta) >= 1.0:
        raise InvalidInputError(f"MNAR needs 0 <= rate * (1 + delta) < 1, got rate={rate}, delta={delta}")
    row_rate = np.where(data.outcome == 1, rate * (1.0 + delta), rate * (1.0 - delta))
    drop = rng.random(data.shape) < row_rate[:, None]
    return _apply_drop(data, drop, rng)
