"""
Iterative forest imputation.

Both methods start from a column-mean fill and then, for a fixed number of
iterations, revisit every column with missing values (fewest missing first,
ties by column index). Each visit trains a forest on the rows where that
column is observed, using all other columns at their current imputed values
plus the outcome as features:

    missforest  missing cells <- forest prediction
    mice_pmm    missing cells <- observed value of a donor row whose forest
                prediction is among the pmm_donors closest to the missing
                row's prediction (predictive mean matching)

With a deterministic sampler the donor is the single closest row (lowest
row index on ties) and the whole imputation is independent of the seed.

Usage:
    cfg = ImputeConfig(method="missforest", sampler="detdpp")
    imputed = impute(masked_data, cfg)
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from common import settings
from common.errors import DppImputeError, InvalidInputError
from common.rng import derive_rng
from forest import ForestConfig, fit_forest, predict_forest
from forest.subsampling import SAMPLERS, is_deterministic
from impute.masking import MaskedData

logger = logging.getLogger(__name__)

METHODS = ("missforest", "mice_pmm")

METHOD_NAMES = {"missforest": "MissForest", "mice_pmm": "MICE"}
SAMPLER_PREFIXES = {"uniform": "", "dpp": "DPP-", "detdpp": "detDPP-", "qdpp": "qDPP-", "qdetdpp": "qdetDPP-"}


@dataclass(frozen=True)
class ImputeConfig:
    method: str = "missforest"
    sampler: str = "uniform"
    n_iterations: int = settings.DEFAULT_N_ITERATIONS
    forest: ForestConfig = field(default_factory=ForestConfig)
    pmm_donors: int = settings.DEFAULT_PMM_DONORS
    seed: int = 0
    use_outcome: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidInputError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.sampler not in SAMPLERS:
            raise InvalidInputError(f"sampler must be one of {SAMPLERS}, got {self.sampler!r}")
        if self.n_iterations < 1:
            raise InvalidInputError(f"n_iterations must be >= 1, got {self.n_iterations}")
        if self.pmm_donors < 1:
            raise InvalidInputError(f"pmm_donors must be >= 1, got {self.pmm_donors}")

    @property
    def deterministic(self) -> bool:
        return is_deterministic(self.sampler, self.forest.shots)

    @property
    def label(self) -> str:
        return method_label(self.method, self.sampler)


def method_label(method: str, sampler: str) -> str:
    """Display name, e.g. ("missforest", "detdpp") -> "detDPP-MissForest"."""
    return f"{SAMPLER_PREFIXES[sampler]}{METHOD_NAMES[method]}"


def initial_fill(data: MaskedData) -> np.ndarray:
    """
    Replace masked entries by the mean of the observed entries of their column.

    Raises:
        InvalidInputError: a column has no observed value
    """
    filled = np.array(data.values, dtype=np.float64)
    for col in range(filled.shape[1]):
        observed = data.mask[:, col]
        if not observed.any():
            raise InvalidInputError(f"column {data.feature_names[col]} has no observed values")
        if not observed.all():
            filled[~observed, col] = filled[observed, col].mean()
    return filled


def _visit_order(data: MaskedData) -> list:
    counts = data.missing_counts
    return sorted((int(c) for c in np.flatnonzero(counts)), key=lambda c: (int(counts[c]), c))


def _pmm_values(
    observed_values: np.ndarray,
    predicted_observed: np.ndarray,
    predicted_missing: np.ndarray,
    n_donors: int,
    deterministic: bool,
    rng: np.random.Generator,
) -> np.ndarray:
    n_donors = min(n_donors, observed_values.size)
    values = np.empty(predicted_missing.size)
    for i, target in enumerate(predicted_missing):
        distance = np.abs(predicted_observed - target)
        # stable sort keeps the lowest row first among equal distances
        pool = np.argsort(distance, kind="stable")[:n_donors]
        donor = pool[0] if deterministic else rng.choice(pool)
        values[i] = observed_values[donor]
    return values


def impute(data: MaskedData, cfg: ImputeConfig) -> np.ndarray:
    """
    Iteratively impute the masked entries of data.

    Args:
        data: Masked data
        cfg: Imputation configuration

    Returns:
        Matrix with every masked entry filled; observed entries unchanged
    """
    order = _visit_order(data)
    if not order:
        logger.info("No missing values; nothing to impute")
        return np.array(data.values, dtype=np.float64)

    X = initial_fill(data)
    outcome = data.outcome.astype(np.float64)[:, None]
    deterministic = cfg.deterministic
    logger.info(f"Imputing {int((~data.mask).sum())} cells in {len(order)} columns with {cfg.label}")

    for iteration in range(cfg.n_iterations):
        for col in order:
            observed = data.mask[:, col]
            features = np.delete(X, col, axis=1)
            if cfg.use_outcome:
                features = np.hstack([features, outcome])

            forest_seed = int(derive_rng(cfg.seed, "forest", iteration, col).integers(0, 2 ** 31))
            forest_cfg = replace(cfg.forest, sampler=cfg.sampler, seed=forest_seed)
            try:
                model = fit_forest(features[observed], X[observed, col], forest_cfg,
                                   strata=data.outcome[observed])
                predicted_missing = predict_forest(model, features[~observed])
                if cfg.method == "missforest":
                    X[~observed, col] = predicted_missing
                else:
                    X[~observed, col] = _pmm_values(
                        X[observed, col],
                        predict_forest(model, features[observed]),
                        predicted_missing,
                        cfg.pmm_donors,
                        deterministic,
                        derive_rng(cfg.seed, "pmm", iteration, col),
                    )
            except DppImputeError as e:
                e.add_note(f"while imputing column {data.feature_names[col]!r} (iteration {iteration + 1})")
                raise
            logger.debug(f"Iteration {iteration + 1}, column {data.feature_names[col]}: "
                         f"{int((~observed).sum())} cells updated")

        logger.info(f"Finished imputation iteration {iteration + 1}/{cfg.n_iterations}")

    return X
