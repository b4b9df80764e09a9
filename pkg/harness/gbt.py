"""
Gradient-boosted trees for binary classification (logistic loss).

The model starts from the log-odds of the training prior; each round fits a
regression tree to the residuals y - p and replaces its leaf values by the
Newton step sum(residual) / sum(p (1 - p)) over the leaf's rows.
"""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.special import expit, logit

from common import settings
from common.errors import DegenerateModelError, InvalidInputError
from common.rng import derive_rng
from forest.tree import DecisionTree, TreeConfig, fit_tree

logger = logging.getLogger(__name__)

# Newton denominators below this give a zero leaf update
_MIN_HESSIAN = 1e-12
# Raw scores are clipped so probabilities stay strictly inside (0, 1)
_MAX_MARGIN = 30.0


@dataclass(frozen=True)
class GBTConfig:
    n_rounds: int = settings.GBT_N_ROUNDS
    learning_rate: float = settings.GBT_LEARNING_RATE
    max_depth: int = settings.GBT_MAX_DEPTH
    min_samples_leaf: int = 1

    def __post_init__(self):
        if self.n_rounds < 1:
            raise InvalidInputError(f"n_rounds must be >= 1, got {self.n_rounds}")
        if self.learning_rate < 0:
            raise InvalidInputError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.max_depth < 1:
            raise InvalidInputError(f"max_depth must be >= 1, got {self.max_depth}")


@dataclass
class GBTModel:
    prior_margin: float
    learning_rate: float
    trees: List[DecisionTree] = field(default_factory=list)

    def margin(self, X: np.ndarray) -> np.ndarray:
        F = np.full(X.shape[0], self.prior_margin)
        for tree in self.trees:
            F += self.learning_rate * tree.predict(X)
        return np.clip(F, -_MAX_MARGIN, _MAX_MARGIN)


def fit_gbt(X, y, cfg: GBTConfig, seed: int = 0) -> GBTModel:
    """
    Fit boosted trees on binary labels.

    Args:
        X: n x d features
        y: Binary labels
        cfg: Boosting configuration
        seed: Seed for tree streams

    Returns:
        GBTModel

    Raises:
        DegenerateModelError: only one class in y
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise InvalidInputError(f"X rows must match y length: {X.shape} vs {y.shape}")
    if not np.all(np.isin(y, (0, 1))):
        raise InvalidInputError("gradient boosting needs binary (0/1) labels")
    prior = float(np.mean(y))
    if prior in (0.0, 1.0):
        raise DegenerateModelError("training labels contain a single class")

    y = y.astype(np.float64)
    model = GBTModel(prior_margin=float(logit(prior)), learning_rate=cfg.learning_rate)
    tree_cfg = TreeConfig(max_depth=cfg.max_depth, min_samples_leaf=cfg.min_samples_leaf,
                          max_features=1.0, task="regression")

    F = np.full(X.shape[0], model.prior_margin)
    for round_index in range(cfg.n_rounds):
        p = expit(F)
        residual = y - p
        tree = fit_tree(X, residual, tree_cfg, derive_rng(seed, "gbt", round_index))
        for rows, leaf in tree.leaf_groups(X):
            hessian = float(np.sum(p[rows] * (1.0 - p[rows])))
            leaf.value = float(np.sum(residual[rows]) / hessian) if hessian > _MIN_HESSIAN else 0.0
        model.trees.append(tree)
        F = np.clip(F + cfg.learning_rate * tree.predict(X), -_MAX_MARGIN, _MAX_MARGIN)

    logger.debug(f"Fitted GBT: {cfg.n_rounds} rounds on {X.shape[0]} rows")
    return model


def predict_gbt(model: GBTModel, X) -> np.ndarray:
    """Positive-class probabilities in (0, 1)."""
    X = np.asarray(X, dtype=np.float64)
    return expit(model.margin(X))
