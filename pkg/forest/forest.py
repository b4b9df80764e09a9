"""
Random forests with pluggable row subsampling.

Every random draw comes from a stream derived from (seed, purpose, batch,
tree), so results do not depend on the order in which batches or trees are
processed. Batches are stratified by the strata labels whenever they are
given (the outcome during imputation) unless stratify is turned off.
Deterministic samplers derive all their streams from
DETERMINISTIC_STREAM_KEY; the configured seed never enters the fit.

Usage:
    cfg = ForestConfig(n_trees=10, sampler="detdpp", batch_size=150)
    model = fit_forest(X, y, cfg)
    predictions = predict_forest(model, X_new)
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from common import settings
from common.errors import DegenerateKernelError, InvalidInputError
from common.rng import derive_rng
from forest.batching import partition_batches
from forest.subsampling import (
    SAMPLERS,
    SEQUENTIAL_SAMPLERS,
    KernelUse,
    batch_ensemble,
    bootstrap_indices,
    is_deterministic,
    sequential_selection,
    stochastic_selection,
)
from forest.tree import DecisionTree, TreeConfig, fit_tree
from numerics import as_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = settings.DEFAULT_N_TREES
    sampler: str = "uniform"
    batch_size: int = settings.DEFAULT_BATCH_SIZE
    k_per_batch: Optional[int] = None
    stratify: bool = True
    seed: int = 0
    tree: TreeConfig = field(default_factory=lambda: TreeConfig.for_task("regression"))
    shots: Optional[int] = settings.DEFAULT_SHOTS

    def __post_init__(self):
        if self.n_trees < 1:
            raise InvalidInputError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.sampler not in SAMPLERS:
            raise InvalidInputError(f"sampler must be one of {SAMPLERS}, got {self.sampler!r}")
        if self.batch_size < 2:
            raise InvalidInputError(f"batch_size must be >= 2, got {self.batch_size}")
        if self.k_per_batch is not None and not 1 <= self.k_per_batch <= self.batch_size:
            raise InvalidInputError(
                f"k_per_batch must be in 1..batch_size={self.batch_size}, got {self.k_per_batch}"
            )
        if self.shots is not None and self.shots < 1:
            raise InvalidInputError(f"shots must be None or >= 1, got {self.shots}")

    @property
    def deterministic(self) -> bool:
        return is_deterministic(self.sampler, self.shots)

    @property
    def stream_seed(self) -> int:
        return settings.DETERMINISTIC_STREAM_KEY if self.deterministic else self.seed


@dataclass
class ForestModel:
    trees: List[DecisionTree]
    config: ForestConfig
    n_features: int
    train_indices: List[np.ndarray]
    oob_indices: List[np.ndarray]
    kernel_uses: List[KernelUse] = field(default_factory=list)
    classes: Optional[np.ndarray] = None

    def __repr__(self) -> str:
        return f"<ForestModel(sampler={self.config.sampler}, trees={len(self.trees)}, features={self.n_features})>"


def resolve_k(cfg: ForestConfig, n_features: int, smallest_batch: int) -> int:
    """
    Rows drawn per batch and tree.

    Defaults to the number of features; sequential samplers cap the default
    so that n_trees * k rows fit in the smallest batch.
    """
    if cfg.k_per_batch is not None:
        k = cfg.k_per_batch
    else:
        k = n_features
        if cfg.sampler in SEQUENTIAL_SAMPLERS and cfg.n_trees * k > smallest_batch:
            k = max(1, smallest_batch // cfg.n_trees)
            logger.warning(f"k_per_batch defaulted to {k} so {cfg.n_trees} trees fit a batch of {smallest_batch}")
    if k > smallest_batch:
        raise InvalidInputError(f"k_per_batch={k} exceeds the smallest batch ({smallest_batch} rows)")
    if cfg.sampler in SEQUENTIAL_SAMPLERS and cfg.n_trees * k > smallest_batch:
        raise InvalidInputError(
            f"{cfg.sampler} needs n_trees * k_per_batch <= batch rows: "
            f"{cfg.n_trees} * {k} > {smallest_batch}"
        )
    return k


def _select_training_rows(X: np.ndarray, strata: Optional[np.ndarray], cfg: ForestConfig):
    n = X.shape[0]
    seed = cfg.stream_seed
    if cfg.sampler == "uniform":
        rows = [bootstrap_indices(n, derive_rng(seed, "bootstrap", t)) for t in range(cfg.n_trees)]
        return rows, []

    stratify = cfg.stratify and strata is not None
    batches = partition_batches(n, strata, cfg.batch_size, stratify, derive_rng(seed, "partition"))
    k = resolve_k(cfg, X.shape[1], min(len(b) for b in batches))

    per_tree: List[List[np.ndarray]] = [[] for _ in range(cfg.n_trees)]
    kernel_uses: List[KernelUse] = []
    for b, batch in enumerate(batches):
        ensemble = batch_ensemble(X[batch])
        try:
            if cfg.sampler in SEQUENTIAL_SAMPLERS:
                picks, sizes = sequential_selection(
                    ensemble, k, cfg.n_trees, cfg.sampler, cfg.shots,
                    lambda t, b=b: derive_rng(seed, "shots", b, t),
                )
                for t, (local, size) in enumerate(zip(picks, sizes)):
                    per_tree[t].append(batch[local])
                    kernel_uses.append(KernelUse(batch=b, tree=t, size=size, k=k))
            else:
                for t in range(cfg.n_trees):
                    sample = stochastic_selection(ensemble, k, cfg.sampler, derive_rng(seed, "sample", b, t))
                    per_tree[t].append(batch[sample.as_array()])
        except DegenerateKernelError as e:
            raise DegenerateKernelError(f"batch {b} ({len(batch)} rows): {e}", batch=b) from e

    return [np.concatenate(parts) for parts in per_tree], kernel_uses


def fit_forest(X, y, cfg: ForestConfig, strata: Optional[np.ndarray] = None) -> ForestModel:
    """
    Fit a forest whose trees train on rows chosen by cfg.sampler.

    Args:
        X: n x d feature matrix
        y: Length-n target
        cfg: Forest configuration
        strata: Labels used to stratify batches when cfg.stratify is set;
            defaults to y for classification forests

    Returns:
        ForestModel
    """
    X = as_matrix(X, "X")
    y = np.asarray(y)
    if y.shape != (X.shape[0],):
        raise InvalidInputError(f"y must have one value per row of X: {y.shape} vs {X.shape}")
    if strata is None and cfg.tree.task == "classification":
        strata = y

    rows_per_tree, kernel_uses = _select_training_rows(X, strata, cfg)

    trees = []
    oob = []
    all_rows = np.arange(X.shape[0])
    for t, rows in enumerate(rows_per_tree):
        trees.append(fit_tree(X[rows], y[rows], cfg.tree, derive_rng(cfg.stream_seed, "tree", t)))
        oob.append(np.setdiff1d(all_rows, rows))

    classes = np.unique(y) if cfg.tree.task == "classification" else None
    logger.debug(f"Fitted {cfg.n_trees} trees ({cfg.sampler}) on {X.shape[0]} rows x {X.shape[1]} features")
    return ForestModel(
        trees=trees,
        config=cfg,
        n_features=X.shape[1],
        train_indices=rows_per_tree,
        oob_indices=oob,
        kernel_uses=kernel_uses,
        classes=classes,
    )


def _tree_predictions(model: ForestModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise InvalidInputError(f"expected {model.n_features} columns, got shape {X.shape}")
    return np.vstack([tree.predict(X) for tree in model.trees])


def forest_scores(model: ForestModel, X) -> np.ndarray:
    """Per-class vote fractions, shape (rows, classes), columns ordered as model.classes."""
    if model.classes is None:
        raise InvalidInputError("vote fractions are only defined for classification forests")
    votes = _tree_predictions(model, X)
    return np.stack([(votes == c).mean(axis=0) for c in model.classes], axis=1)


def predict_forest(model: ForestModel, X) -> np.ndarray:
    """
    Forest prediction: mean over trees for regression, majority vote for
    classification (ties go to the lowest class).
    """
    if model.classes is None:
        return _tree_predictions(model, X).mean(axis=0)
    scores = forest_scores(model, X)
    return model.classes[np.argmax(scores, axis=1)]
