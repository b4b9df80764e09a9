"""
CART decision trees.

Splits are chosen greedily: for each candidate feature the rows are sorted
once and every boundary between distinct adjacent values is scored with
prefix sums (sum of squared errors for regression, weighted Gini impurity for
classification). The threshold is the midpoint of the two adjacent values and
the first best split found wins ties.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from common import settings
from common.errors import InvalidInputError

logger = logging.getLogger(__name__)

TASKS = ("regression", "classification")

# Relative impurity decrease a split must achieve
_MIN_GAIN = 1e-12


@dataclass(frozen=True)
class TreeConfig:
    max_depth: Optional[int] = None
    min_samples_leaf: int = 1
    max_features: float = 1.0
    task: str = "regression"

    def __post_init__(self):
        if self.task not in TASKS:
            raise InvalidInputError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.min_samples_leaf < 1:
            raise InvalidInputError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if not 0.0 < self.max_features <= 1.0:
            raise InvalidInputError(f"max_features must be in (0, 1], got {self.max_features}")
        if self.max_depth is not None and self.max_depth < 0:
            raise InvalidInputError(f"max_depth must be None or >= 0, got {self.max_depth}")

    @classmethod
    def for_task(cls, task: str) -> "TreeConfig":
        """Forest defaults: a third of the features for regression, all for classification."""
        if task == "regression":
            return cls(max_depth=None, min_samples_leaf=settings.DEFAULT_MIN_SAMPLES_LEAF,
                       max_features=1.0 / 3.0, task=task)
        return cls(max_depth=None, min_samples_leaf=1, max_features=1.0, task=task)

    def n_candidate_features(self, n_features: int) -> int:
        return max(1, min(n_features, int(round(self.max_features * n_features))))


@dataclass
class Node:
    """Tree node. Leaves have feature None; value is the prediction."""

    value: float
    n_samples: int
    depth: int
    distribution: Optional[np.ndarray] = None
    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["Node"] = None
    right: Optional["Node"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


def _best_regression_split(x: np.ndarray, y: np.ndarray, min_leaf: int) -> Tuple[float, Optional[int]]:
    """Lowest SSE_left + SSE_right over boundaries of sorted x; returns (sse, position)."""
    n = y.size
    csum = np.cumsum(y)
    csq = np.cumsum(y * y)
    left_n = np.arange(1, n)
    right_n = n - left_n
    sse_left = csq[:-1] - csum[:-1] ** 2 / left_n
    right_sum = csum[-1] - csum[:-1]
    sse_right = (csq[-1] - csq[:-1]) - right_sum ** 2 / right_n
    impurity = sse_left + sse_right
    return _pick_position(impurity, x, min_leaf)


def _best_gini_split(x: np.ndarray, y_codes: np.ndarray, n_classes: int, min_leaf: int) -> Tuple[float, Optional[int]]:
    """Lowest n_left * gini_left + n_right * gini_right; returns (impurity, position)."""
    n = y_codes.size
    one_hot = np.zeros((n, n_classes))
    one_hot[np.arange(n), y_codes] = 1.0
    left_counts = np.cumsum(one_hot, axis=0)[:-1]
    right_counts = left_counts[-1] + one_hot[-1] - left_counts
    left_n = np.arange(1, n)
    right_n = n - left_n
    weighted_left = left_n - np.sum(left_counts ** 2, axis=1) / left_n
    weighted_right = right_n - np.sum(right_counts ** 2, axis=1) / right_n
    impurity = weighted_left + weighted_right
    return _pick_position(impurity, x, min_leaf)


def _pick_position(impurity: np.ndarray, x_sorted: np.ndarray, min_leaf: int) -> Tuple[float, Optional[int]]:
    # impurity[i] scores the split with rows [0..i] on the left
    n = x_sorted.size
    positions = np.arange(1, n)
    valid = (positions >= min_leaf) & (n - positions >= min_leaf) & (x_sorted[1:] > x_sorted[:-1])
    if not np.any(valid):
        return np.inf, None
    candidates = np.where(valid, impurity, np.inf)
    best = int(np.argmin(candidates))
    return float(candidates[best]), best + 1


class DecisionTree:
    """
    CART tree for regression (mean leaves) or classification (majority leaves).

    Usage:
        tree = DecisionTree(TreeConfig()).fit(X, y, rng)
        tree.predict(X_new)
    """

    def __init__(self, config: TreeConfig):
        self.config = config
        self.root: Optional[Node] = None
        self.n_features: Optional[int] = None
        self.classes: Optional[np.ndarray] = None

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "DecisionTree":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise InvalidInputError(f"X rows must match y length: {X.shape} vs {y.shape}")
        if X.shape[0] == 0:
            raise InvalidInputError("cannot fit a tree on zero rows")

        self.n_features = X.shape[1]
        if self.config.task == "classification":
            self.classes, codes = np.unique(y, return_inverse=True)
            target = codes.astype(np.int64)
        else:
            target = y.astype(np.float64)

        self.root = self._grow(X, target, depth=0, rng=rng)
        return self

    def _leaf(self, target: np.ndarray, depth: int) -> Node:
        if self.config.task == "classification":
            counts = np.bincount(target, minlength=len(self.classes))
            distribution = counts / counts.sum()
            # argmax returns the lowest class on ties
            return Node(value=float(self.classes[int(np.argmax(counts))]), n_samples=target.size,
                        depth=depth, distribution=distribution)
        return Node(value=float(np.mean(target)), n_samples=target.size, depth=depth)

    def _impurity(self, target: np.ndarray) -> float:
        if self.config.task == "classification":
            counts = np.bincount(target, minlength=len(self.classes))
            return float(target.size - np.sum(counts ** 2) / target.size)
        return float(np.sum((target - target.mean()) ** 2))

    def _grow(self, X: np.ndarray, target: np.ndarray, depth: int, rng: np.random.Generator) -> Node:
        cfg = self.config
        n = target.size
        if (
            np.all(target == target[0])
            or n < 2 * cfg.min_samples_leaf
            or (cfg.max_depth is not None and depth >= cfg.max_depth)
        ):
            return self._leaf(target, depth)

        d = X.shape[1]
        m = cfg.n_candidate_features(d)
        features = np.arange(d) if m == d else rng.choice(d, size=m, replace=False)

        best_impurity, best_feature, best_threshold = np.inf, None, None
        for feature in features:
            order = np.argsort(X[:, feature], kind="stable")
            x_sorted = X[order, feature]
            if cfg.task == "classification":
                impurity, position = _best_gini_split(x_sorted, target[order], len(self.classes),
                                                      cfg.min_samples_leaf)
            else:
                impurity, position = _best_regression_split(x_sorted, target[order], cfg.min_samples_leaf)
            if position is not None and impurity < best_impurity:
                best_impurity = impurity
                best_feature = int(feature)
                best_threshold = 0.5 * (x_sorted[position - 1] + x_sorted[position])

        parent = self._impurity(target)
        if best_feature is None or best_impurity >= parent - _MIN_GAIN * max(parent, 1.0):
            return self._leaf(target, depth)

        goes_left = X[:, best_feature] <= best_threshold
        node = self._leaf(target, depth)
        node.feature = best_feature
        node.threshold = float(best_threshold)
        node.left = self._grow(X[goes_left], target[goes_left], depth + 1, rng)
        node.right = self._grow(X[~goes_left], target[~goes_left], depth + 1, rng)
        return node

    def _route(self, node: Node, X: np.ndarray, rows: np.ndarray, out: list) -> None:
        if node.is_leaf:
            out.append((rows, node))
            return
        goes_left = X[rows, node.feature] <= node.threshold
        self._route(node.left, X, rows[goes_left], out)
        self._route(node.right, X, rows[~goes_left], out)

    def leaf_groups(self, X) -> list:
        """(row indices, leaf node) pairs routing every row of X to its leaf."""
        if self.root is None:
            raise InvalidInputError("tree is not fitted")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise InvalidInputError(f"expected {self.n_features} columns, got shape {X.shape}")
        out: list = []
        self._route(self.root, X, np.arange(X.shape[0]), out)
        return out

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        predictions = np.empty(X.shape[0] if X.ndim == 2 else 0)
        for rows, leaf in self.leaf_groups(X):
            predictions[rows] = leaf.value
        return predictions

    @property
    def depth(self) -> int:
        def _depth(node: Node) -> int:
            return node.depth if node.is_leaf else max(_depth(node.left), _depth(node.right))
        return 0 if self.root is None else _depth(self.root)

    @property
    def n_leaves(self) -> int:
        def _count(node: Node) -> int:
            return 1 if node.is_leaf else _count(node.left) + _count(node.right)
        return 0 if self.root is None else _count(self.root)

    def __repr__(self) -> str:
        return f"<DecisionTree(task={self.config.task}, depth={self.depth}, leaves={self.n_leaves})>"


def fit_tree(X, y, cfg: TreeConfig, rng: np.random.Generator) -> DecisionTree:
    """
    Fit a CART tree.

    Args:
        X: n x d feature matrix
        y: length-n target
        cfg: Tree configuration
        rng: Stream for per-split feature subsampling

    Returns:
        DecisionTree: fitted tree (a single leaf when y is constant)
    """
    return DecisionTree(cfg).fit(X, y, rng)
