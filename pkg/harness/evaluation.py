"""
Three-fold holdout evaluation.

The imputed dataset is split into three consecutive row ranges H1, H2, H3
(no shuffling). For each holdout the classifier trains on the other two
thirds and the AUC is measured on the holdout.
"""

import logging
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from common import settings
from common.errors import InvalidInputError, UndefinedMetricError
from harness.gbt import GBTConfig, fit_gbt, predict_gbt
from harness.metrics import auc

logger = logging.getLogger(__name__)

HOLDOUTS = tuple(f"H{i + 1}" for i in range(settings.N_FOLDS))


@dataclass
class FoldReport:
    """
    Holdout AUCs across repeats.

    Means and standard deviations use the statistics module, which works in
    exact arithmetic: identical values give a standard deviation of exactly 0.
    """

    aucs: Dict[str, List[float]] = field(default_factory=lambda: {h: [] for h in HOLDOUTS})

    def add(self, holdout_aucs: Dict[str, float]) -> None:
        for holdout in HOLDOUTS:
            value = float(holdout_aucs[holdout])
            if not 0.0 <= value <= 1.0:
                raise InvalidInputError(f"AUC {value} for {holdout} is outside [0, 1]")
            self.aucs[holdout].append(value)

    def extend(self, other: "FoldReport") -> None:
        for holdout in HOLDOUTS:
            self.aucs[holdout].extend(other.aucs[holdout])

    @property
    def n_repeats(self) -> int:
        return len(self.aucs[HOLDOUTS[0]])

    def mean(self, holdout: str) -> float:
        return float(statistics.fmean(self.aucs[holdout]))

    def sd(self, holdout: str) -> float:
        values = self.aucs[holdout]
        return float(statistics.stdev(values)) if len(values) > 1 else 0.0

    def summary(self) -> Dict[str, Tuple[float, float]]:
        return {h: (self.mean(h), self.sd(h)) for h in HOLDOUTS}

    def to_dict(self) -> dict:
        return {
            h: {"values": list(self.aucs[h]), "mean": self.mean(h), "sd": self.sd(h)}
            for h in HOLDOUTS
            if self.aucs[h]
        }


def fold_partition(n_rows: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """(development rows, holdout rows) for each of the consecutive folds."""
    rows = np.arange(n_rows)
    holdouts = np.array_split(rows, settings.N_FOLDS)
    return [(np.setdiff1d(rows, holdout), holdout) for holdout in holdouts]


def three_fold_eval(imputed, y, cfg: GBTConfig, seed: int = 0) -> FoldReport:
    """
    Train on two consecutive thirds, score the third, for every holdout.

    Args:
        imputed: Fully imputed n x d matrix (n >= 30)
        y: Binary outcome
        cfg: Classifier configuration
        seed: Classifier seed

    Returns:
        FoldReport with one value per holdout

    Raises:
        UndefinedMetricError: a holdout contains a single class
    """
    X = np.asarray(imputed, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise InvalidInputError(f"imputed rows must match y length: {X.shape} vs {y.shape}")
    if X.shape[0] < settings.MIN_EVAL_ROWS:
        raise InvalidInputError(f"evaluation needs at least {settings.MIN_EVAL_ROWS} rows, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("imputed matrix still contains missing values")

    results = {}
    for holdout, (dev_rows, holdout_rows) in zip(HOLDOUTS, fold_partition(X.shape[0])):
        if np.unique(y[holdout_rows]).size < 2:
            raise UndefinedMetricError(f"holdout {holdout} contains a single class; AUC is undefined")
        model = fit_gbt(X[dev_rows], y[dev_rows], cfg, seed)
        results[holdout] = auc(predict_gbt(model, X[holdout_rows]), y[holdout_rows])
        logger.debug(f"{holdout}: AUC {results[holdout]:.4f}")

    report = FoldReport()
    report.add(results)
    return report
