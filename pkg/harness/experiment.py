"""
Experiment driver.

One experiment is a (dataset, missingness, imputation method) cell run for a
number of repeats. Every repeat induces missingness, imputes, records the
imputation RMSE against the pre-masking values and runs the three-fold
evaluation. With fixed_missingness the same mask is used in every repeat so
only the imputer's randomness varies between repeats.

Usage:
    result = run_experiment(ExperimentConfig(...))
    result.report.summary()
"""

import hashlib
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from common import settings
from common.errors import DppImputeError, InvalidInputError
from common.rng import derive_rng
from harness.datasets import DEFAULT_OUTCOME_COLUMN, generate_synthetic, load_csv
from harness.evaluation import FoldReport, three_fold_eval
from harness.gbt import GBTConfig
from impute import ImputeConfig, MaskedData, imputation_rmse, impute, induce_mcar, induce_mnar

logger = logging.getLogger(__name__)

MISSINGNESS_KINDS = ("none", "mcar", "mnar")


@dataclass(frozen=True)
class DatasetSpec:
    kind: str = "synthetic"
    n_rows: int = 500
    n_features: int = 8
    n_informative: int = 8
    class_sep: float = 1.0
    seed: int = 0
    path: Optional[str] = None
    outcome_column: str = DEFAULT_OUTCOME_COLUMN
    name: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("synthetic", "csv"):
            raise InvalidInputError(f"dataset kind must be synthetic or csv, got {self.kind!r}")
        if self.kind == "csv" and not self.path:
            raise InvalidInputError("csv datasets need a path")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "csv":
            return Path(self.path).stem
        return f"SYNTH-{self.n_rows}x{self.n_features}"

    def load(self) -> MaskedData:
        if self.kind == "csv":
            return load_csv(self.path, self.outcome_column)
        return generate_synthetic(
            self.n_rows, self.n_features, self.n_informative, self.class_sep, self.seed
        ).to_masked()


@dataclass(frozen=True)
class MissingnessSpec:
    kind: str = "mcar"
    rate: float = 0.2
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in MISSINGNESS_KINDS:
            raise InvalidInputError(f"missingness kind must be one of {MISSINGNESS_KINDS}, got {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "none":
            return "none"
        label = f"{self.kind.upper()} {self.rate:g}"
        return f"{label} delta={self.delta:g}" if self.kind == "mnar" else label

    def apply(self, data: MaskedData, rng: np.random.Generator) -> MaskedData:
        if self.kind == "mcar":
            return induce_mcar(data, self.rate, rng)
        if self.kind == "mnar":
            return induce_mnar(data, self.rate, self.delta, rng)
        return data


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    missingness: MissingnessSpec = field(default_factory=MissingnessSpec)
    impute: ImputeConfig = field(default_factory=ImputeConfig)
    classifier: GBTConfig = field(default_factory=GBTConfig)
    repeats: int = settings.DEFAULT_REPEATS
    seed: int = 0
    fixed_missingness: bool = False

    def __post_init__(self):
        if self.repeats < 1:
            raise InvalidInputError(f"repeats must be >= 1, got {self.repeats}")


@dataclass
class ExperimentResult:
    dataset: str
    missingness: str
    method: str
    config: ExperimentConfig
    report: FoldReport = field(default_factory=FoldReport)
    rmse: List[float] = field(default_factory=list)
    imputed_digests: List[str] = field(default_factory=list)

    @property
    def key(self) -> Tuple[str, str, str]:
        return self.dataset, self.missingness, self.method


def _digest(matrix: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(matrix, dtype=np.float64).tobytes()).hexdigest()


def run_experiment(cfg: ExperimentConfig, base: Optional[MaskedData] = None) -> ExperimentResult:
    """
    Run all repeats of one experiment cell.

    Args:
        cfg: Experiment configuration
        base: Already loaded dataset (loaded from cfg.dataset when omitted)

    Returns:
        ExperimentResult with holdout AUCs, RMSEs and digests of the imputed matrices
    """
    base = cfg.dataset.load() if base is None else base
    result = ExperimentResult(cfg.dataset.label, cfg.missingness.label, cfg.impute.label, cfg)
    truth = np.where(base.mask, base.values, 0.0)
    logger.info(f"Experiment {result.dataset} / {result.missingness} / {result.method}: {cfg.repeats} repeats")

    for repeat in range(cfg.repeats):
        try:
            mask_rng = (derive_rng(cfg.seed, "missingness") if cfg.fixed_missingness
                        else derive_rng(cfg.seed, "missingness", repeat))
            masked = cfg.missingness.apply(base, mask_rng)
            impute_seed = int(derive_rng(cfg.seed, "impute", repeat).integers(0, 2 ** 31))
            imputed = impute(masked, replace(cfg.impute, seed=impute_seed))

            induced = base.mask & ~masked.mask
            if induced.any():
                result.rmse.append(imputation_rmse(imputed, truth, ~induced))
            result.imputed_digests.append(_digest(imputed))
            result.report.extend(three_fold_eval(imputed, masked.outcome, cfg.classifier, seed=cfg.seed))
        except DppImputeError as e:
            e.add_note(f"in experiment {result.dataset} / {result.missingness} / {result.method}, "
                       f"repeat {repeat + 1}")
            raise

        summary = ", ".join(f"{h}={v[-1]:.4f}" for h, v in result.report.aucs.items())
        logger.info(f"Repeat {repeat + 1}/{cfg.repeats}: {summary}")

    return result


def run_grid(
    base: ExperimentConfig,
    missingness: Sequence[MissingnessSpec],
    methods: Sequence[Tuple[str, str]],
) -> List[ExperimentResult]:
    """
    Run every (missingness, method) combination on the base config's dataset.

    Args:
        base: Template config; its missingness and impute method are overridden
        missingness: Missingness settings to sweep
        methods: (method, sampler) pairs, e.g. ("missforest", "detdpp")

    Returns:
        One ExperimentResult per cell, in sweep order
    """
    data = base.dataset.load()
    results = []
    for spec in missingness:
        for method, sampler in methods:
            cfg = replace(base, missingness=spec, impute=replace(base.impute, method=method, sampler=sampler))
            results.append(run_experiment(cfg, base=data))
    return results
