"""
Persist benchmark results.

Usage:
    with session_scope() as session:
        run = store_experiment_result(session, result)
"""

import dataclasses
import logging
from typing import Dict, List

from sqlalchemy import func
from sqlalchemy.orm import Session

from db.models import ExperimentRun, HoldoutResult, ImputationScore

logger = logging.getLogger(__name__)


def store_experiment_result(session: Session, result) -> ExperimentRun:
    """
    Add one ExperimentResult (with its holdout AUCs and RMSEs) to the session.

    The caller commits.
    """
    cfg = result.config
    run = ExperimentRun(
        dataset=result.dataset,
        missingness_kind=cfg.missingness.kind,
        missingness_rate=cfg.missingness.rate,
        missingness_delta=cfg.missingness.delta,
        method=result.method,
        sampler=cfg.impute.sampler,
        repeats=cfg.repeats,
        seed=cfg.seed,
        fixed_missingness=cfg.fixed_missingness,
        config=dataclasses.asdict(cfg),
    )
    for holdout, values in result.report.aucs.items():
        for repeat, value in enumerate(values, start=1):
            run.holdout_results.append(HoldoutResult(holdout=holdout, repeat=repeat, auc=value))
    for repeat, value in enumerate(result.rmse, start=1):
        run.imputation_scores.append(ImputationScore(repeat=repeat, rmse=value))

    session.add(run)
    session.flush()
    logger.info(f"Stored run {run.run_id}: {result.dataset} / {result.missingness} / {result.method}")
    return run


def load_run_summaries(session: Session) -> List[Dict]:
    """Mean AUC per run and holdout, in run order."""
    rows = (
        session.query(
            ExperimentRun.run_id,
            ExperimentRun.dataset,
            ExperimentRun.missingness_kind,
            ExperimentRun.method,
            HoldoutResult.holdout,
            func.avg(HoldoutResult.auc),
            func.count(HoldoutResult.result_id),
        )
        .join(HoldoutResult, HoldoutResult.run_id == ExperimentRun.run_id)
        .group_by(ExperimentRun.run_id, HoldoutResult.holdout)
        .order_by(ExperimentRun.run_id, HoldoutResult.holdout)
        .all()
    )
    return [
        {
            "run_id": run_id,
            "dataset": dataset,
            "missingness": kind,
            "method": method,
            "holdout": holdout,
            "mean_auc": float(mean_auc),
            "n": int(n),
        }
        for run_id, dataset, kind, method, holdout, mean_auc, n in rows
    ]
