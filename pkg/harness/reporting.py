"""
Benchmark reports.

One row per (dataset, missingness, method, holdout) with the mean, standard
deviation and raw AUC of every repeat (auc_1 ... auc_R), plus one row per
(dataset, missingness, method) with imputation RMSE statistics.
"""

import logging
import statistics
from pathlib import Path
from typing import Dict, Iterable, List, Union

import pandas as pd

from harness.evaluation import HOLDOUTS
from harness.experiment import ExperimentResult

logger = logging.getLogger(__name__)

REPORT_FORMATS = ("csv", "json", "xlsx")


def auc_frame(results: Iterable[ExperimentResult]) -> pd.DataFrame:
    rows = []
    for result in results:
        for holdout in HOLDOUTS:
            values = result.report.aucs[holdout]
            row = {
                "dataset": result.dataset,
                "missingness": result.missingness,
                "method": result.method,
                "holdout": holdout,
                "mean": result.report.mean(holdout),
                "sd": result.report.sd(holdout),
                "n": len(values),
            }
            row.update({f"auc_{i + 1}": v for i, v in enumerate(values)})
            rows.append(row)
    return pd.DataFrame(rows)


def rmse_frame(results: Iterable[ExperimentResult]) -> pd.DataFrame:
    rows = []
    for result in results:
        values = result.rmse
        rows.append({
            "dataset": result.dataset,
            "missingness": result.missingness,
            "method": result.method,
            "rmse_mean": statistics.fmean(values) if values else None,
            "rmse_sd": statistics.stdev(values) if len(values) > 1 else 0.0 if values else None,
            "n": len(values),
        })
    return pd.DataFrame(rows)


def write_reports(
    results: List[ExperimentResult],
    out_dir: Union[str, Path],
    stem: str = "benchmark",
    formats: Iterable[str] = ("csv", "json"),
) -> Dict[str, Path]:
    """
    Write AUC and RMSE tables.

    Args:
        results: Experiment results
        out_dir: Output directory (created if needed)
        stem: File name stem
        formats: Any of csv, json, xlsx

    Returns:
        Mapping of report name to written path
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tables = {"auc": auc_frame(results), "rmse": rmse_frame(results)}
    written: Dict[str, Path] = {}

    for fmt in formats:
        if fmt not in REPORT_FORMATS:
            raise ValueError(f"unknown report format {fmt!r}; expected one of {REPORT_FORMATS}")
        if fmt == "xlsx":
            path = out_dir / f"{stem}.xlsx"
            with pd.ExcelWriter(path, engine="openpyxl") as writer:
                for name, table in tables.items():
                    table.to_excel(writer, sheet_name=name, index=False)
            written["xlsx"] = path
            continue
        for name, table in tables.items():
            path = out_dir / f"{stem}_{name}.{fmt}"
            if fmt == "csv":
                table.to_csv(path, index=False)
            else:
                table.to_json(path, orient="records", indent=2)
            written[f"{name}_{fmt}"] = path

    for path in written.values():
        logger.info(f"Wrote report {path}")
    return written
