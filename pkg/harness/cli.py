"""
Command-line entry point for the dpp-impute pipeline.

Every stage reads and writes CSV files with a header row; an empty field is a
missing value. Results are printed as JSON or written as CSV/JSON reports.

Usage:
    python -m harness.cli generate-data --n-rows 500 --n-features 8 --out data/synth.csv
    python -m harness.cli induce-missingness --data data/synth.csv --kind mcar --rate 0.2 --out data/synth_mcar.csv
    python -m harness.cli impute --data data/synth_mcar.csv --method missforest --sampler detdpp --out data/imputed.csv
    python -m harness.cli evaluate --data data/imputed.csv
    python -m harness.cli benchmark --config configs/benchmark.json --out-dir reports --store-db
    python -m harness.cli dpp-sample --data data/synth.csv --rows 20 --k 4 --mode greedy
    python -m harness.cli qdpp-simulate --n 6 --d 3 --shots 1000 --topology parallel
"""

import argparse
import json
import logging
import sys
from collections import Counter
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from common import settings
from common.errors import DppImputeError, InvalidInputError
from common.logs import configure_logging
from common.rng import derive_rng
from dpp import det_kdpp, highest_prob_subset_bruteforce, sample_kdpp
from forest.subsampling import SAMPLERS, batch_ensemble, top_eigenvectors
from harness.config import load_benchmark_config, load_impute_config
from harness.datasets import DEFAULT_OUTCOME_COLUMN, generate_synthetic, load_csv, save_csv
from harness.evaluation import three_fold_eval
from harness.experiment import MissingnessSpec, run_grid
from harness.gbt import GBTConfig
from harness.reporting import write_reports
from impute import ImputeConfig, impute
from impute.imputer import METHODS
from numerics import qr_orthonormalize
from qdpp import (
    LoaderTopology, build_qdpp_circuit, lower_fbs, measure, most_frequent_outcome, resources, simulate_qdpp,
)

logger = logging.getLogger(__name__)


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def cmd_generate_data(args: argparse.Namespace) -> None:
    dataset = generate_synthetic(args.n_rows, args.n_features, args.n_informative, args.class_sep, args.seed)
    save_csv(args.out, dataset.X, dataset.y, dataset.feature_names, args.outcome_column)


def cmd_induce_missingness(args: argparse.Namespace) -> None:
    data = load_csv(args.data, args.outcome_column)
    spec = MissingnessSpec(kind=args.kind, rate=args.rate, delta=args.delta)
    masked = spec.apply(data, derive_rng(args.seed, "missingness"))
    logger.info(f"Induced {spec.label}: missing fraction {data.missing_fraction:.3f} -> {masked.missing_fraction:.3f}")
    save_csv(args.out, masked.values, masked.outcome, masked.feature_names, args.outcome_column, mask=masked.mask)


def cmd_impute(args: argparse.Namespace) -> None:
    cfg = load_impute_config(args.config) if args.config else ImputeConfig()
    overrides = {}
    if args.method:
        overrides["method"] = args.method
    if args.sampler:
        overrides["sampler"] = args.sampler
    if args.seed is not None:
        overrides["seed"] = args.seed
    cfg = replace(cfg, **overrides)

    data = load_csv(args.data, args.outcome_column)
    logger.info(f"Imputing {data} with {cfg.label}")
    imputed = impute(data, cfg)
    save_csv(args.out, imputed, data.outcome, data.feature_names, args.outcome_column)


def cmd_evaluate(args: argparse.Namespace) -> None:
    data = load_csv(args.data, args.outcome_column)
    if not data.mask.all():
        raise InvalidInputError(f"{args.data} still has {int((~data.mask).sum())} missing cells; impute it first")
    report = three_fold_eval(data.values, data.outcome, GBTConfig(), seed=args.seed)
    payload = {"data": str(args.data), "holdouts": report.to_dict()}
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(json.dumps(payload, indent=2), encoding="utf-8")
        logger.info(f"Wrote {args.out}")
    _print_json(payload)


def cmd_benchmark(args: argparse.Namespace) -> None:
    base, missingness, methods = load_benchmark_config(args.config)
    if args.seed is not None:
        base = replace(base, seed=args.seed)
    logger.info(f"Benchmark: {len(missingness)} missingness settings x {len(methods)} methods, {base.repeats} repeats")
    results = run_grid(base, missingness, methods)

    formats = ("csv", "json", "xlsx") if args.xlsx else ("csv", "json")
    write_reports(results, args.out_dir, stem=Path(args.config).stem, formats=formats)

    if args.store_db:
        from db.db_connection import session_scope
        from db.results_store import store_experiment_result

        with session_scope() as session:
            for result in results:
                store_experiment_result(session, result)
        logger.info(f"Stored {len(results)} experiment results in the database")


def cmd_dpp_sample(args: argparse.Namespace) -> None:
    data = load_csv(args.data, args.outcome_column)
    if not data.mask.all():
        raise InvalidInputError("dpp-sample needs a complete feature matrix")
    rows = data.values if args.rows is None else data.values[: args.rows]
    ensemble = batch_ensemble(rows)

    payload = {"n": ensemble.n, "k": args.k, "mode": args.mode}
    if args.mode == "greedy":
        payload["subset"] = list(det_kdpp(ensemble.L, args.k, eig=ensemble.eig))
    elif args.mode == "bruteforce":
        payload["subset"] = list(highest_prob_subset_bruteforce(ensemble, args.k))
    else:
        rng = derive_rng(args.seed, "dpp-sample")
        counts = Counter(sample_kdpp(ensemble, args.k, rng) for _ in range(args.n_samples))
        payload["samples"] = [{"subset": list(s), "count": c} for s, c in counts.most_common()]
    _print_json(payload)


def _qdpp_matrix(args: argparse.Namespace) -> np.ndarray:
    if args.data:
        data = load_csv(args.data, args.outcome_column)
        if not data.mask.all():
            raise InvalidInputError("qdpp-simulate needs a complete feature matrix")
        return top_eigenvectors(batch_ensemble(data.values[: args.n]), args.d)
    rng = derive_rng(args.seed, "qdpp-matrix")
    return qr_orthonormalize(rng.standard_normal((args.n, args.d)))


def cmd_qdpp_simulate(args: argparse.Namespace) -> None:
    A = _qdpp_matrix(args)
    topology = LoaderTopology(args.topology)
    circuit = build_qdpp_circuit(A, topology)
    payload = {
        "n": int(A.shape[0]),
        "d": int(A.shape[1]),
        "topology": topology.value,
        "resources": resources(circuit),
        "lowered_resources": resources(lower_fbs(circuit)),
    }

    rng = derive_rng(args.seed, "shots")
    counts = measure(simulate_qdpp(A), args.shots, rng)
    payload["shots"] = args.shots
    payload["counts"] = [{"subset": list(s), "count": c} for s, c in counts.most_common()]
    payload["exact_mode"] = list(most_frequent_outcome(A, None, None))

    if args.circuit_out:
        Path(args.circuit_out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.circuit_out).write_text(circuit.to_json(indent=2), encoding="utf-8")
        logger.info(f"Wrote circuit to {args.circuit_out}")
    _print_json(payload)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="DPP subsampling for forest-based imputation")
    parser.add_argument("--log-level", default=None, help="Logging level (default: DPP_LOG_LEVEL or INFO)")
    parser.add_argument("--log-file", default=None, help="Also log to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p: argparse.ArgumentParser, required: bool = True) -> None:
        p.add_argument("--data", required=required, help="Input CSV (header row, empty field = missing)")
        p.add_argument("--outcome-column", default=DEFAULT_OUTCOME_COLUMN, help="Binary outcome column name")

    p = sub.add_parser("generate-data", help="Write a synthetic two-class dataset")
    p.add_argument("--n-rows", type=int, default=500)
    p.add_argument("--n-features", type=int, default=8)
    p.add_argument("--n-informative", type=int, default=None, help="Default: all features")
    p.add_argument("--class-sep", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outcome-column", default=DEFAULT_OUTCOME_COLUMN)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate_data)

    p = sub.add_parser("induce-missingness", help="Hide values MCAR or MNAR")
    data_args(p)
    p.add_argument("--kind", choices=("mcar", "mnar"), default="mcar")
    p.add_argument("--rate", type=float, default=0.2)
    p.add_argument("--delta", type=float, default=0.0, help="MNAR relative rate shift between outcome classes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_induce_missingness)

    p = sub.add_parser("impute", help="Impute missing values")
    data_args(p)
    p.add_argument("--config", help="ImputeConfig JSON file")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--sampler", choices=SAMPLERS)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_impute)

    p = sub.add_parser("evaluate", help="Three-fold holdout AUC of a complete dataset")
    data_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="Also write the report JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="Run a missingness x method grid from a JSON config")
    p.add_argument("--config", required=True, help="Benchmark config JSON file")
    p.add_argument("--out-dir", default=settings.REPORT_DIR)
    p.add_argument("--seed", type=int, default=None, help="Override the config seed")
    p.add_argument("--xlsx", action="store_true", help="Also write an Excel workbook")
    p.add_argument("--store-db", action="store_true", help="Persist results to DATABASE_URL")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("dpp-sample", help="k-DPP selection on standardized data rows")
    data_args(p)
    p.add_argument("--rows", type=int, default=None, help="Use only the first ROWS rows")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=("sample", "greedy", "bruteforce"), default="sample")
    p.add_argument("--n-samples", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_dpp_sample)

    p = sub.add_parser("qdpp-simulate", help="Simulate the determinantal sampling circuit")
    data_args(p, required=False)
    p.add_argument("--n", type=int, default=6, help="Qubits (rows)")
    p.add_argument("--d", type=int, default=3, help="Loaded columns")
    p.add_argument("--topology", choices=[t.value for t in LoaderTopology], default=LoaderTopology.PARALLEL.value)
    p.add_argument("--shots", type=int, default=settings.DEFAULT_SHOTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--circuit-out", help="Write the circuit gate list as JSON")
    p.set_defaults(func=cmd_qdpp_simulate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_file)
    if getattr(args, "n_informative", 0) is None:
        args.n_informative = args.n_features

    try:
        args.func(args)
    except DppImputeError as e:
        logger.error(f"{args.command} failed: {e}")
        for note in getattr(e, "__notes__", []):
            logger.error(f"  {note}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
