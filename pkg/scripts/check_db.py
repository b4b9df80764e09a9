#!/usr/bin/env python3
"""Print what the result store holds: row counts, then mean AUC per run and holdout."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from db.db_connection import session_scope  # noqa: E402
from db.models import ExperimentRun, HoldoutResult, ImputationScore  # noqa: E402
from db.results_store import load_run_summaries  # noqa: E402


def main():
    with session_scope() as session:
        for label, model in (("Experiment runs", ExperimentRun), ("Holdout results", HoldoutResult),
                             ("Imputation scores", ImputationScore)):
            print(f"{label}: {session.query(model).count()}")

        summaries = load_run_summaries(session)
        if not summaries:
            print("No stored runs; use `benchmark --store-db` to add some.")
        for row in summaries:
            print(f"  [{row['run_id']}] {row['dataset']} | {row['missingness']} | {row['method']} | "
                  f"{row['holdout']}: mean AUC {row['mean_auc']:.4f} over {row['n']} repeats")


if __name__ == "__main__":
    main()
