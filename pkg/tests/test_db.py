import pytest
from sqlalchemy.exc import IntegrityError

from db.db_connection import create_db_engine, get_db_session, session_scope
from db.models import Base, ExperimentRun, HoldoutResult, ImputationScore
from db.results_store import load_run_summaries, store_experiment_result
from harness.evaluation import FoldReport
from harness.experiment import ExperimentConfig, ExperimentResult, MissingnessSpec
from impute import ImputeConfig


@pytest.fixture
def session():
    engine = create_db_engine("sqlite:///:memory:")
    Base.metadata.create_all(engine)
    session = get_db_session(engine)
    yield session
    session.close()


def make_result(aucs, rmse=(0.4, 0.5)) -> ExperimentResult:
    cfg = ExperimentConfig(
        missingness=MissingnessSpec("mnar", 0.2, 0.5),
        impute=ImputeConfig(sampler="detdpp"),
        repeats=len(aucs),
        seed=3,
        fixed_missingness=True,
    )
    report = FoldReport()
    for value in aucs:
        report.add({"H1": value, "H2": value, "H3": value})
    return ExperimentResult("SYNTH-500x8", cfg.missingness.label, cfg.impute.label, cfg, report, list(rmse))


def test_store_and_summarize(session):
    run = store_experiment_result(session, make_result([0.7, 0.8]))
    session.commit()

    assert run.run_id is not None
    assert run.sampler == "detdpp"
    assert run.missingness_delta == 0.5
    assert run.config["impute"]["forest"]["n_trees"] == 10
    assert session.query(HoldoutResult).count() == 6
    assert session.query(ImputationScore).count() == 2

    summaries = load_run_summaries(session)
    assert [s["holdout"] for s in summaries] == ["H1", "H2", "H3"]
    assert summaries[0]["method"] == "detDPP-MissForest"
    assert summaries[0]["mean_auc"] == pytest.approx(0.75)
    assert summaries[0]["n"] == 2


def test_delete_cascades(session):
    run = store_experiment_result(session, make_result([0.6]))
    session.commit()
    session.delete(run)
    session.commit()
    assert session.query(ExperimentRun).count() == 0
    assert session.query(HoldoutResult).count() == 0


def test_auc_range_enforced(session):
    run = store_experiment_result(session, make_result([0.6]))
    session.commit()
    session.add(HoldoutResult(run_id=run.run_id, holdout="H1", repeat=2, auc=1.5))
    with pytest.raises(IntegrityError):
        session.flush()
    session.rollback()


def test_duplicate_holdout_repeat_rejected(session):
    run = store_experiment_result(session, make_result([0.6]))
    session.commit()
    session.add(HoldoutResult(run_id=run.run_id, holdout="H2", repeat=1, auc=0.5))
    with pytest.raises(IntegrityError):
        session.flush()
    session.rollback()


def test_session_scope_rolls_back_on_error():
    engine = create_db_engine("sqlite:///:memory:")
    Base.metadata.create_all(engine)
    with pytest.raises(RuntimeError):
        with session_scope(engine) as session:
            store_experiment_result(session, make_result([0.6]))
            raise RuntimeError("abort")
    with session_scope(engine) as session:
        assert session.query(ExperimentRun).count() == 0
