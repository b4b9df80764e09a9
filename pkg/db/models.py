"""
SQLAlchemy ORM models for the dpp-impute benchmark store.

Entity Relationship Overview:
- ExperimentRun: one (dataset, missingness, method) experiment cell
- HoldoutResult: AUC of one holdout in one repeat of a run
- ImputationScore: imputation RMSE of one repeat of a run

Database Design Notes:
- The full experiment config is stored as JSON so runs can be re-executed
- JSONB is used on PostgreSQL, plain JSON elsewhere
"""

import os

from sqlalchemy import (
    JSON, Boolean, CheckConstraint, Column, DateTime, Float, ForeignKey, Index, Integer, String,
    UniqueConstraint,
)
from sqlalchemy.dialects.postgresql import JSONB
from sqlalchemy.orm import declarative_base, relationship
from sqlalchemy.sql import func

Base = declarative_base()


def get_json_type():
    """Return appropriate JSON type based on database URL."""
    database_url = os.getenv("DATABASE_URL", "sqlite:///data/dpp_impute.db")
    if database_url.startswith("postgresql"):
        return JSONB
    return JSON


class ExperimentRun(Base):
    """One experiment cell run for a number of repeats."""

    __tablename__ = "experiment_runs"

    run_id = Column(Integer, primary_key=True, autoincrement=True)

    dataset = Column(String(200), nullable=False, index=True)
    missingness_kind = Column(String(10), nullable=False)
    missingness_rate = Column(Float, nullable=False)
    missingness_delta = Column(Float, nullable=False, default=0.0)
    method = Column(String(50), nullable=False, index=True)  # e.g. "detDPP-MissForest"
    sampler = Column(String(20), nullable=False)
    repeats = Column(Integer, nullable=False)
    seed = Column(Integer, nullable=False)
    fixed_missingness = Column(Boolean, nullable=False, default=False)
    config = Column(get_json_type(), nullable=False)

    created_at = Column(DateTime, server_default=func.now())

    holdout_results = relationship("HoldoutResult", back_populates="run", cascade="all, delete-orphan")
    imputation_scores = relationship("ImputationScore", back_populates="run", cascade="all, delete-orphan")

    __table_args__ = (
        CheckConstraint("repeats >= 1", name="check_repeats_positive"),
        CheckConstraint(
            "missingness_kind IN ('none', 'mcar', 'mnar')",
            name="check_missingness_kind",
        ),
        Index("idx_run_cell", "dataset", "missingness_kind", "method"),
    )

    def __repr__(self) -> str:
        return f"<ExperimentRun(id={self.run_id}, {self.dataset}, {self.missingness_kind}, {self.method})>"


class HoldoutResult(Base):
    """AUC of one holdout fold in one repeat."""

    __tablename__ = "holdout_results"

    result_id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.run_id"), nullable=False, index=True)
    holdout = Column(String(2), nullable=False)  # 'H1', 'H2' or 'H3'
    repeat = Column(Integer, nullable=False)
    auc = Column(Float, nullable=False)

    run = relationship("ExperimentRun", back_populates="holdout_results")

    __table_args__ = (
        CheckConstraint("auc >= 0 AND auc <= 1", name="check_auc_range"),
        CheckConstraint("holdout IN ('H1', 'H2', 'H3')", name="check_holdout_name"),
        UniqueConstraint("run_id", "holdout", "repeat", name="uq_run_holdout_repeat"),
    )

    def __repr__(self) -> str:
        return f"<HoldoutResult(run={self.run_id}, {self.holdout}, repeat={self.repeat}, auc={self.auc:.4f})>"


class ImputationScore(Base):
    """Imputation RMSE of one repeat."""

    __tablename__ = "imputation_scores"

    score_id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.run_id"), nullable=False, index=True)
    repeat = Column(Integer, nullable=False)
    rmse = Column(Float, nullable=False)

    run = relationship("ExperimentRun", back_populates="imputation_scores")

    __table_args__ = (
        CheckConstraint("rmse >= 0", name="check_rmse_non_negative"),
        UniqueConstraint("run_id", "repeat", name="uq_run_repeat"),
    )

    def __repr__(self) -> str:
        return f"<ImputationScore(run={self.run_id}, repeat={self.repeat}, rmse={self.rmse:.4f})>"
