"""Missingness induction and iterative forest-based imputation."""

from impute.imputer import ImputeConfig, impute, initial_fill, method_label
from impute.masking import MaskedData, induce_mcar, induce_mnar
from impute.metrics import imputation_rmse

__all__ = [
    "ImputeConfig",
    "MaskedData",
    "imputation_rmse",
    "impute",
    "induce_mcar",
    "induce_mnar",
    "initial_fill",
    "method_label",
]
