"""CART trees and random forests with uniform, DPP and deterministic-DPP row subsampling."""

from forest.batching import partition_batches
from forest.forest import ForestConfig, ForestModel, fit_forest, forest_scores, predict_forest
from forest.tree import DecisionTree, TreeConfig, fit_tree

__all__ = [
    "DecisionTree",
    "ForestConfig",
    "ForestModel",
    "TreeConfig",
    "fit_forest",
    "fit_tree",
    "forest_scores",
    "partition_batches",
    "predict_forest",
]
