from .bayes import NaiveBayes, naive_bayes_scores, predict_naive_bayes, train_naive_bayes
from .boosting import (
    BoostedEnsemble,
    BoostParams,
    adaboost_scores,
    predict_adaboost,
    train_adaboost_m1,
    training_error_bound,
)
from .dataset import LabeledDataset
from .forest import Forest, ForestParams, forest_scores, predict_forest, train_forest
from .heuristic import heuristic_classify, heuristic_from_ratios
from .resample import resample, resample_indices
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .tree import Tree, TreeParams, apply_tree, predict_tree, predict_tree_labels, train_tree

__all__ = [
    "BoostParams",
    "BoostedEnsemble",
    "Forest",
    "ForestParams",
    "LabeledDataset",
    "NaiveBayes",
    "Tree",
    "TreeParams",
    "adaboost_scores",
    "apply_tree",
    "forest_scores",
    "heuristic_classify",
    "heuristic_from_ratios",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "naive_bayes_scores",
    "predict_adaboost",
    "predict_forest",
    "predict_naive_bayes",
    "predict_tree",
    "predict_tree_labels",
    "resample",
    "resample_indices",
    "save_model",
    "train_adaboost_m1",
    "train_forest",
    "train_naive_bayes",
    "train_tree",
    "training_error_bound",
]
