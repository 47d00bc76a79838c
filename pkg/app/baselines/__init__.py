"""Shallow classifiers trained on flattened frames."""

from app.baselines.bayes import GaussianNB, gnb_fit_predict
from app.baselines.ensemble import EnsembleKind, TreeEnsemble, ensemble_fit
from app.baselines.knn import KnnModel, knn
from app.baselines.registry import BaselineModel, make_baseline
from app.baselines.svm import SvmModel, svm_rbf_fit
from app.baselines.tree import DecisionTree, TreeNode, dtree_fit, gini

__all__ = [
    "BaselineModel",
    "DecisionTree",
    "EnsembleKind",
    "GaussianNB",
    "KnnModel",
    "SvmModel",
    "TreeEnsemble",
    "TreeNode",
    "dtree_fit",
    "ensemble_fit",
    "gini",
    "gnb_fit_predict",
    "knn",
    "make_baseline",
    "svm_rbf_fit",
]
