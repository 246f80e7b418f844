"""Classifiers, evaluation protocol, and importance/selection reports."""

from .metrics import roc_auc, evaluate, stratified_split
from .logistic import LogisticModel, train_logistic, logistic_loss_and_grad
from .gbdt import GbdtConfig, BoostedTreesModel, train_gbdt
from .importance import gini_importance, all_relevant_select

__all__ = [
    "roc_auc",
    "evaluate",
    "stratified_split",
    "LogisticModel",
    "train_logistic",
    "logistic_loss_and_grad",
    "GbdtConfig",
    "BoostedTreesModel",
    "train_gbdt",
    "gini_importance",
    "all_relevant_select",
]
