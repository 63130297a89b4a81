"""Classifier suite: from-scratch estimators, stratified cross-validation,
weighted evaluation metrics, model artifacts, and queue ranking.
"""

from .base import (
    KIND_ALIASES,
    KINDS,
    TrainedModel,
    resolve_kind,
    train,
)
from .bayes import GaussianNaiveBayes
from .boosting import LogitBoost
from .crossval import cross_val_probabilities, evaluate_cv, evaluate_creation_time
from .ensemble import AverageProbabilityEnsemble
from .forest import RandomForest
from .linear import LogisticRegression
from .metrics import (
    ClassMetrics,
    EvalReport,
    FoldOutcome,
    auc_rank,
    auc_trapezoid,
    class_metrics,
    confusion_matrix,
    evaluation_report,
    roc_points,
    weighted_metrics,
)
from .mlp import MLPClassifier
from .model_io import (
    FORMAT_VERSION,
    ModelFormatError,
    ModelVersionError,
    load_model,
    save_model,
)
from .ranking import SEVERITY_MODES, RankedChannel, rank_channels
from .trees import DecisionTree

__all__ = [
    "KINDS",
    "KIND_ALIASES",
    "TrainedModel",
    "train",
    "resolve_kind",
    "DecisionTree",
    "RandomForest",
    "LogisticRegression",
    "GaussianNaiveBayes",
    "MLPClassifier",
    "LogitBoost",
    "AverageProbabilityEnsemble",
    "ClassMetrics",
    "EvalReport",
    "FoldOutcome",
    "confusion_matrix",
    "class_metrics",
    "weighted_metrics",
    "auc_rank",
    "auc_trapezoid",
    "roc_points",
    "evaluation_report",
    "cross_val_probabilities",
    "evaluate_cv",
    "evaluate_creation_time",
    "FORMAT_VERSION",
    "ModelFormatError",
    "ModelVersionError",
    "save_model",
    "load_model",
    "RankedChannel",
    "SEVERITY_MODES",
    "rank_channels",
]
