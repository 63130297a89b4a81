"""Stratified k-fold cross-validation with pooled out-of-fold evaluation.

Every sample is predicted exactly once by a model that never saw it;
metrics are computed over the pooled out-of-fold predictions (single
numbers per method rather than per-fold averages), with a per-fold
breakdown kept for inspection.
"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

import numpy as np

from ..features import FeatureMatrix, creation_time_violations
from ..stats import stratified_folds
from .base import resolve_kind, train
from .metrics import FoldOutcome, auc_rank, class_metrics, confusion_matrix
from .metrics import EvalReport, evaluation_report, weighted_metrics

__all__ = ["cross_val_probabilities", "evaluate_cv", "evaluate_creation_time"]


def _unpack(matrix, labels):
    if isinstance(matrix, FeatureMatrix):
        X = matrix.values
        names = tuple(matrix.names)
        if labels is None:
            labels = matrix.labels
    else:
        X = np.asarray(matrix, dtype=float)
        names = None
    if labels is None:
        raise ValueError("labels are required")
    y = np.asarray(labels, dtype=int)
    return X, y, names


def cross_val_probabilities(
    kind: str,
    matrix,
    labels=None,
    folds: int = 10,
    seed: int = 0,
    hyperparams: Optional[Mapping] = None,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Pooled out-of-fold disturbing-class probabilities.

    Returns the probability vector aligned with the input rows plus the
    test-fold index arrays (a partition of all row indices).
    """
    kind = resolve_kind(kind)
    X, y, _ = _unpack(matrix, labels)
    counts = np.bincount(y, minlength=2)
    if counts.min() < folds:
        raise ValueError(
            f"stratified {folds}-fold CV needs at least {folds} samples per class, "
            f"got {counts.tolist()}"
        )
    fold_indices = stratified_folds(y, folds, seed=seed)
    probabilities = np.full(len(y), np.nan)
    for fold_number, test_idx in enumerate(fold_indices):
        train_mask = np.ones(len(y), dtype=bool)
        train_mask[test_idx] = False
        model = train(
            kind,
            X[train_mask],
            y[train_mask],
            hyperparams=hyperparams,
            seed=seed + fold_number,
        )
        probabilities[test_idx] = model.predict_proba(X[test_idx])[:, 1]
    if np.any(np.isnan(probabilities)):
        raise AssertionError("some samples were never predicted out-of-fold")
    return probabilities, fold_indices


def _fold_breakdown(
    y: np.ndarray, probabilities: np.ndarray, fold_indices: Sequence[np.ndarray]
) -> list[FoldOutcome]:
    outcomes = []
    for fold_number, test_idx in enumerate(fold_indices):
        y_fold = y[test_idx]
        p_fold = probabilities[test_idx]
        pred_fold = (p_fold >= 0.5).astype(int)
        cm = confusion_matrix(y_fold, pred_fold)
        per_class = {c: class_metrics(cm, c) for c in (0, 1)}
        single_class = len(np.unique(y_fold)) < 2
        outcomes.append(
            FoldOutcome(
                fold=fold_number,
                n_test=len(test_idx),
                weighted_f1=weighted_metrics(per_class).f1,
                auc=None if single_class else auc_rank(y_fold, p_fold),
            )
        )
    return outcomes


def evaluate_cv(
    kind: str,
    matrix,
    labels=None,
    folds: int = 10,
    seed: int = 0,
    hyperparams: Optional[Mapping] = None,
) -> EvalReport:
    """Stratified k-fold evaluation pooled over out-of-fold predictions."""
    X, y, _ = _unpack(matrix, labels)
    probabilities, fold_indices = cross_val_probabilities(
        kind, X, y, folds=folds, seed=seed, hyperparams=hyperparams
    )
    predictions = (probabilities >= 0.5).astype(int)
    return evaluation_report(
        y, predictions, probabilities, folds=_fold_breakdown(y, probabilities, fold_indices)
    )


def evaluate_creation_time(
    kind: str,
    matrix: FeatureMatrix,
    labels=None,
    folds: int = 10,
    seed: int = 0,
    hyperparams: Optional[Mapping] = None,
) -> EvalReport:
    """evaluate_cv over a creation-time matrix, with the activity scan enforced.

    The matrix must carry feature names (a FeatureMatrix) so the
    activity-prefix scan can reject any feature derived from channel or
    user activity before training starts.
    """
    if not isinstance(matrix, FeatureMatrix):
        raise ValueError("creation-time evaluation requires a named FeatureMatrix")
    violations = creation_time_violations(matrix.names)
    if violations:
        raise ValueError(f"activity-derived features present: {violations}")
    return evaluate_cv(kind, matrix, labels, folds=folds, seed=seed, hyperparams=hyperparams)
