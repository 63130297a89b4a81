"""Binary-classification metrics: confusion matrix, per-class and
support-weighted precision/recall/F1, and AUC via two independent routes
(rank statistic and trapezoidal ROC integration) that must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "ClassMetrics",
    "FoldOutcome",
    "EvalReport",
    "confusion_matrix",
    "class_metrics",
    "weighted_metrics",
    "auc_rank",
    "auc_trapezoid",
    "evaluation_report",
]


@dataclass(frozen=True)
class ClassMetrics:
    """Per-class rates; for the weighted aggregate, support is the total n."""

    tp_rate: float
    fp_rate: float
    precision: float
    recall: float
    f1: float
    support: int

    def __post_init__(self) -> None:
        for name in ("tp_rate", "fp_rate", "precision", "recall", "f1"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} = {value} outside [0, 1]")
        if self.support < 0:
            raise ValueError("support must be >= 0")


@dataclass(frozen=True)
class FoldOutcome:
    """One cross-validation fold's own test-set summary."""

    fold: int
    n_test: int
    weighted_f1: float
    auc: Optional[float]  # None when the fold's test slice is single-class


@dataclass
class EvalReport:
    """Pooled out-of-fold evaluation: per-class and weighted metrics plus AUC."""

    per_class: dict[int, ClassMetrics]
    weighted: ClassMetrics
    auc: float
    confusion: np.ndarray  # confusion[i, j] = count(true class i, predicted j)
    folds: list[FoldOutcome] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.confusion = np.asarray(self.confusion, dtype=int)
        if self.confusion.shape != (2, 2):
            raise ValueError("confusion matrix must be 2x2")
        if not 0.0 <= self.auc <= 1.0:
            raise ValueError(f"auc = {self.auc} outside [0, 1]")

    def to_json_dict(self) -> dict:
        return {
            "per_class": {
                str(c): vars(m) for c, m in sorted(self.per_class.items())
            },
            "weighted": vars(self.weighted),
            "auc": self.auc,
            "confusion": self.confusion.tolist(),
            "folds": [vars(f) for f in self.folds],
        }


def _as_binary_labels(y) -> np.ndarray:
    y = np.asarray(y, dtype=int)
    if y.ndim != 1:
        raise ValueError("labels must be one-dimensional")
    if not np.all(np.isin(y, (0, 1))):
        raise ValueError("labels must be 0 (suitable) or 1 (disturbing)")
    return y


def confusion_matrix(y_true, y_pred) -> np.ndarray:
    """2x2 counts with rows = true class, columns = predicted class."""
    y_true = _as_binary_labels(y_true)
    y_pred = _as_binary_labels(y_pred)
    if len(y_true) != len(y_pred):
        raise ValueError("y_true and y_pred lengths differ")
    cm = np.zeros((2, 2), dtype=int)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def class_metrics(cm: np.ndarray, cls: int) -> ClassMetrics:
    """One-vs-rest rates for ``cls`` read off the confusion matrix."""
    cm = np.asarray(cm)
    other = 1 - cls
    support = int(cm[cls].sum())
    predicted = int(cm[:, cls].sum())
    correct = int(cm[cls, cls])
    recall = _safe_div(correct, support)
    precision = _safe_div(correct, predicted)
    fp_rate = _safe_div(int(cm[other, cls]), int(cm[other].sum()))
    f1 = _safe_div(2 * precision * recall, precision + recall)
    return ClassMetrics(
        tp_rate=recall,
        fp_rate=fp_rate,
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
    )


def weighted_metrics(per_class: dict[int, ClassMetrics]) -> ClassMetrics:
    """Support-weighted average of the per-class metrics."""
    total = sum(m.support for m in per_class.values())
    if total == 0:
        raise ValueError("no samples to weight")

    def avg(name: str) -> float:
        return sum(getattr(m, name) * m.support for m in per_class.values()) / total

    return ClassMetrics(
        tp_rate=avg("tp_rate"),
        fp_rate=avg("fp_rate"),
        precision=avg("precision"),
        recall=avg("recall"),
        f1=avg("f1"),
        support=total,
    )


def _midranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    sorted_values = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_values[j + 1] == sorted_values[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auc_rank(y_true, scores) -> float:
    """AUC as the Mann-Whitney rank statistic with midrank tie handling.

    Equals the probability that a random positive outranks a random
    negative, counting ties as half.
    """
    y_true = _as_binary_labels(y_true)
    scores = np.asarray(scores, dtype=float)
    if len(scores) != len(y_true):
        raise ValueError("scores and labels lengths differ")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    n_pos = int(y_true.sum())
    n_neg = len(y_true) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    ranks = _midranks(scores)
    rank_sum = float(ranks[y_true == 1].sum())
    u_statistic = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u_statistic / (n_pos * n_neg)


def roc_points(y_true, scores) -> tuple[np.ndarray, np.ndarray]:
    """(FPR, TPR) sweep over descending score thresholds, tie groups merged."""
    y_true = _as_binary_labels(y_true)
    scores = np.asarray(scores, dtype=float)
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = y_true[order]
    tps = np.cumsum(sorted_labels)
    fps = np.cumsum(1 - sorted_labels)
    # keep only the last index of each tie block so ties move diagonally
    keep = np.flatnonzero(np.append(np.diff(sorted_scores) != 0, True))
    n_pos = tps[-1]
    n_neg = fps[-1]
    tpr = np.concatenate(([0.0], tps[keep] / n_pos))
    fpr = np.concatenate(([0.0], fps[keep] / n_neg))
    return fpr, tpr


def auc_trapezoid(y_true, scores) -> float:
    """AUC as the trapezoidal area under the ROC sweep (oracle route)."""
    fpr, tpr = roc_points(y_true, scores)
    return float(np.trapezoid(tpr, fpr))


def evaluation_report(
    y_true,
    y_pred,
    scores,
    folds: Optional[Sequence[FoldOutcome]] = None,
) -> EvalReport:
    """Assemble the full report from pooled predictions and scores."""
    cm = confusion_matrix(y_true, y_pred)
    per_class = {c: class_metrics(cm, c) for c in (0, 1)}
    return EvalReport(
        per_class=per_class,
        weighted=weighted_metrics(per_class),
        auc=auc_rank(y_true, scores),
        confusion=cm,
        folds=list(folds or []),
    )
