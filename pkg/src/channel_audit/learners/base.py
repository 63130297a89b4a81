"""Training dispatcher and the TrainedModel wrapper.

A TrainedModel bundles a fitted estimator with everything inference
needs to reproduce training-time extraction: the feature names, the
FeatureSpec, the vocabularies, the preprocessing report, and training
metadata.  Prediction is side-effect free and thread-safe; models are
immutable after training.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from ..features import FeatureSpec, PreprocessReport, Vocabulary
from .bayes import GaussianNaiveBayes
from .boosting import LogitBoost
from .ensemble import AverageProbabilityEnsemble
from .forest import RandomForest
from .linear import LogisticRegression
from .mlp import MLPClassifier

__all__ = ["KINDS", "KIND_ALIASES", "TrainedModel", "train", "resolve_kind"]

KINDS = (
    "random_forest",
    "logistic_regression",
    "naive_bayes",
    "mlp",
    "logitboost_meta",
    "avgprob_ensemble",
)

KIND_ALIASES = {
    "rf": "random_forest",
    "lr": "logistic_regression",
    "nb": "naive_bayes",
    "nn": "mlp",
    "boost": "logitboost_meta",
    "avg": "avgprob_ensemble",
}

DEFAULT_ENSEMBLE_MEMBERS = ("random_forest", "logistic_regression", "naive_bayes")


def resolve_kind(kind: str) -> str:
    canonical = KIND_ALIASES.get(kind, kind)
    if canonical not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {KINDS}")
    return canonical


@dataclass(frozen=True)
class TrainedModel:
    """Immutable fitted model plus its feature contract and metadata."""

    kind: str
    estimator: object
    feature_names: tuple[str, ...]
    feature_spec: Optional[FeatureSpec] = None
    vocabularies: Optional[dict] = None  # field -> Vocabulary
    preprocess_report: Optional[PreprocessReport] = None
    feature_means: Optional[tuple[float, ...]] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.feature_means is not None and len(self.feature_means) != len(
            self.feature_names
        ):
            raise ValueError("feature_means must align with feature_names")

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != len(self.feature_names):
            raise ValueError(
                f"expected {len(self.feature_names)} features, got shape {X.shape}"
            )
        probs = self.estimator.predict_proba(X)
        if not np.allclose(probs.sum(axis=1), 1.0, atol=1e-9):
            raise AssertionError("class probabilities must sum to 1")
        return probs

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)


def _build_estimator(kind: str, hyperparams: dict, seed: int):
    if kind == "random_forest":
        return RandomForest(seed=seed, **hyperparams)
    if kind == "logistic_regression":
        return LogisticRegression(**hyperparams)
    if kind == "naive_bayes":
        return GaussianNaiveBayes(**hyperparams)
    if kind == "mlp":
        return MLPClassifier(seed=seed, **hyperparams)
    if kind == "logitboost_meta":
        return LogitBoost(**hyperparams)
    raise ValueError(f"unknown model kind {kind!r}")


def _validate_training_data(X: np.ndarray, y: np.ndarray) -> None:
    if X.ndim != 2:
        raise ValueError("matrix must be two-dimensional")
    if len(X) != len(y):
        raise ValueError("matrix and labels lengths differ")
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix contains non-finite values")
    if not np.all(np.isin(y, (0, 1))):
        raise ValueError("labels must be 0 (suitable) or 1 (disturbing)")
    if len(np.unique(y)) < 2:
        raise ValueError("training labels contain a single class")


def train(
    kind: str,
    matrix,
    labels,
    hyperparams: Optional[Mapping] = None,
    seed: int = 0,
    feature_names: Optional[Sequence[str]] = None,
    feature_spec: Optional[FeatureSpec] = None,
    vocabularies: Optional[Mapping[str, Vocabulary]] = None,
    preprocess_report: Optional[PreprocessReport] = None,
    trained_at: Optional[str] = None,
) -> TrainedModel:
    """Fit one model kind on a preprocessed matrix.

    Deterministic given ``seed``.  ``trained_at`` is recorded verbatim when
    provided; leaving it None keeps model artifacts byte-reproducible.
    """
    kind = resolve_kind(kind)
    X = np.asarray(matrix, dtype=float)
    y = np.asarray(labels, dtype=int)
    _validate_training_data(X, y)
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(X.shape[1]))
    else:
        feature_names = tuple(feature_names)
        if len(feature_names) != X.shape[1]:
            raise ValueError("feature_names must match matrix width")

    params = dict(hyperparams or {})
    if kind == "avgprob_ensemble":
        member_kinds = tuple(params.pop("members", DEFAULT_ENSEMBLE_MEMBERS))
        member_params = params.pop("member_hyperparams", {})
        if params:
            raise ValueError(f"unknown ensemble hyperparameters: {sorted(params)}")
        members = []
        for offset, member_kind in enumerate(member_kinds):
            member_kind = resolve_kind(member_kind)
            estimator = _build_estimator(
                member_kind, dict(member_params.get(member_kind, {})), seed + offset
            )
            members.append((member_kind, estimator.fit(X, y)))
        estimator = AverageProbabilityEnsemble(members)
    else:
        estimator = _build_estimator(kind, params, seed).fit(X, y)

    metadata = {"seed": seed, "n_samples": int(len(y))}
    if trained_at is not None:
        metadata["trained_at"] = trained_at
    return TrainedModel(
        kind=kind,
        estimator=estimator,
        feature_names=feature_names,
        feature_spec=feature_spec,
        vocabularies=dict(vocabularies) if vocabularies is not None else None,
        preprocess_report=preprocess_report,
        feature_means=tuple(float(m) for m in X.mean(axis=0)),
        metadata=metadata,
    )
