"""Versioned model artifacts.

A model file is a self-describing JSON container embedding the estimator
state, the FeatureSpec, the vocabularies, and the preprocessing report,
so inference can rebuild the exact training-time feature pipeline from
the artifact alone.  Serialization uses repr-precision floats and sorted
keys: saving the same model twice yields identical bytes.
"""

from __future__ import annotations

import json
from typing import Union

from ..features import FeatureSpec, PreprocessReport, Vocabulary
from .base import KINDS, TrainedModel
from .bayes import GaussianNaiveBayes
from .boosting import LogitBoost
from .ensemble import AverageProbabilityEnsemble
from .forest import RandomForest
from .linear import LogisticRegression
from .mlp import MLPClassifier

__all__ = [
    "FORMAT_NAME",
    "FORMAT_VERSION",
    "ModelFormatError",
    "ModelVersionError",
    "save_model",
    "load_model",
    "model_to_json_dict",
    "model_from_json_dict",
]

FORMAT_NAME = "channel-audit-model"
FORMAT_VERSION = 1

_ESTIMATORS = {
    "random_forest": RandomForest,
    "logistic_regression": LogisticRegression,
    "naive_bayes": GaussianNaiveBayes,
    "mlp": MLPClassifier,
    "logitboost_meta": LogitBoost,
}


class ModelFormatError(Exception):
    """The file is not a readable model artifact."""


class ModelVersionError(ModelFormatError):
    """The artifact's format version is not supported by this reader."""


def _estimator_state(model: TrainedModel) -> dict:
    if model.kind == "avgprob_ensemble":
        ensemble: AverageProbabilityEnsemble = model.estimator
        return {
            "members": [
                [kind, estimator.get_state()] for kind, estimator in ensemble.members
            ]
        }
    return model.estimator.get_state()


def _estimator_from_state(kind: str, state: dict):
    if kind == "avgprob_ensemble":
        members = [
            (member_kind, _ESTIMATORS[member_kind].from_state(member_state))
            for member_kind, member_state in state["members"]
        ]
        return AverageProbabilityEnsemble(members)
    return _ESTIMATORS[kind].from_state(state)


def model_to_json_dict(model: TrainedModel) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": model.kind,
        "estimator": _estimator_state(model),
        "feature_names": list(model.feature_names),
        "feature_spec": (
            model.feature_spec.to_json_dict() if model.feature_spec else None
        ),
        "vocabularies": (
            {name: list(v.items) for name, v in model.vocabularies.items()}
            if model.vocabularies is not None
            else None
        ),
        "preprocess": (
            model.preprocess_report.to_json_dict()
            if model.preprocess_report is not None
            else None
        ),
        "feature_means": (
            list(model.feature_means) if model.feature_means is not None else None
        ),
        "metadata": model.metadata,
    }


def model_from_json_dict(payload: dict) -> TrainedModel:
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_NAME:
        raise ModelFormatError("not a channel-audit model artifact")
    version = payload.get("version")
    if version != FORMAT_VERSION:
        raise ModelVersionError(
            f"artifact version {version!r} unsupported; this reader expects "
            f"version {FORMAT_VERSION}"
        )
    kind = payload["kind"]
    if kind not in KINDS:
        raise ModelFormatError(f"unknown model kind {kind!r}")
    vocabularies = payload.get("vocabularies")
    return TrainedModel(
        kind=kind,
        estimator=_estimator_from_state(kind, payload["estimator"]),
        feature_names=tuple(payload["feature_names"]),
        feature_spec=(
            FeatureSpec.from_json_dict(payload["feature_spec"])
            if payload.get("feature_spec")
            else None
        ),
        vocabularies=(
            {name: Vocabulary(name, tuple(items)) for name, items in vocabularies.items()}
            if vocabularies is not None
            else None
        ),
        preprocess_report=(
            PreprocessReport.from_json_dict(payload["preprocess"])
            if payload.get("preprocess")
            else None
        ),
        feature_means=(
            tuple(payload["feature_means"])
            if payload.get("feature_means") is not None
            else None
        ),
        metadata=dict(payload.get("metadata", {})),
    )


def save_model(model: TrainedModel, path) -> None:
    payload = model_to_json_dict(model)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True, indent=1)


def load_model(path) -> TrainedModel:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"unreadable model artifact: {exc}") from exc
    return model_from_json_dict(payload)
