"""Moderation queue ranking: score every channel in a corpus with a
trained model and order by severity.

Severity "prob" is the model's disturbing-class probability; severity
"prob_times_count" additionally multiplies by an externally supplied
per-channel count of known disturbing videos when one is present.
Attributions summarize how much each feature group pushed the
probability, measured by ablating the group to its training-set means.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from ..corpus import Corpus
from ..features import extract_matrix, feature_group
from .base import TrainedModel

__all__ = ["RankedChannel", "SEVERITY_MODES", "rank_channels"]

SEVERITY_MODES = ("prob", "prob_times_count")


@dataclass(frozen=True)
class RankedChannel:
    """One queue entry: identity, severity, probability, and diagnostics."""

    channel_id: str
    score: float
    probability: float
    attributions: dict  # feature group -> probability contribution
    flags: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "channel_id": self.channel_id,
            "score": self.score,
            "probability": self.probability,
            "attributions": dict(self.attributions),
            "flags": list(self.flags),
        }


def _group_attributions(
    model: TrainedModel, values: np.ndarray, probabilities: np.ndarray
) -> list[dict]:
    """Probability drop when each feature group is reset to training means.

    Positive attribution means the group's observed values push the channel
    toward the disturbing class relative to an average channel.
    """
    if model.feature_means is None:
        return [{} for _ in range(len(values))]
    means = np.asarray(model.feature_means)
    groups: dict[str, list[int]] = {}
    for column, name in enumerate(model.feature_names):
        groups.setdefault(feature_group(name), []).append(column)
    contributions = [dict() for _ in range(len(values))]
    for group, columns in sorted(groups.items()):
        ablated = values.copy()
        ablated[:, columns] = means[columns]
        delta = probabilities - model.predict_proba(ablated)[:, 1]
        for row, value in enumerate(delta):
            contributions[row][group] = float(value)
    return contributions


def rank_channels(
    model: TrainedModel,
    corpus: Corpus,
    severity: str = "prob",
    disturbing_counts: Optional[Mapping[str, int]] = None,
) -> list[RankedChannel]:
    """Descending severity order; ties break by channel_id ascending."""
    if severity not in SEVERITY_MODES:
        raise ValueError(f"severity must be one of {SEVERITY_MODES}")
    if model.feature_spec is None or model.vocabularies is None:
        raise ValueError("ranking requires a model trained with a persisted spec")
    matrix = extract_matrix(corpus, model.feature_spec, vocabs=model.vocabularies)
    matrix = matrix.select(list(model.feature_names))
    probabilities = model.predict_proba(matrix.values)[:, 1]
    attributions = _group_attributions(model, matrix.values, probabilities)

    entries = []
    counts = disturbing_counts or {}
    for row, channel_id in enumerate(matrix.channel_ids):
        probability = float(probabilities[row])
        score = probability
        if severity == "prob_times_count" and channel_id in counts:
            score = probability * counts[channel_id]
        channel = corpus.get(channel_id)
        flags = ("subscriber_count_hidden",) if channel.subscriber_count is None else ()
        entries.append(
            RankedChannel(
                channel_id=channel_id,
                score=score,
                probability=probability,
                attributions=attributions[row],
                flags=flags,
            )
        )
    entries.sort(key=lambda e: (-e.score, e.channel_id))
    return entries
