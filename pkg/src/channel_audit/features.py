"""Feature extraction: labeled corpus + text analytics -> numeric matrix.

Eleven feature groups cover channel activity, graph shape, the madeForKids
declaration, linked media platforms, keyword/topic vocabularies, emotions,
emoji usage, and text polarity (81 features at nominal vocabulary sizes).
Heavy-tailed counts are log1p-transformed; which fields, like everything
else that affects the vector layout, lives in the FeatureSpec so train-time
and inference-time extraction stay bit-identical.

A creation-time variant excludes every feature that stems from channel or
user activity (view/video/subscriber/subscription/post counts and anything
post-derived), which is mechanically verifiable by feature-name prefix via
:func:`creation_time_violations`.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .corpus import ChannelLabel, ChannelRecord, Corpus, VideoLabel, VideoRecord
from .textlytics import ChannelAnalytics, analyze_channel, extract_emojis

__all__ = [
    "ALL_GROUPS",
    "GROUP_SIZES",
    "LABEL_TO_CLASS",
    "CLASS_NAMES",
    "FeatureSpec",
    "FeatureVector",
    "FeatureMatrix",
    "Vocabulary",
    "build_vocabulary",
    "build_vocabularies",
    "extract",
    "extract_matrix",
    "preprocess",
    "PreprocessReport",
    "creation_time_violations",
    "feature_group",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_sidecar",
    "read_sidecar",
]

# Feature groups and their nominal dimensionality (full vocabularies).
GROUP_SIZES = {
    "activity_counts": 6,
    "graph_metrics": 3,
    "made_for_kids": 4,
    "top_media": 11,
    "top_keywords": 10,
    "emotions": 8,
    "top_topics": 11,
    "emoji_scores": 2,
    "top_emojis_description": 10,
    "top_emojis_posts": 10,
    "polarity": 6,
}
ALL_GROUPS = tuple(GROUP_SIZES)

# Class encoding: the positive class is the disturbing one.
LABEL_TO_CLASS = {VideoLabel.SUITABLE: 0, VideoLabel.DISTURBING: 1}
CLASS_NAMES = ("suitable", "disturbing")

# Vocabulary sizes per field; media keeps a separate "other" bucket feature.
DEFAULT_VOCAB_K = {
    "keywords": 10,
    "topics": 11,
    "media": 10,
    "emojis_description": 10,
    "emojis_posts": 10,
}

DEFAULT_LOG_FIELDS = (
    "view_count",
    "video_count",
    "subscriber_count",
    "post_count",
    "description_char_count",
    "keywords_count",
    "links_count",
)

# Activity-derived features, excluded in the creation-time variant.  Groups
# listed first are dropped wholesale; the feature names cover groups that are
# only partially activity-derived.
CREATION_TIME_EXCLUDED_GROUPS = ("activity_counts", "top_emojis_posts")
CREATION_TIME_EXCLUDED_FEATURES = (
    "subscription_count",
    "hidden_subscribers",
    "mfk_video_ratio",
    "mfk_removed_video_ratio",
    "posts_emoji_mean",
    "posts_polarity_pos",
    "posts_polarity_neg",
)
# Name prefixes that a creation-time vector must never contain.
ACTIVITY_NAME_PREFIXES = (
    "view_count",
    "video_count",
    "subscriber_count",
    "subscription_count",
    "post_count",
    "posts_",
    "post_emoji:",
    "hidden_subscribers",
    "mfk_video_ratio",
    "mfk_removed_video_ratio",
)


def creation_time_violations(names: Iterable[str]) -> list[str]:
    """Mechanical scan: feature names that betray channel/user activity."""
    return [
        name
        for name in names
        if any(name.startswith(prefix) for prefix in ACTIVITY_NAME_PREFIXES)
    ]


_VOCAB_NAME_PREFIXES = {
    "media:": "top_media",
    "keyword:": "top_keywords",
    "topic:": "top_topics",
    "desc_emoji:": "top_emojis_description",
    "post_emoji:": "top_emojis_posts",
}


def feature_group(name: str) -> str:
    """The feature group a feature name belongs to."""
    group = _static_name_groups().get(name)
    if group is not None:
        return group
    for prefix, vocab_group in _VOCAB_NAME_PREFIXES.items():
        if name.startswith(prefix):
            return vocab_group
    raise ValueError(f"unknown feature name {name!r}")


# --------------------------------------------------------------------------
# FeatureSpec
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureSpec:
    """Declarative description of the feature vector layout.

    ``active_groups`` selects which groups are extracted;
    ``log_transform_fields`` lists the count features receiving log1p;
    ``variance_floor`` is the preprocessing drop threshold; and
    ``creation_time_only`` switches to the activity-free variant.
    """

    active_groups: tuple[str, ...] = ALL_GROUPS
    log_transform_fields: tuple[str, ...] = DEFAULT_LOG_FIELDS
    variance_floor: float = 1e-12
    creation_time_only: bool = False

    def __post_init__(self) -> None:
        unknown = set(self.active_groups) - set(ALL_GROUPS)
        if unknown:
            raise ValueError(f"unknown feature groups: {sorted(unknown)}")
        if len(set(self.active_groups)) != len(self.active_groups):
            raise ValueError("duplicate groups in active_groups")
        if self.variance_floor < 0:
            raise ValueError("variance_floor must be >= 0")

    def effective_groups(self) -> tuple[str, ...]:
        groups = [g for g in ALL_GROUPS if g in self.active_groups]
        if self.creation_time_only:
            groups = [g for g in groups if g not in CREATION_TIME_EXCLUDED_GROUPS]
        return tuple(groups)

    def _keep(self, name: str) -> bool:
        return not (
            self.creation_time_only and name in CREATION_TIME_EXCLUDED_FEATURES
        )

    def feature_names(self, vocabs: Mapping[str, "Vocabulary"]) -> list[str]:
        """Ordered feature names implied by this spec and the vocabularies."""
        names: list[str] = []
        for group in self.effective_groups():
            names.extend(n for n in _group_names(group, vocabs) if self._keep(n))
        return names

    def to_json_dict(self) -> dict:
        return {
            "active_groups": list(self.active_groups),
            "log_transform_fields": list(self.log_transform_fields),
            "variance_floor": self.variance_floor,
            "creation_time_only": self.creation_time_only,
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "FeatureSpec":
        return cls(
            active_groups=tuple(payload["active_groups"]),
            log_transform_fields=tuple(payload["log_transform_fields"]),
            variance_floor=float(payload["variance_floor"]),
            creation_time_only=bool(payload["creation_time_only"]),
        )


# --------------------------------------------------------------------------
# vocabularies
# --------------------------------------------------------------------------

VOCAB_FIELDS = ("keywords", "topics", "media", "emojis_description", "emojis_posts")


@dataclass(frozen=True)
class Vocabulary:
    """Ordered top-k items for one vocabulary field."""

    field_name: str
    items: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.field_name not in VOCAB_FIELDS:
            raise ValueError(f"unknown vocabulary field {self.field_name!r}")
        if len(set(self.items)) != len(self.items):
            raise ValueError("vocabulary items must be unique")

    def __len__(self) -> int:
        return len(self.items)


def _field_occurrences(channel: ChannelRecord, field_name: str) -> Iterable[str]:
    if field_name == "keywords":
        return channel.keywords
    if field_name == "topics":
        return channel.topic_categories
    if field_name == "media":
        return [platform for platform, _ in channel.linked_platforms]
    if field_name == "emojis_description":
        return extract_emojis(channel.description)
    if field_name == "emojis_posts":
        return [
            emoji
            for post in channel.posts
            for emoji in extract_emojis(post.description)
        ]
    raise ValueError(f"unknown vocabulary field {field_name!r}")


def build_vocabulary(
    channels: Iterable[ChannelRecord], field_name: str, k: Optional[int] = None
) -> Vocabulary:
    """Top-``k`` items of one field, ranked by total corpus occurrence count.

    Ties break lexicographically; a corpus with fewer than ``k`` distinct
    items yields a shorter vocabulary.
    """
    if k is None:
        k = DEFAULT_VOCAB_K[field_name]
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: Counter[str] = Counter()
    for channel in channels:
        counts.update(_field_occurrences(channel, field_name))
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return Vocabulary(field_name, tuple(item for item, _ in ranked[:k]))


def build_vocabularies(
    channels: Sequence[ChannelRecord], k_overrides: Optional[Mapping[str, int]] = None
) -> dict[str, Vocabulary]:
    """All five vocabularies over one corpus slice (training folds only in CV)."""
    overrides = dict(k_overrides or {})
    return {
        field_name: build_vocabulary(
            channels, field_name, overrides.get(field_name, DEFAULT_VOCAB_K[field_name])
        )
        for field_name in VOCAB_FIELDS
    }


# --------------------------------------------------------------------------
# extraction
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureVector:
    """One channel's numeric feature vector with aligned names."""

    channel_id: str
    values: tuple[float, ...]
    names: tuple[str, ...]
    label: Optional[VideoLabel] = None

    def __post_init__(self) -> None:
        if len(self.values) != len(self.names):
            raise ValueError("values and names must align")
        if any(not math.isfinite(v) for v in self.values):
            raise ValueError("feature vector contains non-finite values")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))


def _group_names(group: str, vocabs: Mapping[str, Vocabulary]) -> list[str]:
    if group == "activity_counts":
        return [
            "view_count",
            "video_count",
            "subscriber_count",
            "post_count",
            "description_char_count",
            "keywords_count",
        ]
    if group == "graph_metrics":
        return ["subscription_count", "hidden_subscribers", "links_count"]
    if group == "made_for_kids":
        return [
            "mfk_declared_kids",
            "mfk_declared_not_kids",
            "mfk_video_ratio",
            "mfk_removed_video_ratio",
        ]
    if group == "top_media":
        return [f"media:{p}" for p in vocabs["media"].items] + ["media:other"]
    if group == "top_keywords":
        return [f"keyword:{w}" for w in vocabs["keywords"].items]
    if group == "emotions":
        return [
            "emotion_trust",
            "emotion_surprise",
            "emotion_sadness",
            "emotion_joy",
            "emotion_fear",
            "emotion_disgust",
            "emotion_anticipation",
            "emotion_anger",
        ]
    if group == "top_topics":
        return [f"topic:{t}" for t in vocabs["topics"].items]
    if group == "emoji_scores":
        return ["description_emoji_mean", "posts_emoji_mean"]
    if group == "top_emojis_description":
        return [f"desc_emoji:{e}" for e in vocabs["emojis_description"].items]
    if group == "top_emojis_posts":
        return [f"post_emoji:{e}" for e in vocabs["emojis_posts"].items]
    if group == "polarity":
        return [
            "description_polarity_pos",
            "description_polarity_neg",
            "keywords_polarity_pos",
            "keywords_polarity_neg",
            "posts_polarity_pos",
            "posts_polarity_neg",
        ]
    raise ValueError(f"unknown group {group!r}")


_FIXED_NAME_GROUPS: dict[str, str] = {}


def _static_name_groups() -> dict[str, str]:
    if not _FIXED_NAME_GROUPS:
        for group in GROUP_SIZES:
            if group in _VOCAB_NAME_PREFIXES.values():
                continue
            for name in _group_names(group, {}):
                _FIXED_NAME_GROUPS[name] = group
    return _FIXED_NAME_GROUPS


def _group_values(
    group: str,
    channel: ChannelRecord,
    analytics: ChannelAnalytics,
    vocabs: Mapping[str, Vocabulary],
    videos: Sequence[VideoRecord],
) -> list[float]:
    if group == "activity_counts":
        return [
            float(channel.view_count),
            float(channel.video_count),
            float(channel.subscriber_count or 0),
            float(channel.post_count),
            float(channel.description_char_count or 0),
            float(len(channel.keywords)),
        ]
    if group == "graph_metrics":
        return [
            float(channel.subscription_count),
            1.0 if channel.hidden_subscribers else 0.0,
            float(channel.links_count),
        ]
    if group == "made_for_kids":
        declared_kids = 1.0 if channel.made_for_kids is True else 0.0
        declared_not = 1.0 if channel.made_for_kids is False else 0.0
        flagged = sum(1 for v in videos if v.made_for_kids)
        removed = [v for v in videos if not v.status.available]
        removed_flagged = sum(1 for v in removed if v.made_for_kids)
        ratio = flagged / len(videos) if videos else 0.0
        removed_ratio = removed_flagged / len(removed) if removed else 0.0
        return [declared_kids, declared_not, ratio, removed_ratio]
    if group == "top_media":
        counts = Counter(platform for platform, _ in channel.linked_platforms)
        vocab = vocabs["media"].items
        other = sum(count for p, count in counts.items() if p not in vocab)
        return [float(counts.get(p, 0)) for p in vocab] + [float(other)]
    if group == "top_keywords":
        counts = Counter(channel.keywords)
        return [float(counts.get(w, 0)) for w in vocabs["keywords"].items]
    if group == "emotions":
        profile = analytics.description_emotions
        return [
            profile.trust,
            profile.surprise,
            profile.sadness,
            profile.joy,
            profile.fear,
            profile.disgust,
            profile.anticipation,
            profile.anger,
        ]
    if group == "top_topics":
        counts = Counter(channel.topic_categories)
        return [float(counts.get(t, 0)) for t in vocabs["topics"].items]
    if group == "emoji_scores":
        desc = analytics.description_emoji.mean_score
        posts = analytics.posts_emoji.mean_score
        return [desc if desc is not None else 0.0, posts if posts is not None else 0.0]
    if group == "top_emojis_description":
        counts = analytics.description_emoji.counts
        return [float(counts.get(e, 0)) for e in vocabs["emojis_description"].items]
    if group == "top_emojis_posts":
        counts = analytics.posts_emoji.counts
        return [float(counts.get(e, 0)) for e in vocabs["emojis_posts"].items]
    if group == "polarity":
        return [
            float(analytics.description_polarity.positive),
            float(analytics.description_polarity.negative),
            float(analytics.keywords_polarity.positive),
            float(analytics.keywords_polarity.negative),
            analytics.posts_mean_positive,
            analytics.posts_mean_negative,
        ]
    raise ValueError(f"unknown group {group!r}")


def extract(
    channel: ChannelRecord,
    analytics: ChannelAnalytics,
    spec: FeatureSpec,
    vocabs: Mapping[str, Vocabulary],
    videos: Sequence[VideoRecord] = (),
    label: Optional[VideoLabel] = None,
) -> FeatureVector:
    """Deterministic feature vector for one channel.

    Missing optional inputs use group-specific neutral encodings: an absent
    subscriber count contributes 0 (the hidden flag carries the information),
    an emoji mean with no scored emojis contributes 0.0, and video ratios
    over an empty denominator contribute 0.0.
    """
    names: list[str] = []
    values: list[float] = []
    for group in spec.effective_groups():
        group_names = _group_names(group, vocabs)
        group_values = _group_values(group, channel, analytics, vocabs, videos)
        for name, value in zip(group_names, group_values):
            if not spec._keep(name):
                continue
            if name in spec.log_transform_fields:
                value = math.log1p(value)
            names.append(name)
            values.append(float(value))
    return FeatureVector(
        channel_id=channel.channel_id,
        values=tuple(values),
        names=tuple(names),
        label=label,
    )


# --------------------------------------------------------------------------
# matrix assembly
# --------------------------------------------------------------------------


@dataclass
class FeatureMatrix:
    """Stacked feature vectors: one row per channel, one column per feature."""

    names: list[str]
    channel_ids: list[str]
    values: np.ndarray
    labels: Optional[np.ndarray] = None  # class indices per LABEL_TO_CLASS

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ValueError("matrix shape does not match feature names")
        if self.values.shape[0] != len(self.channel_ids):
            raise ValueError("matrix shape does not match channel ids")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("matrix contains non-finite values")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if len(self.labels) != len(self.channel_ids):
                raise ValueError("labels do not match channel ids")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def select(self, names: Sequence[str]) -> "FeatureMatrix":
        index = {name: i for i, name in enumerate(self.names)}
        missing = [n for n in names if n not in index]
        if missing:
            raise ValueError(f"unknown features: {missing}")
        cols = [index[n] for n in names]
        return FeatureMatrix(
            names=list(names),
            channel_ids=list(self.channel_ids),
            values=self.values[:, cols],
            labels=None if self.labels is None else self.labels.copy(),
        )


def extract_matrix(
    corpus: Corpus,
    spec: FeatureSpec,
    vocabs: Optional[Mapping[str, Vocabulary]] = None,
    channel_labels: Optional[Mapping[str, object]] = None,
    analytics_by_id: Optional[Mapping[str, ChannelAnalytics]] = None,
) -> FeatureMatrix:
    """Extract every channel of ``corpus`` into one matrix.

    Vocabularies are built from the same corpus when not supplied; within
    cross-validation, callers must pass vocabularies built on the training
    folds only.  ``channel_labels`` maps channel_id to its class label, as
    either a VideoLabel or a propagated ChannelLabel.
    """
    channels = list(corpus.channels)
    if vocabs is None:
        vocabs = build_vocabularies(channels)
    videos_by_channel: dict[str, list[VideoRecord]] = {}
    for video in corpus.videos:
        videos_by_channel.setdefault(video.channel_id, []).append(video)
    rows = []
    labels: list[int] = []
    ids = []
    names: Optional[list[str]] = None
    for channel in channels:
        analytics = (
            analytics_by_id[channel.channel_id]
            if analytics_by_id is not None
            else analyze_channel(channel)
        )
        vector = extract(
            channel,
            analytics,
            spec,
            vocabs,
            videos=videos_by_channel.get(channel.channel_id, ()),
        )
        if names is None:
            names = list(vector.names)
        rows.append(vector.values)
        ids.append(channel.channel_id)
        if channel_labels is not None:
            label = channel_labels.get(channel.channel_id)
            if isinstance(label, ChannelLabel):
                label = label.value
            if not isinstance(label, VideoLabel):
                raise ValueError(f"no label for channel {channel.channel_id!r}")
            labels.append(LABEL_TO_CLASS[label])
    if names is None:
        raise ValueError("corpus has no channels")
    return FeatureMatrix(
        names=names,
        channel_ids=ids,
        values=np.array(rows, dtype=float),
        labels=np.array(labels, dtype=int) if channel_labels is not None else None,
    )


# --------------------------------------------------------------------------
# preprocessing
# --------------------------------------------------------------------------


@dataclass
class PreprocessReport:
    """What preprocessing did, recorded for inference-time reuse."""

    kept: list[str]
    dropped: list[str]
    variances: dict[str, float]
    variance_floor: float

    def to_json_dict(self) -> dict:
        return {
            "kept": self.kept,
            "dropped": self.dropped,
            "variances": self.variances,
            "variance_floor": self.variance_floor,
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "PreprocessReport":
        return cls(
            kept=list(payload["kept"]),
            dropped=list(payload["dropped"]),
            variances={k: float(v) for k, v in payload["variances"].items()},
            variance_floor=float(payload["variance_floor"]),
        )


def preprocess(
    matrix: FeatureMatrix, variance_floor: Optional[float] = None
) -> tuple[FeatureMatrix, PreprocessReport]:
    """Drop features whose variance falls below the floor.

    Returns the filtered matrix plus a report naming every dropped feature,
    so the same column selection can be replayed at inference time.
    """
    if variance_floor is None:
        variance_floor = FeatureSpec().variance_floor
    variances = matrix.values.var(axis=0)
    kept = [n for n, v in zip(matrix.names, variances) if v >= variance_floor]
    dropped = [n for n in matrix.names if n not in kept]
    if not kept:
        raise ValueError("preprocessing dropped every feature")
    report = PreprocessReport(
        kept=kept,
        dropped=dropped,
        variances={n: float(v) for n, v in zip(matrix.names, variances)},
        variance_floor=float(variance_floor),
    )
    return matrix.select(kept), report


# --------------------------------------------------------------------------
# persistence: matrix CSV + JSON sidecar
# --------------------------------------------------------------------------


def write_matrix_csv(matrix: FeatureMatrix, path) -> None:
    """Matrix as UTF-8 CSV: channel_id, label (empty if absent), features."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["channel_id", "label", *matrix.names])
        for i, channel_id in enumerate(matrix.channel_ids):
            label = "" if matrix.labels is None else str(int(matrix.labels[i]))
            writer.writerow(
                [channel_id, label, *(repr(float(v)) for v in matrix.values[i])]
            )


def read_matrix_csv(path) -> FeatureMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["channel_id", "label"]:
            raise ValueError("matrix CSV must start with channel_id,label columns")
        names = header[2:]
        ids, labels, rows = [], [], []
        has_labels = True
        for row in reader:
            ids.append(row[0])
            if row[1] == "":
                has_labels = False
            else:
                labels.append(int(row[1]))
            rows.append([float(v) for v in row[2:]])
    return FeatureMatrix(
        names=names,
        channel_ids=ids,
        values=np.array(rows, dtype=float) if rows else np.empty((0, len(names))),
        labels=np.array(labels, dtype=int) if has_labels and labels else None,
    )


def write_sidecar(
    path,
    spec: FeatureSpec,
    vocabs: Mapping[str, Vocabulary],
    report: Optional[PreprocessReport] = None,
) -> None:
    """JSON sidecar carrying the FeatureSpec, vocabularies, and preprocessing."""
    payload = {
        "feature_spec": spec.to_json_dict(),
        "vocabularies": {name: list(v.items) for name, v in vocabs.items()},
        "preprocess": report.to_json_dict() if report is not None else None,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2)


def read_sidecar(path) -> tuple[FeatureSpec, dict[str, Vocabulary], Optional[PreprocessReport]]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    spec = FeatureSpec.from_json_dict(payload["feature_spec"])
    vocabs = {
        name: Vocabulary(name, tuple(items))
        for name, items in payload["vocabularies"].items()
    }
    report = (
        PreprocessReport.from_json_dict(payload["preprocess"])
        if payload.get("preprocess") is not None
        else None
    )
    return spec, vocabs, report
