"""Synthetic channel corpus generator for end-to-end pipeline validation.

The generator builds a labeled corpus whose class signal is planted in
known places, so the full pipeline (ingest -> features -> classifier) can
be tested against a ground truth with a quantifiable ceiling.

Signal placement
----------------
Two modes, selected by ``signal``:

``"all"`` (default)
    Disturbing channels differ from suitable ones in
    * activity counts: view_count and video_count are drawn from a
      log-normal with a +1.0 shift in log-space,
    * keywords: disturbing channels favor a bait-keyword pool
      ("pranks", "superheroes", ...) while suitable channels favor a
      learning pool, on top of shared common keywords,
    * description polarity: disturbing descriptions mix in strongly
      negative lexicon words ("creepy", "violent", ...), suitable ones
      strongly positive words ("wonderful", "cute", ...),
    * topics: mild preference differences over shared topic categories.

``"creation_time_only"``
    Activity statistics (all counts, posts) are drawn from the same
    distributions for both classes; the only separating signal lives in
    fields that exist the moment a channel is created: keywords,
    description text (polarity/emotion), and topic categories.  A
    creation-time model must therefore match a full model on this corpus.

Unsignaled fields (posts, emoji usage, madeForKids, linked platforms,
country) are drawn from the same distributions for both classes in both
modes.  Every channel gets one to three ground-truth videos; disturbing
channels get at least one disturbing video so label propagation
reproduces the channel class exactly.

Determinism: one ``numpy`` Generator seeded by ``seed`` drives every
draw; the same (n_channels, seed, signal) triple always yields the same
corpus.
"""

from __future__ import annotations

from datetime import date, timedelta
from typing import Optional

import numpy as np

from .corpus import (
    ChannelRecord,
    Corpus,
    PostRecord,
    StatusReason,
    StatusReport,
    VideoLabel,
    VideoRecord,
)

__all__ = ["SIGNAL_MODES", "generate_corpus"]

SIGNAL_MODES = ("all", "creation_time_only")

# Pools below are verified against the bundled lexicons: polarity words
# carry the intended sign, emojis have sentiment scores.
_POSITIVE_WORDS = (
    "wonderful", "fun", "great", "nice", "happy", "amazing",
    "lovely", "sweet", "cute", "joyful", "delightful", "charming",
)
_NEGATIVE_WORDS = (
    "scary", "creepy", "horrible", "terrifying", "disturbing", "gross",
    "evil", "violent", "nasty", "frightening", "sinister", "cruel",
)
_FILLER_WORDS = (
    "video", "channel", "episode", "watch", "series", "new", "official",
    "daily", "compilation", "colors", "learn", "family", "show", "best",
)
_COMMON_KEYWORDS = ("videos", "funny", "cartoon", "animation", "songs", "games")
_BAIT_KEYWORDS = ("pranks", "superheroes", "challenges", "surprise")
_CALM_KEYWORDS = ("nursery", "learning")
_TOPICS = (
    "Entertainment", "Film & Animation", "Gaming", "Music",
    "Education", "Comedy", "Lifestyle", "Hobby",
)
_PLATFORMS = ("twitter", "instagram", "facebook", "patreon", "tiktok", "discord")
_EMOJIS = ("❤", "😍", "😂", "🎉", "👍", "🔥", "😊", "🎵")
_COUNTRIES = ("US", "GB", "CA", "BR", "IN", "DE", None)


def _description(rng: np.random.Generator, disturbing: bool, with_signal: bool) -> str:
    words = list(rng.choice(_FILLER_WORDS, size=rng.integers(6, 14)))
    if with_signal and rng.random() < 0.8:
        pool = _NEGATIVE_WORDS if disturbing else _POSITIVE_WORDS
        words.extend(rng.choice(pool, size=rng.integers(2, 5)))
    rng.shuffle(words)
    if rng.random() < 0.5:
        words.append(str(rng.choice(_EMOJIS)))
    return " ".join(words)


def _keywords(rng: np.random.Generator, disturbing: bool, with_signal: bool) -> list[str]:
    chosen = [k for k in _COMMON_KEYWORDS if rng.random() < 0.4]
    if with_signal:
        bait_p, calm_p = (0.65, 0.05) if disturbing else (0.10, 0.50)
    else:
        bait_p = calm_p = 0.3
    chosen.extend(k for k in _BAIT_KEYWORDS if rng.random() < bait_p)
    chosen.extend(k for k in _CALM_KEYWORDS if rng.random() < calm_p)
    return chosen


def _topics(rng: np.random.Generator, disturbing: bool, with_signal: bool) -> list[str]:
    if with_signal:
        weights = (
            np.array([2, 4, 3, 1, 0.5, 2, 1, 1], dtype=float)
            if disturbing
            else np.array([2, 1, 1, 3, 4, 2, 1.5, 1.5], dtype=float)
        )
    else:
        weights = np.ones(len(_TOPICS))
    weights = weights / weights.sum()
    count = int(rng.integers(1, 4))
    picks = rng.choice(len(_TOPICS), size=count, replace=False, p=weights)
    return [_TOPICS[i] for i in sorted(picks)]


def _posts(rng: np.random.Generator, post_count: int) -> list[PostRecord]:
    posts = []
    for _ in range(min(post_count, 3)):
        text = " ".join(rng.choice(_FILLER_WORDS, size=rng.integers(3, 8)))
        if rng.random() < 0.4:
            text += " " + str(rng.choice(_EMOJIS))
        posts.append(
            PostRecord(
                date_published=date(2021, 1, 1) + timedelta(days=int(rng.integers(0, 365))),
                description=text,
                like_count=int(rng.integers(0, 500)),
            )
        )
    return posts


def generate_corpus(
    n_channels: int = 1400,
    seed: int = 0,
    signal: str = "all",
    disturbing_fraction: float = 0.42,
) -> Corpus:
    """Deterministic labeled corpus with planted class signal (see module doc)."""
    if signal not in SIGNAL_MODES:
        raise ValueError(f"signal must be one of {SIGNAL_MODES}")
    if n_channels < 2:
        raise ValueError("need at least 2 channels")
    if not 0.0 < disturbing_fraction < 1.0:
        raise ValueError("disturbing_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    activity_signal = signal == "all"

    channels: list[ChannelRecord] = []
    videos: list[VideoRecord] = []
    for i in range(n_channels):
        disturbing = bool(rng.random() < disturbing_fraction)
        shift = 1.0 if (activity_signal and disturbing) else 0.0
        view_count = int(np.expm1(rng.normal(10.0 + shift, 1.5)))
        video_count = max(1, int(np.expm1(rng.normal(3.5 + 0.7 * shift, 1.0))))
        hidden = bool(rng.random() < 0.08)
        subscriber_count = (
            None if hidden else int(np.expm1(rng.normal(7.0 + 0.5 * shift, 1.8)))
        )
        post_count = int(rng.integers(0, 6))
        platforms = [
            (p, f"https://{p}.example/u{i}")
            for p in _PLATFORMS
            if rng.random() < 0.25
        ]
        made_for_kids = [True, False, None][int(rng.integers(0, 3))]
        channel = ChannelRecord(
            channel_id=f"synth{i:05d}",
            published_at=date(2015, 1, 1) + timedelta(days=int(rng.integers(0, 2500))),
            country=_COUNTRIES[int(rng.integers(0, len(_COUNTRIES)))],
            description=_description(rng, disturbing, with_signal=True),
            keywords=_keywords(rng, disturbing, with_signal=True),
            topic_categories=_topics(rng, disturbing, with_signal=True),
            made_for_kids=made_for_kids,
            view_count=max(view_count, 0),
            video_count=video_count,
            subscriber_count=subscriber_count,
            subscription_count=int(rng.integers(0, 60)),
            post_count=post_count,
            links_count=len(platforms) + int(rng.integers(0, 3)),
            hidden_subscribers=hidden,
            linked_platforms=platforms,
            email_present=bool(rng.random() < 0.3),
            posts=_posts(rng, post_count),
            status=(
                StatusReport.gone(StatusReason.TERMS_OF_SERVICE)
                if disturbing and rng.random() < 0.08
                else StatusReport.ok()
            ),
        )
        channels.append(channel)

        n_videos = int(rng.integers(1, 4))
        disturbing_slots = set()
        if disturbing:
            n_disturbing = int(rng.integers(1, n_videos + 1))
            disturbing_slots = set(
                rng.choice(n_videos, size=n_disturbing, replace=False).tolist()
            )
        for v in range(n_videos):
            video_disturbing = v in disturbing_slots
            removed = video_disturbing and rng.random() < 0.3
            videos.append(
                VideoRecord(
                    video_id=f"synth{i:05d}v{v}",
                    channel_id=channel.channel_id,
                    label=(
                        VideoLabel.DISTURBING if video_disturbing else VideoLabel.SUITABLE
                    ),
                    made_for_kids=bool(rng.random() < 0.4),
                    status=(
                        StatusReport.gone(StatusReason.SPAM_DECEPTIVE)
                        if removed
                        else StatusReport.ok()
                    ),
                )
            )
    return Corpus(channels, videos)
