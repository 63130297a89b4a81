"""Text analytics over channel descriptions, keywords, and posts.

Three independent signal families:

* polarity  -- dual-scale lexicon scorer (positive 1..5, negative -5..-1)
  with booster/diminisher/negation handling, collapsed to a single
  ``combined`` integer in [-4, 4];
* emotions  -- eight-emotion categorization (trust, surprise, sadness,
  joy, fear, disgust, anticipation, anger) behind a provider interface,
  with an offline word-emotion lexicon as the default provider;
* emoji     -- grapheme-aware emoji extraction plus sentiment scoring
  against a bundled emoji sentiment ranking table.

All scorers are pure functions of their inputs; lexicons are read-only
shared data, so everything here is safe for parallel use.
"""

from __future__ import annotations

import csv
import json
import re
import urllib.request
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional, Protocol

from .corpus import ChannelRecord

__all__ = [
    "EMOTIONS",
    "PolarityScore",
    "PolarityLexicon",
    "polarity",
    "EmotionProfile",
    "EmotionProvider",
    "EmotionProviderError",
    "LexiconEmotionProvider",
    "HttpEmotionProvider",
    "emotions",
    "EmojiStats",
    "EmojiSentimentTable",
    "extract_emojis",
    "emoji_stats",
    "top_emojis",
    "ChannelAnalytics",
    "analyze_channel",
    "tokenize",
]


def _data_path(name: str):
    return resources.files("channel_audit").joinpath("data", name)


def _read_csv_rows(name: str) -> list[dict[str, str]]:
    with _data_path(name).open(encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# --------------------------------------------------------------------------
# tokenization
# --------------------------------------------------------------------------

_WORD_RE = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*")


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; internal apostrophes removed ("don't" -> "dont")."""
    return [
        tok.replace("'", "").replace("’", "")
        for tok in _WORD_RE.findall(text.lower())
    ]


# --------------------------------------------------------------------------
# polarity
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PolarityScore:
    """Dual-scale sentiment: strongest positive and strongest negative evidence.

    ``positive`` is in [1, 5] (1 = no positive evidence), ``negative`` in
    [-5, -1] (-1 = no negative evidence).  ``combined`` collapses both to a
    single integer in [-4, 4]; neutral text scores (1, -1, 0).
    """

    positive: int = 1
    negative: int = -1

    def __post_init__(self) -> None:
        if not 1 <= self.positive <= 5:
            raise ValueError(f"positive scale out of range: {self.positive}")
        if not -5 <= self.negative <= -1:
            raise ValueError(f"negative scale out of range: {self.negative}")

    @property
    def combined(self) -> int:
        return self.positive + self.negative


class PolarityLexicon:
    """Token strength lexicon plus booster/diminisher/negator word lists.

    Token strengths are integers with |strength| in [2, 5]; the unit band is
    reserved for the neutral baseline.  Boosters raise the magnitude of the
    following sentiment token by one (cap 5), diminishers lower it by one,
    and a negator within the three preceding tokens flips the sign while
    shaving one off the magnitude, so "not good" reads as mildly negative
    rather than as the mirror image of "good".
    """

    BOOST_WINDOW = 2
    NEGATION_WINDOW = 3

    def __init__(
        self,
        tokens: dict[str, int],
        boosters: Iterable[str] = (),
        diminishers: Iterable[str] = (),
        negators: Iterable[str] = (),
    ) -> None:
        for tok, strength in tokens.items():
            if not 2 <= abs(strength) <= 5:
                raise ValueError(f"lexicon strength out of range for {tok!r}: {strength}")
        self.tokens = dict(tokens)
        self.boosters = frozenset(boosters)
        self.diminishers = frozenset(diminishers)
        self.negators = frozenset(negators)

    @classmethod
    def load(cls) -> "PolarityLexicon":
        tokens = {
            row["token"]: int(row["strength"])
            for row in _read_csv_rows("polarity_lexicon.csv")
        }
        kinds: dict[str, set[str]] = {"booster": set(), "diminisher": set(), "negator": set()}
        for row in _read_csv_rows("polarity_modifiers.csv"):
            kinds[row["kind"]].add(row["token"])
        return cls(tokens, kinds["booster"], kinds["diminisher"], kinds["negator"])

    def score(self, text: str) -> PolarityScore:
        tokens = tokenize(text)
        positive, negative = 1, -1
        for i, tok in enumerate(tokens):
            base = self.tokens.get(tok)
            if base is None:
                continue
            magnitude = abs(base)
            for j in range(i - 1, max(-1, i - 1 - self.BOOST_WINDOW), -1):
                if tokens[j] in self.boosters:
                    magnitude += 1
                elif tokens[j] in self.diminishers:
                    magnitude -= 1
            sign = 1 if base > 0 else -1
            if any(
                tokens[j] in self.negators
                for j in range(max(0, i - self.NEGATION_WINDOW), i)
            ):
                sign, magnitude = -sign, magnitude - 1
            magnitude = min(5, magnitude)
            if magnitude < 2:
                continue  # boosted/negated down to the neutral band
            if sign > 0:
                positive = max(positive, magnitude)
            else:
                negative = min(negative, -magnitude)
        return PolarityScore(positive, negative)


@lru_cache(maxsize=1)
def default_polarity_lexicon() -> PolarityLexicon:
    return PolarityLexicon.load()


def polarity(text: str, lexicon: Optional[PolarityLexicon] = None) -> PolarityScore:
    """Score ``text`` on the dual positive/negative scale. Empty text -> (1, -1)."""
    return (lexicon or default_polarity_lexicon()).score(text)


# --------------------------------------------------------------------------
# emotions
# --------------------------------------------------------------------------

EMOTIONS = (
    "trust",
    "surprise",
    "sadness",
    "joy",
    "fear",
    "disgust",
    "anticipation",
    "anger",
)


@dataclass(frozen=True)
class EmotionProfile:
    """Share of each of the eight prime emotions detected in a text."""

    trust: float = 0.0
    surprise: float = 0.0
    sadness: float = 0.0
    joy: float = 0.0
    fear: float = 0.0
    disgust: float = 0.0
    anticipation: float = 0.0
    anger: float = 0.0

    def __post_init__(self) -> None:
        for name in EMOTIONS:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} share out of [0, 1]: {value}")

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in EMOTIONS}


class EmotionProviderError(Exception):
    """Raised when an emotion provider fails (distinct from 'nothing detected')."""


class EmotionProvider(Protocol):
    def emotions(self, text: str) -> EmotionProfile:  # pragma: no cover - protocol
        ...


class LexiconEmotionProvider:
    """Offline provider: per-emotion fraction of matched word-emotion tokens.

    Each lexicon word maps to exactly one emotion, so the profile components
    sum to 1 whenever at least one token matches, and to 0 otherwise.
    """

    def __init__(self, lexicon: dict[str, str]) -> None:
        unknown = set(lexicon.values()) - set(EMOTIONS)
        if unknown:
            raise ValueError(f"unknown emotions in lexicon: {sorted(unknown)}")
        self.lexicon = dict(lexicon)

    @classmethod
    def load(cls) -> "LexiconEmotionProvider":
        return cls(
            {row["token"]: row["emotion"] for row in _read_csv_rows("emotion_lexicon.csv")}
        )

    def emotions(self, text: str) -> EmotionProfile:
        matched = [self.lexicon[tok] for tok in tokenize(text) if tok in self.lexicon]
        if not matched:
            return EmotionProfile()
        counts = Counter(matched)
        total = len(matched)
        return EmotionProfile(**{name: counts.get(name, 0) / total for name in EMOTIONS})


class HttpEmotionProvider:
    """Adapter for an external emotion-categorization HTTP service.

    POSTs ``{"text": ...}`` and expects a JSON object with one numeric field
    per emotion name.  Any transport or payload problem raises
    :class:`EmotionProviderError` so callers can tell failure apart from an
    all-zero profile.
    """

    def __init__(self, url: str, timeout: float = 10.0) -> None:
        self.url = url
        self.timeout = timeout

    def emotions(self, text: str) -> EmotionProfile:
        request = urllib.request.Request(
            self.url,
            data=json.dumps({"text": text}).encode("utf-8"),
            headers={"Content-Type": "application/json"},
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                payload = json.load(response)
            return EmotionProfile(**{name: float(payload[name]) for name in EMOTIONS})
        except EmotionProviderError:
            raise
        except Exception as exc:
            raise EmotionProviderError(f"emotion service failed: {exc}") from exc


@lru_cache(maxsize=1)
def default_emotion_provider() -> LexiconEmotionProvider:
    return LexiconEmotionProvider.load()


def emotions(text: str, provider: Optional[EmotionProvider] = None) -> EmotionProfile:
    """Eight-emotion profile of ``text`` using ``provider`` (offline lexicon default)."""
    return (provider or default_emotion_provider()).emotions(text)


# --------------------------------------------------------------------------
# emoji extraction and sentiment
# --------------------------------------------------------------------------

_ZWJ = "‍"
_VS15 = "︎"
_VS16 = "️"
_KEYCAP = "⃣"
_KEYCAP_BASES = set("0123456789#*")

_EMOJI_RANGES = (
    (0x1F300, 0x1F64F),  # pictographs, emoticons (includes skin-tone modifiers)
    (0x1F680, 0x1F6FF),  # transport & map symbols
    (0x1F900, 0x1F9FF),  # supplemental symbols & pictographs
    (0x1FA70, 0x1FAFF),  # symbols & pictographs extended-A
    (0x1F0A0, 0x1F0FF),  # playing cards
    (0x1F170, 0x1F251),  # enclosed alphanumerics & ideographs, regional indicators
    (0x2600, 0x27BF),    # miscellaneous symbols, dingbats
    (0x2B00, 0x2BFF),    # arrows, stars, geometric
    (0x2300, 0x23FF),    # miscellaneous technical (watch, hourglass, ...)
    (0x25A0, 0x25FF),    # geometric shapes
)
_EMOJI_SINGLES = frozenset(
    {0x00A9, 0x00AE, 0x2122, 0x203C, 0x2049, 0x2139, 0x24C2, 0x3030, 0x303D, 0x3297, 0x3299, 0x1F004}
)
_SKIN_TONES = (0x1F3FB, 0x1F3FF)
_REGIONAL = (0x1F1E6, 0x1F1FF)


def _is_emoji_base(cp: int) -> bool:
    if cp in _EMOJI_SINGLES:
        return True
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


def _is_modifier(ch: str) -> bool:
    return ch in (_VS15, _VS16) or _SKIN_TONES[0] <= ord(ch) <= _SKIN_TONES[1]


def _consume_modifiers(text: str, j: int) -> int:
    while j < len(text) and _is_modifier(text[j]):
        j += 1
    return j


def _normalize_cluster(cluster: str) -> str:
    """Strip variation selectors so styled and plain forms count together."""
    return cluster.replace(_VS16, "").replace(_VS15, "")


def extract_emojis(text: str) -> list[str]:
    """All emoji occurrences in ``text``, in order, as normalized grapheme clusters.

    Handles variation selectors, skin-tone modifiers, zero-width-joiner
    sequences, keycaps, and regional-indicator flag pairs without touching
    surrounding non-emoji text.
    """
    found: list[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        cp = ord(ch)
        if ch in _KEYCAP_BASES:
            j = i + 1
            if j < n and text[j] == _VS16:
                j += 1
            if j < n and text[j] == _KEYCAP:
                found.append(_normalize_cluster(text[i : j + 1]))
                i = j + 1
                continue
            i += 1
            continue
        if not _is_emoji_base(cp):
            i += 1
            continue
        j = i + 1
        if _REGIONAL[0] <= cp <= _REGIONAL[1] and j < n and _REGIONAL[0] <= ord(text[j]) <= _REGIONAL[1]:
            j += 1  # two regional indicators form one flag
        else:
            j = _consume_modifiers(text, j)
            while (
                j + 1 < n
                and text[j] == _ZWJ
                and _is_emoji_base(ord(text[j + 1]))
            ):
                j = _consume_modifiers(text, j + 2)
        found.append(_normalize_cluster(text[i:j]))
        i = j
    return found


class EmojiSentimentTable:
    """Emoji -> sentiment score in [-1, 1], keyed by normalized codepoint sequence."""

    def __init__(self, scores: dict[str, float]) -> None:
        for emo, score in scores.items():
            if not -1.0 <= score <= 1.0:
                raise ValueError(f"score out of [-1, 1] for {emo!r}: {score}")
        self._scores = {_normalize_cluster(emo): score for emo, score in scores.items()}

    @classmethod
    def load(cls) -> "EmojiSentimentTable":
        scores = {}
        for row in _read_csv_rows("emoji_sentiment.csv"):
            emoji = "".join(chr(int(cp, 16)) for cp in row["codepoints"].split())
            scores[emoji] = float(row["score"])
        return cls(scores)

    def score(self, emoji: str) -> Optional[float]:
        return self._scores.get(_normalize_cluster(emoji))

    def __contains__(self, emoji: str) -> bool:
        return self.score(emoji) is not None

    def __len__(self) -> int:
        return len(self._scores)


@lru_cache(maxsize=1)
def default_emoji_table() -> EmojiSentimentTable:
    return EmojiSentimentTable.load()


@dataclass
class EmojiStats:
    """Emoji usage summary for one text: counts, scored mean, unscored set."""

    counts: dict[str, int] = field(default_factory=dict)
    mean_score: Optional[float] = None
    unscored: set[str] = field(default_factory=set)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def emoji_stats(text: str, table: Optional[EmojiSentimentTable] = None) -> EmojiStats:
    """Count emojis in ``text``; mean_score is the count-weighted mean over scored ones.

    Emojis without a ranking entry are excluded from the mean and reported in
    ``unscored``; mean_score is None when no scored emoji occurs.
    """
    table = table or default_emoji_table()
    counts = Counter(extract_emojis(text))
    weighted = 0.0
    weight = 0
    unscored: set[str] = set()
    for emoji, count in counts.items():
        score = table.score(emoji)
        if score is None:
            unscored.add(emoji)
        else:
            weighted += score * count
            weight += count
    mean = weighted / weight if weight else None
    return EmojiStats(dict(counts), mean, unscored)


def top_emojis(
    channels: Iterable[ChannelRecord],
    field_name: str = "description",
    k: int = 10,
    table: Optional[EmojiSentimentTable] = None,
) -> list[tuple[str, int, Optional[float]]]:
    """Top-``k`` emojis over a corpus slice as (emoji, count, score) triples.

    ``field_name`` selects the text source: channel descriptions or community
    post descriptions.  Ordered by descending count, ties by codepoint order;
    score is None for emojis absent from the ranking table.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if field_name not in ("description", "posts"):
        raise ValueError(f"unknown field {field_name!r}")
    table = table or default_emoji_table()
    counts: Counter[str] = Counter()
    for channel in channels:
        if field_name == "description":
            counts.update(extract_emojis(channel.description))
        else:
            for post in channel.posts:
                counts.update(extract_emojis(post.description))
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [(emoji, count, table.score(emoji)) for emoji, count in ranked[:k]]


# --------------------------------------------------------------------------
# per-channel aggregation
# --------------------------------------------------------------------------


@dataclass
class ChannelAnalytics:
    """All text-derived signals for one channel, ready for feature extraction."""

    channel_id: str
    description_polarity: PolarityScore
    keywords_polarity: PolarityScore
    posts_mean_positive: float
    posts_mean_negative: float
    description_emotions: EmotionProfile
    description_emoji: EmojiStats
    posts_emoji: EmojiStats

    def to_json_dict(self) -> dict:
        def _polarity(score: PolarityScore) -> dict:
            return {
                "positive": score.positive,
                "negative": score.negative,
                "combined": score.combined,
            }

        def _emoji(stats: EmojiStats) -> dict:
            return {"total": stats.total, "mean_score": stats.mean_score}

        return {
            "channel_id": self.channel_id,
            "description_polarity": _polarity(self.description_polarity),
            "keywords_polarity": _polarity(self.keywords_polarity),
            "posts_mean_positive": self.posts_mean_positive,
            "posts_mean_negative": self.posts_mean_negative,
            "description_emotions": self.description_emotions.as_dict(),
            "description_emoji": _emoji(self.description_emoji),
            "posts_emoji": _emoji(self.posts_emoji),
        }


def analyze_channel(
    channel: ChannelRecord,
    lexicon: Optional[PolarityLexicon] = None,
    provider: Optional[EmotionProvider] = None,
    table: Optional[EmojiSentimentTable] = None,
) -> ChannelAnalytics:
    """Run every text scorer over one channel's description, keywords, and posts.

    Post polarity is averaged per channel over individual posts; a channel
    with no posts gets the neutral (1.0, -1.0) baseline.
    """
    lexicon = lexicon or default_polarity_lexicon()
    provider = provider or default_emotion_provider()
    table = table or default_emoji_table()

    post_scores = [lexicon.score(post.description) for post in channel.posts]
    if post_scores:
        mean_pos = sum(s.positive for s in post_scores) / len(post_scores)
        mean_neg = sum(s.negative for s in post_scores) / len(post_scores)
    else:
        mean_pos, mean_neg = 1.0, -1.0

    posts_text = "\n".join(post.description for post in channel.posts)
    return ChannelAnalytics(
        channel_id=channel.channel_id,
        description_polarity=lexicon.score(channel.description),
        keywords_polarity=lexicon.score(" ".join(channel.keywords)),
        posts_mean_positive=mean_pos,
        posts_mean_negative=mean_neg,
        description_emotions=provider.emotions(channel.description),
        description_emoji=emoji_stats(channel.description, table),
        posts_emoji=emoji_stats(posts_text, table),
    )
