"""Channel/video/post data model, JSONL persistence and label propagation.

The canonical on-disk format is JSONL: one channel object per line with its
videos and community posts embedded.  A read-only CSV bundle loader exists for
interop with flat exports (see docs/corpus-schema.md).
"""

import csv
import json
import logging
import re
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_WHITESPACE = re.compile(r"\s")


class CorpusError(Exception):
    """Raised when a corpus file cannot be parsed or validated."""


class DanglingReferenceError(CorpusError):
    """A video references a channel that is not present in the corpus."""


class VideoLabel(str, Enum):
    SUITABLE = "suitable"
    DISTURBING = "disturbing"
    RESTRICTED = "restricted"
    IRRELEVANT = "irrelevant"


#: Video labels that participate in channel labeling; restricted/irrelevant
#: videos are kept in the corpus but never drive a channel label.
GROUND_TRUTH_LABELS = (VideoLabel.SUITABLE, VideoLabel.DISTURBING)


class StatusReason(str, Enum):
    AVAILABLE = "available"
    PRIVATE = "private"
    ACCOUNT_TERMINATED = "account_terminated"
    TERMS_OF_SERVICE = "terms_of_service"
    COPYRIGHT = "copyright"
    SPAM_DECEPTIVE = "spam_deceptive"
    CHANNEL_ABSENT = "channel_absent"
    OTHER_UNAVAILABLE = "other_unavailable"


@dataclass(frozen=True)
class StatusReport:
    available: bool
    reason: StatusReason = StatusReason.AVAILABLE
    raw_message: Optional[str] = None

    def __post_init__(self):
        if self.available != (self.reason == StatusReason.AVAILABLE):
            raise CorpusError(
                f"status availability {self.available!r} inconsistent with "
                f"reason {self.reason.value!r}"
            )

    @classmethod
    def ok(cls) -> "StatusReport":
        return cls(available=True)

    @classmethod
    def gone(cls, reason: StatusReason, raw_message: Optional[str] = None) -> "StatusReport":
        return cls(available=False, reason=reason, raw_message=raw_message)


@dataclass
class VideoRecord:
    video_id: str
    channel_id: str
    label: VideoLabel
    made_for_kids: Optional[bool] = None
    status: StatusReport = field(default_factory=StatusReport.ok)


@dataclass
class PostRecord:
    date_published: Optional[date] = None
    description: str = ""
    tags: list[str] = field(default_factory=list)
    hashtags: list[str] = field(default_factory=list)
    external_links: list[str] = field(default_factory=list)
    youtube_links: list[str] = field(default_factory=list)
    channel_links: list[str] = field(default_factory=list)
    like_count: int = 0
    thumbnail_video: Optional[str] = None


@dataclass
class ChannelRecord:
    channel_id: str
    published_at: Optional[date] = None
    country: Optional[str] = None
    description: str = ""
    keywords: list[str] = field(default_factory=list)
    topic_categories: list[str] = field(default_factory=list)
    made_for_kids: Optional[bool] = None
    view_count: int = 0
    video_count: int = 0
    subscriber_count: Optional[int] = None
    subscription_count: int = 0
    post_count: int = 0
    links_count: int = 0
    description_char_count: Optional[int] = None
    hidden_subscribers: bool = False
    linked_platforms: list[tuple[str, str]] = field(default_factory=list)
    email_present: bool = False
    posts: list[PostRecord] = field(default_factory=list)
    status: StatusReport = field(default_factory=StatusReport.ok)

    def __post_init__(self):
        if self.description_char_count is None:
            self.description_char_count = description_char_count(self.description)


@dataclass(frozen=True)
class ChannelLabel:
    """Channel-level ground truth propagated from its annotated videos."""

    value: VideoLabel
    disturbing_ratio: float

    def __post_init__(self):
        if not 0.0 <= self.disturbing_ratio <= 1.0:
            raise CorpusError(f"disturbing_ratio {self.disturbing_ratio} outside [0,1]")
        if (self.value == VideoLabel.DISTURBING) != (self.disturbing_ratio > 0):
            raise CorpusError(
                "label is disturbing iff disturbing_ratio > 0 "
                f"(got {self.value.value}, ratio {self.disturbing_ratio})"
            )


def description_char_count(text: str) -> int:
    """Character count of a description with all whitespace removed."""
    return len(_WHITESPACE.sub("", text))


class Corpus:
    """Immutable-after-load container of channels and their videos.

    ``channels`` preserves file order; ``videos`` is the flat list across all
    channels.  Instances are safe for concurrent reads.
    """

    def __init__(self, channels: Iterable[ChannelRecord], videos: Iterable[VideoRecord]):
        self.channels: list[ChannelRecord] = list(channels)
        self.videos: list[VideoRecord] = list(videos)
        self._by_id = {c.channel_id: c for c in self.channels}
        self._validate()

    def _validate(self):
        if len(self._by_id) != len(self.channels):
            seen, dupes = set(), set()
            for c in self.channels:
                (dupes if c.channel_id in seen else seen).add(c.channel_id)
            raise CorpusError(f"duplicate channel ids: {sorted(dupes)}")
        seen_videos = set()
        for v in self.videos:
            if v.video_id in seen_videos:
                raise CorpusError(f"duplicate video id {v.video_id!r}")
            seen_videos.add(v.video_id)
            if v.channel_id not in self._by_id:
                raise DanglingReferenceError(
                    f"video {v.video_id!r} references unknown channel {v.channel_id!r}"
                )
        for c in self.channels:
            _validate_channel(c)

    def __len__(self):
        return len(self.channels)

    def __iter__(self):
        return iter(self.channels)

    def get(self, channel_id: str) -> Optional[ChannelRecord]:
        return self._by_id.get(channel_id)

    def __contains__(self, channel_id: str) -> bool:
        return channel_id in self._by_id

    def videos_of(self, channel_id: str) -> list[VideoRecord]:
        return [v for v in self.videos if v.channel_id == channel_id]


def _validate_channel(c: ChannelRecord):
    for name in ("view_count", "video_count", "subscription_count", "post_count",
                 "links_count", "description_char_count"):
        value = getattr(c, name)
        if value is not None and value < 0:
            raise CorpusError(f"channel {c.channel_id!r}: {name} = {value} < 0")
    expected = description_char_count(c.description)
    if c.description_char_count != expected:
        raise CorpusError(
            f"channel {c.channel_id!r}: description_char_count "
            f"{c.description_char_count} != {expected} (whitespace excluded)"
        )
    if c.hidden_subscribers:
        if c.subscriber_count not in (None, 0):
            raise CorpusError(
                f"channel {c.channel_id!r}: subscriber_count must be absent or 0 "
                "when subscribers are hidden"
            )
    elif c.subscriber_count is not None and c.subscriber_count < 0:
        raise CorpusError(f"channel {c.channel_id!r}: subscriber_count < 0")


# ---------------------------------------------------------------------------
# Label propagation


def propagate_labels(corpus: Corpus) -> dict[str, ChannelLabel]:
    """Propagate video annotations to channel labels.

    A channel is suitable when every ground-truth video it posted is suitable,
    disturbing when it posted at least one disturbing video.  The ratio is
    #disturbing / (#suitable + #disturbing) over that channel's videos.
    Channels with no ground-truth videos are excluded with a warning.
    """
    counts: dict[str, list[int]] = {c.channel_id: [0, 0] for c in corpus.channels}
    for v in corpus.videos:
        if v.label == VideoLabel.SUITABLE:
            counts[v.channel_id][0] += 1
        elif v.label == VideoLabel.DISTURBING:
            counts[v.channel_id][1] += 1

    labels: dict[str, ChannelLabel] = {}
    for channel_id, (n_suitable, n_disturbing) in counts.items():
        total = n_suitable + n_disturbing
        if total == 0:
            log.warning("channel %s has no suitable/disturbing videos; excluded "
                        "from labeling", channel_id)
            continue
        ratio = n_disturbing / total
        value = VideoLabel.DISTURBING if n_disturbing > 0 else VideoLabel.SUITABLE
        labels[channel_id] = ChannelLabel(value=value, disturbing_ratio=ratio)
    return labels


def status_breakdown(corpus: Corpus, label: VideoLabel,
                     level: str = "videos") -> dict[StatusReason, float]:
    """Percentage of each status reason among videos (or channels) of a class.

    ``level="videos"`` tallies videos with the given annotation label;
    ``level="channels"`` tallies channels whose propagated label matches.
    Percentages sum to 100 up to float rounding.
    """
    if level == "videos":
        statuses = [v.status for v in corpus.videos if v.label == label]
    elif level == "channels":
        channel_labels = propagate_labels(corpus)
        statuses = [corpus.get(cid).status for cid, lab in channel_labels.items()
                    if lab.value == label]
    else:
        raise ValueError(f"level must be 'videos' or 'channels', got {level!r}")
    if not statuses:
        raise CorpusError(f"no {level} labeled {label.value!r} in corpus")
    table: dict[StatusReason, float] = {}
    for s in statuses:
        table[s.reason] = table.get(s.reason, 0) + 1
    return {reason: 100.0 * n / len(statuses) for reason, n in table.items()}


# ---------------------------------------------------------------------------
# JSONL serialization

def _status_to_json(s: StatusReport) -> dict:
    out = {"available": s.available, "reason": s.reason.value}
    if s.raw_message is not None:
        out["raw_message"] = s.raw_message
    return out


def _status_from_json(obj: dict) -> StatusReport:
    return StatusReport(
        available=bool(obj.get("available", True)),
        reason=StatusReason(obj.get("reason", "available")),
        raw_message=obj.get("raw_message"),
    )


def _post_to_json(p: PostRecord) -> dict:
    return {
        "date_published": p.date_published.isoformat() if p.date_published else None,
        "description": p.description,
        "tags": p.tags,
        "hashtags": p.hashtags,
        "external_links": p.external_links,
        "youtube_links": p.youtube_links,
        "channel_links": p.channel_links,
        "like_count": p.like_count,
        "thumbnail_video": p.thumbnail_video,
    }


def _post_from_json(obj: dict) -> PostRecord:
    like_count = int(obj.get("like_count", 0))
    if like_count < 0:
        raise CorpusError(f"post like_count = {like_count} < 0")
    return PostRecord(
        date_published=_parse_date(obj.get("date_published")),
        description=obj.get("description", ""),
        tags=list(obj.get("tags", [])),
        hashtags=list(obj.get("hashtags", [])),
        external_links=list(obj.get("external_links", [])),
        youtube_links=list(obj.get("youtube_links", [])),
        channel_links=list(obj.get("channel_links", [])),
        like_count=like_count,
        thumbnail_video=obj.get("thumbnail_video"),
    )


def _video_to_json(v: VideoRecord) -> dict:
    return {
        "video_id": v.video_id,
        "label": v.label.value,
        "made_for_kids": v.made_for_kids,
        "status": _status_to_json(v.status),
    }


def _video_from_json(obj: dict, channel_id: str) -> VideoRecord:
    return VideoRecord(
        video_id=obj["video_id"],
        channel_id=obj.get("channel_id", channel_id),
        label=VideoLabel(obj["label"]),
        made_for_kids=obj.get("made_for_kids"),
        status=_status_from_json(obj.get("status", {})),
    )


def channel_to_json(c: ChannelRecord, videos: Optional[list[VideoRecord]] = None) -> dict:
    return {
        "channel_id": c.channel_id,
        "published_at": c.published_at.isoformat() if c.published_at else None,
        "country": c.country,
        "description": c.description,
        "keywords": c.keywords,
        "topic_categories": c.topic_categories,
        "made_for_kids": c.made_for_kids,
        "view_count": c.view_count,
        "video_count": c.video_count,
        "subscriber_count": c.subscriber_count,
        "subscription_count": c.subscription_count,
        "post_count": c.post_count,
        "links_count": c.links_count,
        "description_char_count": c.description_char_count,
        "hidden_subscribers": c.hidden_subscribers,
        "linked_platforms": [list(pair) for pair in c.linked_platforms],
        "email_present": c.email_present,
        "status": _status_to_json(c.status),
        "posts": [_post_to_json(p) for p in c.posts],
        "videos": [_video_to_json(v) for v in (videos or [])],
    }


def channel_from_json(obj: dict) -> tuple[ChannelRecord, list[VideoRecord]]:
    channel_id = obj["channel_id"]
    for name in ("view_count", "video_count", "subscription_count",
                 "post_count", "links_count"):
        if int(obj.get(name, 0)) < 0:
            raise CorpusError(f"channel {channel_id!r}: {name} = {obj[name]} < 0")
    channel = ChannelRecord(
        channel_id=channel_id,
        published_at=_parse_date(obj.get("published_at")),
        country=obj.get("country"),
        description=obj.get("description", ""),
        keywords=list(obj.get("keywords", [])),
        topic_categories=list(obj.get("topic_categories", [])),
        made_for_kids=obj.get("made_for_kids"),
        view_count=int(obj.get("view_count", 0)),
        video_count=int(obj.get("video_count", 0)),
        subscriber_count=(None if obj.get("subscriber_count") is None
                          else int(obj["subscriber_count"])),
        subscription_count=int(obj.get("subscription_count", 0)),
        post_count=int(obj.get("post_count", 0)),
        links_count=int(obj.get("links_count", 0)),
        description_char_count=obj.get("description_char_count"),
        hidden_subscribers=bool(obj.get("hidden_subscribers", False)),
        linked_platforms=[tuple(pair) for pair in obj.get("linked_platforms", [])],
        email_present=bool(obj.get("email_present", False)),
        posts=[_post_from_json(p) for p in obj.get("posts", [])],
        status=_status_from_json(obj.get("status", {})),
    )
    videos = [_video_from_json(v, channel_id) for v in obj.get("videos", [])]
    return channel, videos


def _parse_date(value) -> Optional[date]:
    if value in (None, ""):
        return None
    return date.fromisoformat(value)


def load_corpus(path, format: str = "jsonl") -> Corpus:
    """Load a corpus from JSONL (canonical) or a CSV bundle directory."""
    path = Path(path)
    if format == "jsonl":
        return _load_jsonl(path)
    if format in ("csv", "csv-bundle"):
        return _load_csv_bundle(path)
    raise ValueError(f"unknown corpus format {format!r}")


def _load_jsonl(path: Path) -> Corpus:
    channels, videos = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if obj.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
                raise CorpusError(
                    f"{path}:{lineno}: schema_version {obj['schema_version']} "
                    f"unsupported (expected {SCHEMA_VERSION})"
                )
            try:
                channel, channel_videos = channel_from_json(obj)
            except (KeyError, ValueError, CorpusError) as exc:
                raise CorpusError(f"{path}:{lineno}: {exc}") from exc
            channels.append(channel)
            videos.extend(channel_videos)
    return Corpus(channels, videos)


def save_corpus(corpus: Corpus, path) -> None:
    """Write canonical JSONL; load(save(c)) reproduces c field-for-field."""
    by_channel: dict[str, list[VideoRecord]] = {c.channel_id: [] for c in corpus.channels}
    for v in corpus.videos:
        by_channel[v.channel_id].append(v)
    with open(path, "w", encoding="utf-8") as fh:
        for c in corpus.channels:
            obj = {"schema_version": SCHEMA_VERSION}
            obj.update(channel_to_json(c, by_channel[c.channel_id]))
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# CSV bundle (read-only interop)

def _load_csv_bundle(path: Path) -> Corpus:
    """Read a directory of channels.csv / videos.csv / posts.csv.

    List-valued cells hold JSON arrays; see docs/corpus-schema.md.
    """
    if not path.is_dir():
        raise CorpusError(f"CSV bundle must be a directory, got {path}")
    channels_file = path / "channels.csv"
    videos_file = path / "videos.csv"
    if not channels_file.exists():
        raise CorpusError(f"missing {channels_file}")

    posts_by_channel: dict[str, list[PostRecord]] = {}
    posts_file = path / "posts.csv"
    if posts_file.exists():
        for lineno, row in _csv_rows(posts_file):
            try:
                post = PostRecord(
                    date_published=_parse_date(row.get("date_published") or None),
                    description=row.get("description", ""),
                    tags=_json_cell(row.get("tags")),
                    hashtags=_json_cell(row.get("hashtags")),
                    external_links=_json_cell(row.get("external_links")),
                    youtube_links=_json_cell(row.get("youtube_links")),
                    channel_links=_json_cell(row.get("channel_links")),
                    like_count=int(row.get("like_count") or 0),
                    thumbnail_video=row.get("thumbnail_video") or None,
                )
            except (ValueError, CorpusError) as exc:
                raise CorpusError(f"{posts_file}:{lineno}: {exc}") from exc
            posts_by_channel.setdefault(row["channel_id"], []).append(post)

    channels = []
    for lineno, row in _csv_rows(channels_file):
        obj = dict(row)
        for name in ("keywords", "topic_categories"):
            obj[name] = _json_cell(row.get(name))
        obj["linked_platforms"] = _json_cell(row.get("linked_platforms"))
        for name in ("view_count", "video_count", "subscription_count",
                     "post_count", "links_count"):
            obj[name] = int(row.get(name) or 0)
        obj["subscriber_count"] = (int(row["subscriber_count"])
                                   if row.get("subscriber_count") else None)
        obj["description_char_count"] = (int(row["description_char_count"])
                                         if row.get("description_char_count") else None)
        obj["hidden_subscribers"] = _csv_bool(row.get("hidden_subscribers"))
        obj["email_present"] = _csv_bool(row.get("email_present"))
        obj["made_for_kids"] = _csv_tristate(row.get("made_for_kids"))
        obj["status"] = {"available": not row.get("status_reason") or
                         row["status_reason"] == "available",
                         "reason": row.get("status_reason") or "available",
                         "raw_message": row.get("status_message") or None}
        obj["posts"] = []
        obj["videos"] = []
        try:
            channel, _ = channel_from_json(obj)
        except (KeyError, ValueError, CorpusError) as exc:
            raise CorpusError(f"{channels_file}:{lineno}: {exc}") from exc
        channel.posts = posts_by_channel.get(channel.channel_id, [])
        channels.append(channel)

    videos = []
    if videos_file.exists():
        for lineno, row in _csv_rows(videos_file):
            try:
                videos.append(VideoRecord(
                    video_id=row["video_id"],
                    channel_id=row["channel_id"],
                    label=VideoLabel(row["label"]),
                    made_for_kids=_csv_tristate(row.get("made_for_kids")),
                    status=_status_from_json({
                        "available": not row.get("status_reason") or
                        row["status_reason"] == "available",
                        "reason": row.get("status_reason") or "available",
                        "raw_message": row.get("status_message") or None,
                    }),
                ))
            except (KeyError, ValueError, CorpusError) as exc:
                raise CorpusError(f"{videos_file}:{lineno}: {exc}") from exc
    return Corpus(channels, videos)


def _csv_rows(path: Path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        # header is line 1
        for lineno, row in enumerate(reader, start=2):
            yield lineno, row


def _json_cell(cell) -> list:
    if not cell:
        return []
    value = json.loads(cell)
    if not isinstance(value, list):
        raise CorpusError(f"expected JSON array cell, got {cell!r}")
    return [tuple(v) if isinstance(v, list) else v for v in value]


def _csv_bool(cell) -> bool:
    return str(cell).strip().lower() in ("1", "true", "yes")


def _csv_tristate(cell) -> Optional[bool]:
    if cell is None or str(cell).strip() == "":
        return None
    return _csv_bool(cell)
