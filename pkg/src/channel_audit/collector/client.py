"""Clients that populate ChannelRecords from fixtures or a local endpoint.

Two client flavors expose the same three calls (channel JSON, channel
page HTML, posts JSON): ``FixtureClient`` reads a fixture directory and
``HttpClient`` talks to an HTTP endpoint — by default only a localhost
one.  Hitting any non-local endpoint requires the explicit
``allow_external`` opt-in (the ``--i-understand-tos`` CLI flag), because
real-site crawling carries terms-of-service obligations that fixtures
and the bundled mock server do not.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Callable, Optional
from urllib.parse import urlsplit

import requests

from ..corpus import ChannelRecord, PostRecord, StatusReport
from .policy import FetchPolicy, RawPage
from .status import parse_status

__all__ = [
    "CollectorError",
    "TransportError",
    "ChannelNotFound",
    "FixtureClient",
    "HttpClient",
    "channel_from_api",
    "posts_from_api",
    "fetch_channel",
    "fetch_posts",
]

_LOCAL_HOSTS = ("localhost", "127.0.0.1", "::1")


class CollectorError(Exception):
    """Base error for collection failures."""


class TransportError(CollectorError):
    """The endpoint could not be reached after the configured retries."""


class ChannelNotFound(CollectorError):
    """No data source knows this channel id."""


def _parse_date(value) -> Optional[date]:
    return date.fromisoformat(value[:10]) if value else None


def channel_from_api(
    payload: dict, posts: Optional[list[PostRecord]] = None,
    status: Optional[StatusReport] = None,
) -> ChannelRecord:
    """Build a partial ChannelRecord from the API JSON shape.

    Optional fields that the source omits stay absent (None), never
    zero-filled; a hidden subscriber count yields subscriber_count None
    with the hidden flag set.
    """
    statistics = payload.get("statistics", {})
    hidden = bool(statistics.get("hiddenSubscriberCount", False))
    subscriber_count = None if hidden else statistics.get("subscriberCount")
    links = payload.get("links", [])
    posts = list(posts or [])
    return ChannelRecord(
        channel_id=payload["id"],
        published_at=_parse_date(payload.get("publishedAt")),
        country=payload.get("country"),
        description=payload.get("description", ""),
        keywords=list(payload.get("keywords", [])),
        topic_categories=list(payload.get("topicCategories", [])),
        made_for_kids=payload.get("madeForKids"),
        view_count=int(statistics.get("viewCount", 0)),
        video_count=int(statistics.get("videoCount", 0)),
        subscriber_count=(
            int(subscriber_count) if subscriber_count is not None else None
        ),
        subscription_count=int(statistics.get("subscriptionCount", 0)),
        post_count=int(statistics.get("postCount", len(posts))),
        links_count=len(links),
        hidden_subscribers=hidden,
        linked_platforms=[(l["platform"], l["url"]) for l in links],
        email_present=bool(payload.get("emailPresent", False)),
        posts=posts,
        status=status if status is not None else StatusReport.ok(),
    )


def posts_from_api(payload: list[dict], limit: int) -> list[PostRecord]:
    """At most ``limit`` newest posts, newest first by published date."""
    records = [
        PostRecord(
            date_published=_parse_date(item.get("publishedAt")),
            description=item.get("text", ""),
            tags=list(item.get("tags", [])),
            hashtags=list(item.get("hashtags", [])),
            external_links=list(item.get("externalLinks", [])),
            youtube_links=list(item.get("youtubeLinks", [])),
            channel_links=list(item.get("channelLinks", [])),
            like_count=int(item.get("likeCount", 0)),
            thumbnail_video=item.get("thumbnailVideo"),
        )
        for item in payload
    ]
    records.sort(key=lambda p: p.date_published or date.min, reverse=True)
    return records[:limit]


@dataclass
class FixtureClient:
    """Reads a fixture directory; no network involved.

    Layout: ``channels/{id}.json`` (API payload), ``pages/{id}.html``
    (pre-rendered page for status parsing), ``posts/{id}.json``.
    """

    root: Path

    def __post_init__(self) -> None:
        self.root = Path(self.root)
        if not self.root.is_dir():
            raise CollectorError(f"fixture directory {self.root} does not exist")

    def get_channel_json(self, channel_id: str) -> Optional[dict]:
        path = self.root / "channels" / f"{channel_id}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def get_page(self, channel_id: str) -> RawPage:
        path = self.root / "pages" / f"{channel_id}.html"
        body = path.read_text(encoding="utf-8") if path.exists() else "404 Not Found"
        return RawPage(url=f"https://www.youtube.com/channel/{channel_id}", body=body)

    def get_posts_json(self, channel_id: str) -> Optional[list]:
        path = self.root / "posts" / f"{channel_id}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))


@dataclass
class HttpClient:
    """Talks to a channel API endpoint, localhost-only unless opted in.

    ``before_request`` is the shared rate-limiter hook: it is invoked
    before every HTTP request, so a crawl can space requests globally.
    """

    endpoint: str
    policy: FetchPolicy = field(default_factory=FetchPolicy)
    allow_external: bool = False
    before_request: Optional[Callable[[], None]] = None
    session: Optional[requests.Session] = None
    timeout: float = 10.0

    def __post_init__(self) -> None:
        self.endpoint = self.endpoint.rstrip("/")
        host = urlsplit(self.endpoint).hostname
        if host not in _LOCAL_HOSTS and not self.allow_external:
            raise CollectorError(
                f"endpoint {self.endpoint!r} is not local; crawling third-party "
                "sites requires the --i-understand-tos flag"
            )
        if self.session is None:
            self.session = requests.Session()

    def _request(self, path: str) -> requests.Response:
        last_error: Optional[Exception] = None
        for attempt in range(self.policy.retries + 1):
            if self.before_request is not None:
                self.before_request()
            try:
                return self.session.get(self.endpoint + path, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                if attempt < self.policy.retries:
                    time.sleep(self.policy.min_inter_request_delay)
        raise TransportError(f"GET {path} failed after retries: {last_error}")

    def get_channel_json(self, channel_id: str) -> Optional[dict]:
        response = self._request(f"/api/channels/{channel_id}")
        if response.status_code == 404:
            return None
        if response.status_code != 200:
            raise TransportError(
                f"channel API returned {response.status_code} for {channel_id}"
            )
        return response.json()

    def get_page(self, channel_id: str) -> RawPage:
        response = self._request(f"/channel/{channel_id}")
        # let the page fully settle before anything else is requested
        time.sleep(self.policy.page_settle_delay)
        return RawPage(
            url=f"{self.endpoint}/channel/{channel_id}", body=response.text
        )

    def get_posts_json(self, channel_id: str) -> Optional[list]:
        response = self._request(f"/api/channels/{channel_id}/posts")
        if response.status_code == 404:
            return None
        if response.status_code != 200:
            raise TransportError(
                f"posts API returned {response.status_code} for {channel_id}"
            )
        return response.json()


def fetch_channel(client, channel_id: str, with_posts: bool = True) -> ChannelRecord:
    """Populate a ChannelRecord from the client's data sources.

    A channel the API does not know falls back to the channel page, whose
    banner text is parsed into an unavailability status.
    """
    payload = client.get_channel_json(channel_id)
    if payload is None:
        page = client.get_page(channel_id)
        status = parse_status(page)
        if status.available:
            # page looks fine but the API has no record: treat as absent
            raise ChannelNotFound(f"channel {channel_id!r} not in any data source")
        return ChannelRecord(channel_id=channel_id, status=status)
    posts = fetch_posts(client, channel_id) if with_posts else []
    return channel_from_api(payload, posts=posts)


def fetch_posts(client, channel_id: str, limit: int = 100) -> list[PostRecord]:
    """At most ``limit`` newest community posts; empty when the tab is absent.

    Channels declared madeForKids have no community tab, which the data
    sources represent by returning nothing for the posts query.
    """
    if limit < 0:
        raise ValueError("limit must be >= 0")
    if limit == 0:
        return []
    payload = client.get_posts_json(channel_id)
    if payload is None:
        return []
    return posts_from_api(payload, limit)
