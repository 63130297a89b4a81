"""Politeness policy and raw page types for the collector."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

__all__ = ["FetchPolicy", "RawPage"]

# URL path shapes the collector deals in: channel pages, watch pages, and
# the JSON API mirror of a channel.
_URL_MARKERS = ("/channel/", "/watch", "/api/channels/")


@dataclass(frozen=True)
class FetchPolicy:
    """How politely to talk to an endpoint.

    ``min_inter_request_delay`` spaces out consecutive requests globally;
    ``page_settle_delay`` is the extra wait after an HTML page fetch so the
    page can fully load before the next request; ``max_concurrent_requests``
    bounds in-flight requests.
    """

    max_concurrent_requests: int = 1
    min_inter_request_delay: float = 1.0
    page_settle_delay: float = 2.0
    retries: int = 2

    def __post_init__(self) -> None:
        if self.max_concurrent_requests < 1:
            raise ValueError("max_concurrent_requests must be >= 1")
        if self.min_inter_request_delay <= 0 or self.page_settle_delay <= 0:
            raise ValueError("delays must be > 0")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")


@dataclass(frozen=True)
class RawPage:
    """One fetched page body with its source URL and fetch time."""

    url: str
    body: str
    fetched_at: float = field(default_factory=time.time)

    def __post_init__(self) -> None:
        if not any(marker in self.url for marker in _URL_MARKERS):
            raise ValueError(
                f"url {self.url!r} is not a channel, watch, or channel-API url"
            )
