"""Channel collection: fixture/HTTP clients, page-status parsing, and a
politeness-enforcing crawler with its mock endpoint.
"""

from .client import (
    ChannelNotFound,
    CollectorError,
    FixtureClient,
    HttpClient,
    TransportError,
    channel_from_api,
    fetch_channel,
    fetch_posts,
    posts_from_api,
)
from .crawl import CrawlResult, RateLimiter, crawl, http_crawl
from .mockserver import MockChannelServer
from .policy import FetchPolicy, RawPage
from .status import parse_status, status_patterns

__all__ = [
    "FetchPolicy",
    "RawPage",
    "CollectorError",
    "TransportError",
    "ChannelNotFound",
    "FixtureClient",
    "HttpClient",
    "channel_from_api",
    "posts_from_api",
    "fetch_channel",
    "fetch_posts",
    "parse_status",
    "status_patterns",
    "RateLimiter",
    "CrawlResult",
    "crawl",
    "http_crawl",
    "MockChannelServer",
]
