"""Bounded-concurrency crawl with one shared rate limiter.

The limiter is the single synchronized object: every HTTP request in the
crawl, whichever worker issues it, first reserves the next send slot.
Slots are spaced by the policy's minimum delay plus a small safety
margin, so gaps observed by the server stay above the policy minimum
even under scheduler jitter.  Workers never share mutable records; each
returns its result to the aggregating future.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from ..corpus import ChannelRecord, Corpus
from .client import CollectorError, HttpClient, fetch_channel
from .policy import FetchPolicy

__all__ = ["RateLimiter", "CrawlResult", "crawl"]

# Multiplicative + additive headroom between scheduled sends, so that
# thread wake-up and in-flight latency jitter cannot compress a
# server-observed gap below the policy minimum.  The additive pad must
# exceed realistic per-request latency variance (a request that arrives
# late squeezes the gap to its successor); 10 ms covers scheduler
# hiccups while adding ~1% to a real-world one-second policy.
_SAFETY_FACTOR = 1.05
_SAFETY_PAD = 0.010
# The first requests of a crawl pay one-time costs on their way to the
# server (TCP connects, handler-thread spawns, cold code paths), which
# delays their arrival more than later requests'; without extra spacing
# the arrival gap after a slow first request can compress below the
# policy minimum.  The earliest slots therefore get additional padding.
_WARMUP_SLOTS = 3
_WARMUP_PAD = 0.02


class RateLimiter:
    """Serializes send times: consecutive requests are at least
    ``min_delay * 1.05 + 10ms`` apart, globally across threads, with extra
    padding after each of the first few requests to absorb cold-start
    latency."""

    def __init__(self, min_delay: float):
        if min_delay <= 0:
            raise ValueError("min_delay must be > 0")
        self.min_delay = min_delay
        self._spacing = min_delay * _SAFETY_FACTOR + _SAFETY_PAD
        self._lock = threading.Lock()
        self._next_slot = 0.0
        self._slots_taken = 0

    def wait_for_slot(self) -> None:
        with self._lock:
            now = time.monotonic()
            slot = max(now, self._next_slot)
            spacing = self._spacing
            if self._slots_taken < _WARMUP_SLOTS:
                spacing += _WARMUP_PAD
            self._slots_taken += 1
            self._next_slot = slot + spacing
        delay = slot - time.monotonic()
        if delay > 0:
            time.sleep(delay)


@dataclass
class CrawlResult:
    """Partial results plus a per-id failure report."""

    corpus: Corpus
    failures: dict[str, str] = field(default_factory=dict)

    @property
    def ok_count(self) -> int:
        return len(self.corpus.channels)


def crawl(
    client_factory,
    channel_ids: Sequence[str],
    policy: FetchPolicy,
    with_posts: bool = True,
) -> CrawlResult:
    """Fetch every id under the politeness policy; failures don't abort.

    ``client_factory(limiter_hook)`` must return a client whose requests
    call the hook first (see HttpClient.before_request).  Results are
    aggregated in the order of ``channel_ids`` regardless of concurrency,
    so the outcome matches a sequential crawl up to per-id failures.
    """
    ids = list(channel_ids)
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate channel ids in crawl request")
    limiter = RateLimiter(policy.min_inter_request_delay)
    client = client_factory(limiter.wait_for_slot)

    records: dict[str, ChannelRecord] = {}
    failures: dict[str, str] = {}

    def work(channel_id: str):
        return fetch_channel(client, channel_id, with_posts=with_posts)

    with ThreadPoolExecutor(max_workers=policy.max_concurrent_requests) as pool:
        futures = {cid: pool.submit(work, cid) for cid in ids}
        for cid, future in futures.items():
            try:
                records[cid] = future.result()
            except CollectorError as exc:
                failures[cid] = str(exc)

    channels = [records[cid] for cid in ids if cid in records]
    return CrawlResult(corpus=Corpus(channels, []), failures=failures)


def http_crawl(
    endpoint: str,
    channel_ids: Sequence[str],
    policy: FetchPolicy,
    allow_external: bool = False,
    with_posts: bool = True,
) -> CrawlResult:
    """Crawl an HTTP endpoint (localhost unless explicitly allowed)."""

    def factory(limiter_hook):
        return HttpClient(
            endpoint=endpoint,
            policy=policy,
            allow_external=allow_external,
            before_request=limiter_hook,
        )

    return crawl(factory, channel_ids, policy, with_posts=with_posts)
