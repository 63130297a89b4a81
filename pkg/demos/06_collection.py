"""
Polite collection: rate-limited crawling against a local server
===============================================================

The collector spaces requests at least one policy delay apart and caps
concurrency, no matter how many worker threads are in flight.  A local
test server records request arrival times so the pacing can be audited
after the crawl.
"""

import numpy as np

from channel_audit.collector import FetchPolicy, MockChannelServer, http_crawl


def payload(channel_id: str, i: int) -> dict:
    return {
        "id": channel_id,
        "publishedAt": f"2020-{1 + i % 12:02d}-15",
        "country": "US",
        "description": f"channel number {i} with daily uploads",
        "keywords": ["daily", "uploads"],
        "statistics": {
            "viewCount": 1000 * (i + 1),
            "videoCount": 10 + i,
            "subscriberCount": 50 * (i + 1),
            "hiddenSubscriberCount": False,
        },
    }


ids = [f"c{i:02d}" for i in range(8)]
channels = {cid: payload(cid, i) for i, cid in enumerate(ids)}
posts = {cid: [{"publishedAt": "2021-06-01", "text": "hello ❤", "likeCount": 3}]
         for cid in ids}

policy = FetchPolicy(
    max_concurrent_requests=3,
    min_inter_request_delay=0.05,
    page_settle_delay=0.001,
    retries=1,
)

with MockChannelServer(channels, posts=posts, latency=0.01) as server:
    result = http_crawl(server.base_url, ids, policy)
    log = server.request_log()

print(f"crawled {len(result.corpus.channels)} channels, "
      f"{len(result.failures)} failures")
first = result.corpus.channels[0]
print(f"first record: {first.channel_id}, views {first.view_count}, "
      f"posts {len(first.posts)}")

# --- audit the pacing from the server's own log ------------------------------
arrivals = np.array([entry["time"] for entry in log])
gaps = np.diff(np.sort(arrivals))
peak = max(entry["concurrent"] for entry in log)
print(f"\nserver saw {len(log)} requests")
print(f"inter-request gaps: min {gaps.min() * 1000:.1f} ms, "
      f"median {np.median(gaps) * 1000:.1f} ms "
      f"(policy floor {policy.min_inter_request_delay * 1000:.0f} ms)")
print(f"peak concurrent requests: {peak} (cap {policy.max_concurrent_requests})")
assert gaps.min() >= policy.min_inter_request_delay
assert peak <= policy.max_concurrent_requests

# the crawler refuses non-local endpoints unless explicitly allowed
try:
    http_crawl("https://example.com", ids, policy)
except Exception as exc:
    print(f"\nexternal endpoint rejected: {type(exc).__name__}: {exc}")
