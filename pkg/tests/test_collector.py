"""Collector: clients, status parsing, rate limiting, mock-server crawls."""

import json
import threading
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from channel_audit.collector import (
    ChannelNotFound,
    CollectorError,
    CrawlResult,
    FetchPolicy,
    FixtureClient,
    HttpClient,
    MockChannelServer,
    RateLimiter,
    RawPage,
    TransportError,
    channel_from_api,
    crawl,
    fetch_channel,
    fetch_posts,
    http_crawl,
    parse_status,
    posts_from_api,
)
from channel_audit.corpus import StatusReason

FAST = FetchPolicy(
    max_concurrent_requests=1,
    min_inter_request_delay=0.001,
    page_settle_delay=0.001,
    retries=0,
)


def page(body: str, channel_id: str = "c0") -> RawPage:
    return RawPage(url=f"https://www.youtube.com/channel/{channel_id}", body=body)


def api_payload(channel_id="c0", **overrides):
    payload = {
        "id": channel_id,
        "publishedAt": "2019-03-01",
        "country": "US",
        "description": "fun family videos",
        "keywords": ["fun", "family"],
        "topicCategories": ["Entertainment"],
        "madeForKids": False,
        "statistics": {
            "viewCount": 1000,
            "videoCount": 5,
            "subscriberCount": 150,
            "hiddenSubscriberCount": False,
            "subscriptionCount": 3,
            "postCount": 2,
        },
        "links": [{"platform": "twitter", "url": "https://twitter.com/x"}],
        "emailPresent": True,
    }
    payload.update(overrides)
    return payload


def posts_payload(n):
    return [
        {"publishedAt": f"2021-{1 + i // 28:02d}-{1 + i % 28:02d}", "text": f"post {i}",
         "likeCount": i}
        for i in range(n)
    ]


class TestPolicyAndPage:
    def test_policy_validation(self):
        with pytest.raises(ValueError):
            FetchPolicy(max_concurrent_requests=0)
        with pytest.raises(ValueError):
            FetchPolicy(min_inter_request_delay=0)
        with pytest.raises(ValueError):
            FetchPolicy(page_settle_delay=-1)
        with pytest.raises(ValueError):
            FetchPolicy(retries=-1)

    def test_raw_page_url_shapes(self):
        RawPage(url="https://www.youtube.com/channel/abc", body="")
        RawPage(url="https://www.youtube.com/watch?v=xyz", body="")
        RawPage(url="http://127.0.0.1:99/api/channels/abc", body="")
        with pytest.raises(ValueError):
            RawPage(url="https://example.com/something", body="")


class TestParseStatus:
    def test_terms_of_service_banner(self):
        report = parse_status(
            page("This account has been terminated for violating YouTube's Terms of Service.")
        )
        assert report.reason == StatusReason.TERMS_OF_SERVICE
        assert "Terms of Service" in report.raw_message

    def test_spam_notice_wins_over_tos_wording(self):
        body = (
            "This account has been terminated due to multiple or severe violations "
            "of YouTube's policy against spam, deceptive practices, and misleading "
            "content or other Terms of Service violations."
        )
        report = parse_status(page(body))
        assert report.reason == StatusReason.SPAM_DECEPTIVE

    def test_termination_message(self):
        report = parse_status(
            page("The account associated with this video has been terminated.")
        )
        assert report.reason == StatusReason.ACCOUNT_TERMINATED

    def test_normal_page_is_available(self):
        report = parse_status(
            page("<html><body><h1>Cool Channel</h1><p>Welcome!</p></body></html>")
        )
        assert report.available

    def test_unknown_error_banner_maps_to_other(self):
        report = parse_status(
            page('<div class="error-banner">Something completely new happened.</div>')
        )
        assert report.reason == StatusReason.OTHER_UNAVAILABLE

    @given(st.text(max_size=300))
    @settings(max_examples=100, deadline=None)
    def test_total_on_arbitrary_bodies(self, body):
        report = parse_status(page(body))
        assert report.available == (report.reason == StatusReason.AVAILABLE)


class TestChannelFromApi:
    def test_pass_through_fields(self):
        record = channel_from_api(api_payload())
        assert record.view_count == 1000
        assert record.video_count == 5
        assert record.subscriber_count == 150
        assert record.post_count == 2
        assert record.links_count == 1
        assert record.linked_platforms == [("twitter", "https://twitter.com/x")]
        assert record.email_present is True
        assert record.made_for_kids is False
        assert str(record.published_at) == "2019-03-01"

    def test_hidden_subscribers_absent_not_zero(self):
        payload = api_payload()
        payload["statistics"]["hiddenSubscriberCount"] = True
        payload["statistics"]["subscriberCount"] = 999  # must be ignored
        record = channel_from_api(payload)
        assert record.subscriber_count is None
        assert record.hidden_subscribers is True

    def test_missing_optionals_stay_absent(self):
        record = channel_from_api({"id": "bare"})
        assert record.country is None
        assert record.published_at is None
        assert record.made_for_kids is None
        assert record.subscriber_count is None or record.subscriber_count == 0


class TestPosts:
    def test_fewer_than_limit(self):
        records = posts_from_api(posts_payload(3), limit=100)
        assert len(records) == 3

    def test_truncates_to_newest(self):
        records = posts_from_api(posts_payload(150), limit=100)
        assert len(records) == 100
        dates = [p.date_published for p in records]
        assert dates == sorted(dates, reverse=True)
        # the oldest 50 posts are the ones dropped
        assert min(dates) > posts_from_api(posts_payload(150), limit=150)[-1].date_published

    def test_negative_limit_rejected(self, tmp_path):
        client = FixtureClient(_fixture_dir(tmp_path))
        with pytest.raises(ValueError):
            fetch_posts(client, "c0", limit=-1)


def _fixture_dir(tmp_path, channels=None, pages=None, posts=None):
    root = tmp_path / "fixtures"
    for sub in ("channels", "pages", "posts"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    for cid, payload in (channels or {}).items():
        (root / "channels" / f"{cid}.json").write_text(json.dumps(payload))
    for cid, body in (pages or {}).items():
        (root / "pages" / f"{cid}.html").write_text(body)
    for cid, payload in (posts or {}).items():
        (root / "posts" / f"{cid}.json").write_text(json.dumps(payload))
    return root


class TestFixtureClient:
    def test_missing_directory_rejected(self, tmp_path):
        with pytest.raises(CollectorError):
            FixtureClient(tmp_path / "nope")

    def test_fetch_channel_passthrough(self, tmp_path):
        root = _fixture_dir(
            tmp_path,
            channels={"c0": api_payload()},
            posts={"c0": posts_payload(3)},
        )
        record = fetch_channel(FixtureClient(root), "c0")
        assert record.view_count == 1000
        assert len(record.posts) == 3

    def test_terminated_channel_gets_status_from_page(self, tmp_path):
        root = _fixture_dir(
            tmp_path,
            pages={"gone": "This account has been terminated."},
        )
        record = fetch_channel(FixtureClient(root), "gone")
        assert record.status.reason == StatusReason.ACCOUNT_TERMINATED
        assert record.view_count == 0  # defaults, no API data

    def test_unknown_channel_raises(self, tmp_path):
        root = _fixture_dir(
            tmp_path,
            pages={"ghost": "<html><body>a perfectly normal page</body></html>"},
        )
        with pytest.raises(ChannelNotFound):
            fetch_channel(FixtureClient(root), "ghost")

    def test_made_for_kids_channel_has_no_posts(self, tmp_path):
        root = _fixture_dir(
            tmp_path,
            channels={"kid": api_payload("kid", madeForKids=True)},
        )
        record = fetch_channel(FixtureClient(root), "kid")
        assert record.posts == []


class TestHttpClient:
    def test_external_endpoint_blocked_by_default(self):
        with pytest.raises(CollectorError, match="i-understand-tos"):
            HttpClient(endpoint="https://www.youtube.com", policy=FAST)

    def test_external_endpoint_allowed_with_flag(self):
        client = HttpClient(
            endpoint="https://www.youtube.com", policy=FAST, allow_external=True
        )
        assert client.endpoint == "https://www.youtube.com"

    def test_localhost_allowed(self):
        client = HttpClient(endpoint="http://127.0.0.1:1", policy=FAST)
        assert client.endpoint.startswith("http://127.0.0.1")

    def test_transport_error_after_retries(self):
        client = HttpClient(
            endpoint="http://127.0.0.1:1",
            policy=FetchPolicy(
                min_inter_request_delay=0.001, page_settle_delay=0.001, retries=1
            ),
            timeout=0.2,
        )
        with pytest.raises(TransportError):
            client.get_channel_json("c0")

    def test_fetch_against_mock_server(self):
        with MockChannelServer(
            channels={"c0": api_payload()},
            posts={"c0": posts_payload(2)},
            pages={"gone": "channel terminated: Terms of Service violation"},
        ) as server:
            client = HttpClient(endpoint=server.base_url, policy=FAST)
            record = fetch_channel(client, "c0")
            assert record.view_count == 1000
            assert len(record.posts) == 2
            gone = fetch_channel(client, "gone")
            assert gone.status.reason == StatusReason.TERMS_OF_SERVICE


class TestRateLimiter:
    def test_validates_delay(self):
        with pytest.raises(ValueError):
            RateLimiter(0)

    def test_sequential_spacing(self):
        limiter = RateLimiter(0.02)
        times = []
        for _ in range(5):
            limiter.wait_for_slot()
            times.append(time.monotonic())
        gaps = [b - a for a, b in zip(times, times[1:])]
        assert min(gaps) >= 0.02

    def test_concurrent_spacing(self):
        limiter = RateLimiter(0.01)
        times = []
        lock = threading.Lock()

        def worker():
            limiter.wait_for_slot()
            with lock:
                times.append(time.monotonic())

        threads = [threading.Thread(target=worker) for _ in range(10)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        times.sort()
        gaps = [b - a for a, b in zip(times, times[1:])]
        assert min(gaps) >= 0.01 * 0.9  # slot spacing minus scheduler noise


class TestCrawl:
    def _servers(self, n):
        channels = {f"c{i}": api_payload(f"c{i}") for i in range(n)}
        return MockChannelServer(channels=channels)

    def test_empty_id_list(self):
        with self._servers(0) as server:
            result = http_crawl(server.base_url, [], FAST)
            assert result.ok_count == 0
            assert result.failures == {}

    def test_duplicate_ids_rejected(self):
        with self._servers(1) as server:
            with pytest.raises(ValueError):
                http_crawl(server.base_url, ["c0", "c0"], FAST)

    def test_collects_all_channels(self):
        with self._servers(6) as server:
            result = http_crawl(
                server.base_url, [f"c{i}" for i in range(6)], FAST, with_posts=False
            )
            assert result.ok_count == 6
            assert [c.channel_id for c in result.corpus.channels] == [
                f"c{i}" for i in range(6)
            ]

    def test_partial_failure_reported(self):
        channels = {"ok1": api_payload("ok1"), "ok2": api_payload("ok2")}
        with MockChannelServer(channels=channels) as server:
            # "boom" is unknown: page fallback sees the default 404 body
            result = http_crawl(
                server.base_url, ["ok1", "boom", "ok2"], FAST, with_posts=False
            )
            assert result.ok_count == 3  # status captured, not a failure
            boom = result.corpus.get("boom")
            assert boom.status.reason == StatusReason.CHANNEL_ABSENT

    def test_transport_failures_do_not_abort(self):
        with self._servers(2) as server:
            base = server.base_url
        # server stopped: every id now fails with a transport error
        result = http_crawl(base, ["c0", "c1"], FAST, with_posts=False)
        assert result.ok_count == 0
        assert set(result.failures) == {"c0", "c1"}
        assert "failed after retries" in result.failures["c0"]

    def test_wall_time_respects_delay(self):
        policy = FetchPolicy(
            max_concurrent_requests=1,
            min_inter_request_delay=0.03,
            page_settle_delay=0.001,
            retries=0,
        )
        with self._servers(10) as server:
            start = time.monotonic()
            result = http_crawl(
                server.base_url, [f"c{i}" for i in range(10)], policy, with_posts=False
            )
            elapsed = time.monotonic() - start
        assert result.ok_count == 10
        assert elapsed >= 9 * 0.03

    def test_server_log_gaps_respect_policy(self, quiet_gc):
        policy = FetchPolicy(
            max_concurrent_requests=4,
            min_inter_request_delay=0.02,
            page_settle_delay=0.001,
            retries=0,
        )
        with self._servers(15) as server:
            http_crawl(
                server.base_url, [f"c{i}" for i in range(15)], policy, with_posts=False
            )
            log = server.request_log()
        times = sorted(entry["time"] for entry in log)
        gaps = [b - a for a, b in zip(times, times[1:])]
        assert len(times) == 15
        assert min(gaps) >= policy.min_inter_request_delay

    def test_concurrency_never_exceeds_bound(self):
        policy = FetchPolicy(
            max_concurrent_requests=3,
            min_inter_request_delay=0.005,
            page_settle_delay=0.001,
            retries=0,
        )
        channels = {f"c{i}": api_payload(f"c{i}") for i in range(12)}
        with MockChannelServer(channels=channels, latency=0.05) as server:
            http_crawl(
                server.base_url, [f"c{i}" for i in range(12)], policy, with_posts=False
            )
            log = server.request_log()
        assert max(entry["concurrent"] for entry in log) <= 3

    def test_results_independent_of_concurrency(self):
        ids = [f"c{i}" for i in range(8)]
        outcomes = []
        for workers in (1, 4):
            policy = FetchPolicy(
                max_concurrent_requests=workers,
                min_inter_request_delay=0.001,
                page_settle_delay=0.001,
                retries=0,
            )
            with self._servers(8) as server:
                result = http_crawl(server.base_url, ids, policy, with_posts=False)
            outcomes.append(
                [(c.channel_id, c.view_count, c.status.reason) for c in result.corpus.channels]
            )
        assert outcomes[0] == outcomes[1]

    def test_crawl_with_fixture_client(self, tmp_path):
        root = _fixture_dir(
            tmp_path,
            channels={"a": api_payload("a"), "b": api_payload("b")},
        )
        client = FixtureClient(root)
        result = crawl(lambda hook: client, ["a", "b"], FAST, with_posts=False)
        assert result.ok_count == 2
