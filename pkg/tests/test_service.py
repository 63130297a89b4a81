"""Review service: config loading, decision store, HTTP endpoints, retraining."""

import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from channel_audit.corpus import VideoLabel, save_corpus
from channel_audit.learners import rank_channels, save_model
from channel_audit.service import (
    ConfigError,
    DecisionStore,
    ReviewDecision,
    ServiceConfig,
    StoreError,
    create_app,
    load_config,
    read_label_file,
)
from tests.test_features import full_vocab_corpus
from tests.test_learners import pipeline_model


@pytest.fixture(scope="module")
def corpus():
    return full_vocab_corpus()


@pytest.fixture(scope="module")
def model(corpus):
    return pipeline_model(corpus)


def make_client(tmp_path, corpus, model=None, **config_overrides):
    config = ServiceConfig(
        decisions_path=str(tmp_path / "decisions.jsonl"), **config_overrides
    )
    app = create_app(config, corpus=corpus, model=model)
    return TestClient(app)


class TestConfig:
    def test_defaults(self):
        config = ServiceConfig()
        assert config.port == 8080
        assert config.retrain_min_decisions == 1
        assert config.severity == "prob"

    def test_json_file(self, tmp_path):
        path = tmp_path / "service.json"
        path.write_text(json.dumps({"port": 9001, "severity": "prob_times_count"}))
        config = load_config(path)
        assert config.port == 9001
        assert config.severity == "prob_times_count"

    def test_flat_toml(self, tmp_path):
        path = tmp_path / "audit.toml"
        path.write_text(
            "\n".join(
                [
                    "# review service settings",
                    "[service]",
                    'host = "0.0.0.0"  # bind everywhere',
                    "port = 9002",
                    'corpus_path = "corpus.jsonl"',
                    "retrain_min_decisions = 3",
                    "api_token = \"hunter2 # not a comment\"",
                    "snapshot_every = 10",
                ]
            )
        )
        config = load_config(path)
        assert config.host == "0.0.0.0"
        assert config.port == 9002
        assert config.corpus_path == "corpus.jsonl"
        assert config.retrain_min_decisions == 3
        assert config.api_token == "hunter2 # not a comment"

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "audit.toml"
        path.write_text("prot = 9000\n")
        with pytest.raises(ConfigError, match="prot"):
            load_config(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = tmp_path / "audit.toml"
        path.write_text("port = 1\nport = 2\n")
        with pytest.raises(ConfigError, match="duplicate"):
            load_config(path)

    def test_unparseable_value(self, tmp_path):
        path = tmp_path / "audit.toml"
        path.write_text("port = [1, 2]\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_field_validation(self):
        with pytest.raises(ConfigError):
            ServiceConfig(port=70000)
        with pytest.raises(ConfigError):
            ServiceConfig(severity="mystery")
        with pytest.raises(ConfigError):
            ServiceConfig(retrain_min_decisions=0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.toml")

    def test_json_must_be_object(self, tmp_path):
        path = tmp_path / "service.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(ConfigError):
            load_config(path)


class TestDecisionStore:
    def test_first_record_created_replacement_not(self, tmp_path):
        store = DecisionStore(tmp_path / "d.jsonl")
        _, created = store.record("c1", "confirm_disturbing", "mod-a")
        assert created
        _, created = store.record("c1", "confirm_suitable", "mod-a")
        assert not created
        active = store.active_decisions()
        assert len(active) == 1
        assert active[0].decision == "confirm_suitable"
        assert store.record_count == 2

    def test_timestamps_monotone_per_moderator(self, tmp_path):
        store = DecisionStore(tmp_path / "d.jsonl")
        first, _ = store.record("c1", "confirm_disturbing", "mod-a")
        second, _ = store.record("c2", "confirm_disturbing", "mod-a")
        assert second.timestamp > first.timestamp
        with pytest.raises(ValueError):
            store.record("c3", "confirm_disturbing", "mod-a",
                         timestamp=first.timestamp)

    def test_decision_state_tracks_newest(self, tmp_path):
        store = DecisionStore(tmp_path / "d.jsonl")
        assert store.decision_state("c1") == "undecided"
        store.record("c1", "confirm_disturbing", "mod-a", timestamp=100.0)
        store.record("c1", "needs_more_review", "mod-b", timestamp=200.0)
        assert store.decision_state("c1") == "needs_more_review"

    def test_channel_overrides_only_confirms(self, tmp_path):
        store = DecisionStore(tmp_path / "d.jsonl")
        store.record("c1", "confirm_disturbing", "mod-a", timestamp=1.0)
        store.record("c2", "confirm_suitable", "mod-a", timestamp=2.0)
        store.record("c3", "needs_more_review", "mod-a", timestamp=3.0)
        # a newer park on c1 hides the older confirm
        store.record("c1", "needs_more_review", "mod-b", timestamp=4.0)
        overrides = store.channel_overrides()
        assert overrides == {"c2": VideoLabel.SUITABLE}

    def test_export_and_read_back(self, tmp_path):
        store = DecisionStore(tmp_path / "d.jsonl")
        store.record("c1", "confirm_disturbing", "mod-a")
        store.record("c2", "confirm_suitable", "mod-b")
        out = tmp_path / "labels.csv"
        assert store.export_labels(out) == 2
        labels = read_label_file(out)
        assert labels == {
            "c1": VideoLabel.DISTURBING,
            "c2": VideoLabel.SUITABLE,
        }

    def test_survives_restart(self, tmp_path):
        path = tmp_path / "d.jsonl"
        store = DecisionStore(path)
        store.record("c1", "confirm_disturbing", "mod-a")
        store.record("c2", "confirm_suitable", "mod-b")
        store.record("c1", "needs_more_review", "mod-a")

        reloaded = DecisionStore(path)
        assert reloaded.record_count == 3
        assert reloaded.active_decisions() == store.active_decisions()
        assert reloaded.decision_state("c1") == "needs_more_review"

    def test_snapshot_plus_tail_replay(self, tmp_path):
        path = tmp_path / "d.jsonl"
        store = DecisionStore(path, snapshot_every=2)
        for i in range(5):
            store.record(f"c{i}", "confirm_disturbing", "mod-a")
        snapshot_path = path.with_suffix(path.suffix + ".snapshot")
        assert snapshot_path.exists()
        payload = json.loads(snapshot_path.read_text())
        assert payload["log_lines"] == 4  # snapshots at records 2 and 4

        reloaded = DecisionStore(path, snapshot_every=2)
        assert reloaded.record_count == 5
        assert [d.channel_id for d in reloaded.active_decisions()] == [
            f"c{i}" for i in range(5)
        ]

    def test_log_shorter_than_snapshot_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        store = DecisionStore(path, snapshot_every=2)
        store.record("c1", "confirm_disturbing", "mod-a")
        store.record("c2", "confirm_disturbing", "mod-a")
        path.write_text("")  # truncate the log behind the snapshot's back
        with pytest.raises(StoreError):
            DecisionStore(path, snapshot_every=2)

    def test_in_memory_store(self):
        store = DecisionStore(None)
        store.record("c1", "confirm_disturbing", "mod-a")
        assert store.decision_state("c1") == "confirm_disturbing"
        with pytest.raises(StoreError):
            store.snapshot()

    def test_validation(self):
        with pytest.raises(ValueError):
            ReviewDecision("c1", "maybe", "mod-a", 1.0)
        with pytest.raises(ValueError):
            ReviewDecision("c1", "confirm_suitable", "", 1.0)
        with pytest.raises(ValueError):
            ReviewDecision("", "confirm_suitable", "mod-a", 1.0)


class TestQueueEndpoint:
    def test_matches_ranking_order(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        expected = [e.channel_id for e in rank_channels(model, corpus)]
        body = client.get("/v1/queue").json()
        assert [e["channel_id"] for e in body["entries"]] == expected
        assert body["model_version"] == 1
        severities = [e["severity"] for e in body["entries"]]
        assert severities == sorted(severities, reverse=True)

    def test_limit_takes_top_of_ranking(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        full = client.get("/v1/queue").json()["entries"]
        page = client.get("/v1/queue", params={"limit": 2}).json()["entries"]
        assert page == full[:2]

    def test_offset_beyond_end_keeps_total(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        response = client.get("/v1/queue", params={"offset": 10_000})
        assert response.status_code == 200
        assert response.json()["entries"] == []
        assert int(response.headers["X-Total-Count"]) == len(corpus.channels)

    def test_undecided_filter_empties_decided_set(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        for channel in corpus.channels:
            response = client.post(
                f"/v1/channels/{channel.channel_id}/decision",
                json={"decision": "confirm_suitable", "moderator_id": "mod-a"},
            )
            assert response.status_code == 201
        body = client.get("/v1/queue", params={"filter": "undecided"}).json()
        assert body["entries"] == []
        assert body["total"] == 0
        decided = client.get("/v1/queue", params={"filter": "decided"}).json()
        assert decided["total"] == len(corpus.channels)

    def test_decision_state_appears_in_entries(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        target = corpus.channels[0].channel_id
        client.post(
            f"/v1/channels/{target}/decision",
            json={"decision": "confirm_disturbing", "moderator_id": "mod-a"},
        )
        entries = client.get("/v1/queue").json()["entries"]
        states = {e["channel_id"]: e["decision_state"] for e in entries}
        assert states[target] == "confirm_disturbing"
        others = [s for cid, s in states.items() if cid != target]
        assert set(others) == {"undecided"}

    def test_entry_shape(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        entry = client.get("/v1/queue", params={"limit": 1}).json()["entries"][0]
        assert set(entry) >= {
            "channel_id", "severity", "probability",
            "top_groups", "status", "decision_state",
        }
        assert len(entry["top_groups"]) <= 3
        assert 0.0 <= entry["probability"] <= 1.0

    def test_invalid_filter_rejected(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        assert client.get("/v1/queue", params={"filter": "weird"}).status_code == 400

    def test_no_ranking_conflict(self, tmp_path, corpus):
        client = make_client(tmp_path, corpus, model=None)
        response = client.get("/v1/queue")
        assert response.status_code == 409
        assert "ranking" in response.json()["detail"]


class TestDecisionEndpoint:
    def test_create_then_replace(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        target = corpus.channels[0].channel_id
        payload = {"decision": "confirm_disturbing", "moderator_id": "mod-a"}
        first = client.post(f"/v1/channels/{target}/decision", json=payload)
        assert first.status_code == 201
        assert first.json()["created"] is True
        second = client.post(
            f"/v1/channels/{target}/decision",
            json={"decision": "confirm_suitable", "moderator_id": "mod-a"},
        )
        assert second.status_code == 200
        assert second.json()["created"] is False
        assert second.json()["stored"]["decision"] == "confirm_suitable"

    def test_unknown_channel(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        response = client.post(
            "/v1/channels/nope/decision",
            json={"decision": "confirm_suitable", "moderator_id": "mod-a"},
        )
        assert response.status_code == 404

    def test_malformed_payloads(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        target = corpus.channels[0].channel_id
        url = f"/v1/channels/{target}/decision"
        assert client.post(url, json={"decision": "maybe", "moderator_id": "m"}).status_code == 400
        assert client.post(url, json={"decision": "confirm_suitable"}).status_code == 400
        assert client.post(url, json={"decision": "confirm_suitable",
                                      "moderator_id": "m",
                                      "extra": 1}).status_code == 400
        assert client.post(url, content=b"not json",
                           headers={"Content-Type": "application/json"}).status_code == 400
        assert client.post(url, json=["list"]).status_code == 400

    def test_export_after_two_confirms(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        ids = [c.channel_id for c in corpus.channels[:2]]
        client.post(f"/v1/channels/{ids[0]}/decision",
                    json={"decision": "confirm_disturbing", "moderator_id": "m"})
        client.post(f"/v1/channels/{ids[1]}/decision",
                    json={"decision": "confirm_suitable", "moderator_id": "m"})
        response = client.get("/v1/decisions/export")
        assert response.status_code == 200
        lines = response.text.strip().splitlines()
        assert lines[0] == "channel_id,label"
        assert len(lines) == 3
        assert f"{ids[0]},disturbing" in lines
        assert f"{ids[1]},suitable" in lines

    def test_decisions_durable_across_app_restart(self, tmp_path, corpus, model):
        config = ServiceConfig(decisions_path=str(tmp_path / "d.jsonl"))
        target = corpus.channels[0].channel_id
        with TestClient(create_app(config, corpus=corpus, model=model)) as client:
            client.post(f"/v1/channels/{target}/decision",
                        json={"decision": "confirm_disturbing", "moderator_id": "m"})
        with TestClient(create_app(config, corpus=corpus, model=model)) as client:
            entries = client.get("/v1/queue").json()["entries"]
            states = {e["channel_id"]: e["decision_state"] for e in entries}
            assert states[target] == "confirm_disturbing"


class TestDetailEndpoint:
    def test_known_channel_detail(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        target = corpus.channels[0].channel_id
        body = client.get(f"/v1/channels/{target}").json()
        assert body["record"]["channel_id"] == target
        assert len(body["features"]) == len(model.feature_names)
        assert 0.0 <= body["probability"] <= 1.0
        assert body["severity"] is not None
        assert body["attributions"]
        assert "combined" in body["sentiment"]["description_polarity"]
        assert body["decision_state"] == "undecided"

    def test_unknown_channel_404(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        assert client.get("/v1/channels/nope").status_code == 404

    def test_hidden_subscribers_marked_not_zeroed(self, tmp_path, corpus, model):
        from channel_audit.corpus import Corpus
        from tests.test_features import make_channel

        ghost = make_channel(
            channel_id="zz-hidden",
            subscriber_count=None,
            hidden_subscribers=True,
            description="quiet channel ❤",
        )
        extended = Corpus(list(corpus.channels) + [ghost], list(corpus.videos))
        client = make_client(tmp_path, extended, model)
        body = client.get("/v1/channels/zz-hidden").json()
        assert body["record"]["hidden_subscribers"] is True
        assert body["record"]["subscriber_count"] is None
        entry = next(
            e for e in client.get("/v1/queue").json()["entries"]
            if e["channel_id"] == "zz-hidden"
        )
        assert "subscriber_count_hidden" in entry["flags"]

    def test_features_match_served_matrix(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        app_state = client.app.state.audit
        bundle = app_state.bundle
        target = bundle.matrix.channel_ids[0]
        body = client.get(f"/v1/channels/{target}").json()
        row = bundle.matrix.values[0]
        for name, value in zip(bundle.matrix.names, row):
            assert body["features"][name] == pytest.approx(float(value), abs=0)


class TestRetrainEndpoint:
    def test_no_new_decisions_conflict(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        response = client.post("/v1/retrain")
        assert response.status_code == 409
        assert "decision" in response.json()["detail"]

    def test_min_decisions_threshold(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model, retrain_min_decisions=2)
        target = corpus.channels[0].channel_id
        client.post(f"/v1/channels/{target}/decision",
                    json={"decision": "confirm_suitable", "moderator_id": "m"})
        response = client.post("/v1/retrain")
        assert response.status_code == 409
        assert "2" in response.json()["detail"]

    def _decide_and_retrain(self, client, corpus):
        target = corpus.channels[0].channel_id
        client.post(f"/v1/channels/{target}/decision",
                    json={"decision": "confirm_disturbing", "moderator_id": "m"})
        return client.post("/v1/retrain")

    def _wait_for_job(self, client, job_id, timeout=10.0):
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            body = client.get(f"/v1/jobs/{job_id}").json()
            if body["status"] != "running":
                return body
            time.sleep(0.01)
        raise AssertionError("retrain job never finished")

    def test_successful_retrain_increments_version(self, tmp_path, corpus, model):
        def trainer(train_corpus, labels, seed):
            return model  # reuse the fitted model; swap machinery is the subject

        config = ServiceConfig(decisions_path=str(tmp_path / "d.jsonl"))
        app = create_app(config, corpus=corpus, model=model, trainer=trainer)
        client = TestClient(app)
        response = self._decide_and_retrain(client, corpus)
        assert response.status_code == 202
        job = self._wait_for_job(client, response.json()["job_id"])
        assert job["status"] == "succeeded"
        assert job["model_version"] == 2
        assert client.get("/v1/queue").json()["model_version"] == 2

    def test_concurrent_retrain_conflict(self, tmp_path, corpus, model):
        release = threading.Event()

        def trainer(train_corpus, labels, seed):
            release.wait(timeout=10)
            return model

        config = ServiceConfig(decisions_path=str(tmp_path / "d.jsonl"))
        app = create_app(config, corpus=corpus, model=model, trainer=trainer)
        client = TestClient(app)
        first = self._decide_and_retrain(client, corpus)
        assert first.status_code == 202
        second = client.post("/v1/retrain")
        assert second.status_code == 409
        assert "progress" in second.json()["detail"]
        release.set()
        job = self._wait_for_job(client, first.json()["job_id"])
        assert job["status"] == "succeeded"

    def test_training_failure_keeps_old_model(self, tmp_path, corpus, model):
        def trainer(train_corpus, labels, seed):
            raise RuntimeError("synthetic training failure")

        config = ServiceConfig(decisions_path=str(tmp_path / "d.jsonl"))
        app = create_app(config, corpus=corpus, model=model, trainer=trainer)
        client = TestClient(app)
        response = self._decide_and_retrain(client, corpus)
        job = self._wait_for_job(client, response.json()["job_id"])
        assert job["status"] == "failed"
        assert "synthetic training failure" in job["error"]
        body = client.get("/v1/queue").json()
        assert body["model_version"] == 1  # serving model untouched
        # a new retrain is possible after the failure
        assert client.post("/v1/retrain").status_code == 202

    def test_confirmed_decisions_override_labels(self, tmp_path, corpus, model):
        captured = {}

        def trainer(train_corpus, labels, seed):
            captured.update(labels)
            return model

        config = ServiceConfig(decisions_path=str(tmp_path / "d.jsonl"))
        app = create_app(config, corpus=corpus, model=model, trainer=trainer)
        client = TestClient(app)
        suitable = [
            cid for cid, lab in _propagated(corpus).items()
            if lab.value == VideoLabel.SUITABLE
        ][0]
        client.post(f"/v1/channels/{suitable}/decision",
                    json={"decision": "confirm_disturbing", "moderator_id": "m"})
        response = client.post("/v1/retrain")
        self._wait_for_job(client, response.json()["job_id"])
        assert captured[suitable] == VideoLabel.DISTURBING

    def test_unknown_job_404(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model)
        assert client.get("/v1/jobs/job-99").status_code == 404


def _propagated(corpus):
    from channel_audit.corpus import propagate_labels

    return propagate_labels(corpus)


class TestAuthAndAssembly:
    def test_token_required_when_configured(self, tmp_path, corpus, model):
        client = make_client(tmp_path, corpus, model, api_token="sesame")
        assert client.get("/v1/queue").status_code == 401
        assert client.get("/v1/queue",
                          headers={"X-Api-Token": "wrong"}).status_code == 401
        assert client.get("/v1/queue",
                          headers={"X-Api-Token": "sesame"}).status_code == 200
        # liveness stays open
        assert client.get("/v1/health").status_code == 200

    def test_assembly_from_paths(self, tmp_path, corpus, model):
        corpus_path = tmp_path / "corpus.jsonl"
        model_path = tmp_path / "model.json"
        save_corpus(corpus, corpus_path)
        save_model(model, model_path)
        config = ServiceConfig(
            corpus_path=str(corpus_path),
            model_path=str(model_path),
            decisions_path=str(tmp_path / "d.jsonl"),
        )
        client = TestClient(create_app(config))
        body = client.get("/v1/queue").json()
        assert body["model_version"] == 1
        assert len(body["entries"]) == len(corpus.channels)

    def test_health_reports_missing_model(self, tmp_path, corpus):
        client = make_client(tmp_path, corpus, model=None)
        body = client.get("/v1/health").json()
        assert body["model_version"] is None
        assert body["channels"] == len(corpus.channels)
