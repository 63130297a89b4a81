"""HTTP facade: ranked review queue, channel detail, decisions, retraining.

All endpoints live under ``/v1``.  The serving state (model, ranking, feature
matrix, version) is one immutable bundle swapped atomically under a lock, so
no request can observe a half-updated ranking.  Decision writes serialize
through the store's single writer; retraining runs as one background job at a
time, guarded by a 409.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from fastapi import Depends, FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse

from ..corpus import Corpus, VideoLabel, channel_to_json, load_corpus, propagate_labels
from ..features import FeatureMatrix, FeatureSpec, build_vocabularies, extract_matrix, preprocess
from ..learners import (
    RankedChannel,
    TrainedModel,
    evaluate_cv,
    load_model,
    rank_channels,
    train,
)
from ..textlytics import analyze_channel
from .config import ServiceConfig
from .store import DECISION_KINDS, DecisionStore, UNDECIDED

QUEUE_FILTERS = ("undecided", "decided")

#: How many attribution groups a queue entry carries.
_TOP_GROUPS = 3


@dataclass(frozen=True)
class ServingBundle:
    """One consistent view of everything derived from a trained model."""

    model: TrainedModel
    ranking: tuple[RankedChannel, ...]
    matrix: FeatureMatrix
    version: int

    def row_of(self, channel_id: str) -> Optional[int]:
        try:
            return self.matrix.channel_ids.index(channel_id)
        except ValueError:
            return None

    def entry_of(self, channel_id: str) -> Optional[RankedChannel]:
        for entry in self.ranking:
            if entry.channel_id == channel_id:
                return entry
        return None


def _disturbing_counts(corpus: Corpus) -> dict[str, int]:
    counts: dict[str, int] = {}
    for video in corpus.videos:
        if video.label == VideoLabel.DISTURBING:
            counts[video.channel_id] = counts.get(video.channel_id, 0) + 1
    return counts


def build_bundle(
    model: TrainedModel, corpus: Corpus, severity: str, version: int
) -> ServingBundle:
    """Rank the corpus under ``model`` and pin the matrix the ranking used."""
    counts = _disturbing_counts(corpus) if severity == "prob_times_count" else None
    ranking = rank_channels(model, corpus, severity=severity, disturbing_counts=counts)
    matrix = extract_matrix(corpus, model.feature_spec, vocabs=model.vocabularies)
    matrix = matrix.select(list(model.feature_names))
    return ServingBundle(
        model=model, ranking=tuple(ranking), matrix=matrix, version=version
    )


def default_trainer(corpus: Corpus, labels: dict, seed: int, folds: int = 5):
    """Feature pipeline + random forest fit; returns (model, eval report).

    Trains on the labeled subset of the corpus (ranking later covers every
    channel, labeled or not).
    """
    labeled_ids = set(labels)
    training = Corpus(
        [c for c in corpus.channels if c.channel_id in labeled_ids],
        [v for v in corpus.videos if v.channel_id in labeled_ids],
    )
    spec = FeatureSpec()
    vocabs = build_vocabularies(training.channels)
    matrix = extract_matrix(training, spec, vocabs=vocabs, channel_labels=labels)
    filtered, report = preprocess(matrix)
    eval_report = evaluate_cv(
        "random_forest", filtered, folds=folds, seed=seed
    )
    model = train(
        "random_forest",
        filtered.values,
        filtered.labels,
        seed=seed,
        feature_names=filtered.names,
        feature_spec=spec,
        vocabularies=vocabs,
        preprocess_report=report,
    )
    return model, eval_report


@dataclass
class RetrainJob:
    job_id: str
    status: str = "running"  # running | succeeded | failed
    model_version: Optional[int] = None
    error: Optional[str] = None
    eval: Optional[dict] = None

    def to_json_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "status": self.status,
            "model_version": self.model_version,
            "error": self.error,
            "eval": self.eval,
        }


@dataclass
class _ServiceState:
    config: ServiceConfig
    corpus: Optional[Corpus]
    store: DecisionStore
    trainer: Callable
    bundle: Optional[ServingBundle] = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    jobs: dict = field(default_factory=dict)
    retrain_running: bool = False
    baseline_decision_count: int = 0
    _job_counter: int = 0

    def next_job_id(self) -> str:
        self._job_counter += 1
        return f"job-{self._job_counter}"


def _error(status_code: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"detail": message})


def _queue_entry(entry: RankedChannel, corpus: Corpus, store: DecisionStore) -> dict:
    channel = corpus.get(entry.channel_id)
    top = sorted(entry.attributions.items(), key=lambda kv: (-kv[1], kv[0]))
    return {
        "channel_id": entry.channel_id,
        "severity": entry.score,
        "probability": entry.probability,
        "top_groups": [
            {"group": name, "delta": delta} for name, delta in top[:_TOP_GROUPS]
        ],
        "status": channel.status.reason.value if channel else None,
        "flags": list(entry.flags),
        "decision_state": store.decision_state(entry.channel_id),
    }


def _sentiment_block(channel) -> dict:
    block = analyze_channel(channel).to_json_dict()
    block.pop("channel_id")  # the detail response already names the channel
    return block


def _retrain_worker(state: _ServiceState, job: RetrainJob, baseline: int) -> None:
    try:
        corpus = state.corpus
        labels = {cid: lab.value for cid, lab in propagate_labels(corpus).items()}
        labels.update(state.store.channel_overrides())
        result = state.trainer(corpus, labels, state.config.retrain_seed)
        if isinstance(result, tuple):
            model, eval_report = result
        else:
            model, eval_report = result, None
        with state.lock:
            version = (state.bundle.version if state.bundle else 0) + 1
        bundle = build_bundle(model, corpus, state.config.severity, version)
        with state.lock:
            state.bundle = bundle
            state.baseline_decision_count = baseline
            job.status = "succeeded"
            job.model_version = version
            if eval_report is not None:
                job.eval = eval_report.to_json_dict()
    except Exception as exc:  # noqa: BLE001 - job must capture any failure
        with state.lock:
            job.status = "failed"
            job.error = f"{type(exc).__name__}: {exc}"
    finally:
        with state.lock:
            state.retrain_running = False


def create_app(
    config: Optional[ServiceConfig] = None,
    *,
    corpus: Optional[Corpus] = None,
    model: Optional[TrainedModel] = None,
    trainer: Optional[Callable] = None,
) -> FastAPI:
    """Assemble the review service.

    ``corpus``/``model`` default to loading ``config.corpus_path`` /
    ``config.model_path``; pass them directly for in-process assembly.  The
    ``trainer`` callable (``trainer(corpus, labels, seed)`` returning a
    trained model or a ``(model, eval_report)`` pair) powers ``/v1/retrain``.
    """
    config = config or ServiceConfig()
    if corpus is None and config.corpus_path:
        corpus = load_corpus(config.corpus_path)
    if model is None and config.model_path:
        model = load_model(config.model_path)

    store = DecisionStore(config.decisions_path, snapshot_every=config.snapshot_every)
    state = _ServiceState(
        config=config,
        corpus=corpus,
        store=store,
        trainer=trainer or default_trainer,
        baseline_decision_count=store.record_count,
    )
    if model is not None and corpus is not None:
        state.bundle = build_bundle(model, corpus, config.severity, version=1)

    def require_token(request: Request) -> None:
        if config.api_token is None:
            return
        if request.headers.get("X-Api-Token") != config.api_token:
            raise _AuthError()

    class _AuthError(Exception):
        pass

    app = FastAPI(title="channel-audit review service", docs_url=None, redoc_url=None)
    app.state.audit = state

    @app.exception_handler(_AuthError)
    async def _unauthorized(request: Request, exc: _AuthError):
        return _error(401, "missing or invalid X-Api-Token header")

    @app.get("/v1/health")
    async def health():
        bundle = state.bundle
        return {
            "status": "ok",
            "model_version": bundle.version if bundle else None,
            "channels": len(corpus.channels) if corpus else 0,
        }

    @app.get("/v1/queue", dependencies=[Depends(require_token)])
    async def queue(
        response: Response,
        limit: Optional[int] = None,
        offset: int = 0,
        filter: Optional[str] = None,
    ):
        bundle = state.bundle
        if bundle is None:
            return _error(
                409,
                "no ranking loaded: provide model_path and corpus_path, "
                "or POST /v1/retrain after recording decisions",
            )
        if filter is not None and filter not in QUEUE_FILTERS:
            return _error(400, f"filter must be one of {QUEUE_FILTERS}")
        if limit is not None and limit < 0:
            return _error(400, "limit must be >= 0")
        if offset < 0:
            return _error(400, "offset must be >= 0")

        entries = [_queue_entry(e, corpus, store) for e in bundle.ranking]
        if filter == "undecided":
            entries = [e for e in entries if e["decision_state"] == UNDECIDED]
        elif filter == "decided":
            entries = [e for e in entries if e["decision_state"] != UNDECIDED]
        total = len(entries)
        page = entries[offset:]
        if limit is not None:
            page = page[:limit]
        response.headers["X-Total-Count"] = str(total)
        return {
            "entries": page,
            "total": total,
            "offset": offset,
            "model_version": bundle.version,
        }

    @app.get("/v1/channels/{channel_id}", dependencies=[Depends(require_token)])
    async def channel_detail(channel_id: str):
        if corpus is None:
            return _error(409, "no corpus loaded")
        channel = corpus.get(channel_id)
        if channel is None:
            return _error(404, f"unknown channel {channel_id!r}")
        bundle = state.bundle
        detail = {
            "record": channel_to_json(channel, corpus.videos_of(channel_id)),
            "status": {
                "available": channel.status.available,
                "reason": channel.status.reason.value,
                "raw_message": channel.status.raw_message,
            },
            "sentiment": _sentiment_block(channel),
            "decision_state": store.decision_state(channel_id),
            "decisions": [d.to_json_dict() for d in store.decisions_for(channel_id)],
            "features": None,
            "attributions": None,
            "probability": None,
            "severity": None,
            "model_version": bundle.version if bundle else None,
        }
        if bundle is not None:
            row = bundle.row_of(channel_id)
            if row is not None:
                values = bundle.matrix.values[row]
                detail["features"] = {
                    name: float(value)
                    for name, value in zip(bundle.matrix.names, values)
                }
            entry = bundle.entry_of(channel_id)
            if entry is not None:
                detail["attributions"] = dict(entry.attributions)
                detail["probability"] = entry.probability
                detail["severity"] = entry.score
                detail["flags"] = list(entry.flags)
        return detail

    @app.post("/v1/channels/{channel_id}/decision", dependencies=[Depends(require_token)])
    async def post_decision(channel_id: str, request: Request):
        if corpus is None:
            return _error(409, "no corpus loaded")
        if corpus.get(channel_id) is None:
            return _error(404, f"unknown channel {channel_id!r}")
        try:
            payload = await request.json()
        except Exception:
            return _error(400, "body must be a JSON object")
        if not isinstance(payload, dict):
            return _error(400, "body must be a JSON object")
        allowed = {"decision", "moderator_id", "note", "timestamp"}
        unknown = set(payload) - allowed
        if unknown:
            return _error(400, f"unknown fields: {sorted(unknown)}")
        decision = payload.get("decision")
        moderator_id = payload.get("moderator_id")
        if decision not in DECISION_KINDS:
            return _error(400, f"decision must be one of {DECISION_KINDS}")
        if not isinstance(moderator_id, str) or not moderator_id:
            return _error(400, "moderator_id must be a non-empty string")
        note = payload.get("note")
        if note is not None and not isinstance(note, str):
            return _error(400, "note must be a string")
        timestamp = payload.get("timestamp")
        if timestamp is not None and not isinstance(timestamp, (int, float)):
            return _error(400, "timestamp must be a number")
        try:
            stored, created = store.record(
                channel_id, decision, moderator_id, note=note, timestamp=timestamp
            )
        except ValueError as exc:
            return _error(400, str(exc))
        return JSONResponse(
            status_code=201 if created else 200,
            content={"stored": stored.to_json_dict(), "created": created},
        )

    @app.get("/v1/decisions/export", dependencies=[Depends(require_token)])
    async def export_decisions():
        lines = ["channel_id,label"]
        overrides = store.channel_overrides()
        for cid in sorted(overrides):
            lines.append(f"{cid},{overrides[cid].value}")
        return PlainTextResponse("\n".join(lines) + "\n", media_type="text/csv")

    @app.post("/v1/retrain", dependencies=[Depends(require_token)])
    async def retrain():
        if corpus is None:
            return _error(409, "no corpus loaded; retraining is impossible")
        with state.lock:
            if state.retrain_running:
                return _error(409, "a retrain job is already in progress")
            new_decisions = store.record_count - state.baseline_decision_count
            if new_decisions < config.retrain_min_decisions:
                return _error(
                    409,
                    f"need at least {config.retrain_min_decisions} new decisions "
                    f"to retrain, have {new_decisions}",
                )
            job = RetrainJob(job_id=state.next_job_id())
            state.jobs[job.job_id] = job
            state.retrain_running = True
            baseline = store.record_count
        thread = threading.Thread(
            target=_retrain_worker, args=(state, job, baseline), daemon=True
        )
        thread.start()
        return JSONResponse(status_code=202, content={"job_id": job.job_id})

    @app.get("/v1/jobs/{job_id}", dependencies=[Depends(require_token)])
    async def job_status(job_id: str):
        with state.lock:
            job = state.jobs.get(job_id)
            if job is None:
                return _error(404, f"unknown job {job_id!r}")
            return job.to_json_dict()

    return app
