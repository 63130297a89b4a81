"""Durable moderator-decision store: append-only JSONL log plus snapshots.

Every decision is one JSON line appended (and fsynced) to the log; the
current state is always reproducible by replaying the log from the top.  A
snapshot file caches the active decision set together with the number of log
lines it covers, so reloads replay only the tail.  Neither file is ever
rewritten in place except the snapshot, which is replaced atomically.

Decisions export as a ``channel_id,label`` CSV whose label column uses the
same vocabulary as corpus video labels (``disturbing`` / ``suitable``), so an
export can be fed straight back into feature extraction as channel labels.
"""

from __future__ import annotations

import csv
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..corpus import VideoLabel

DECISION_KINDS = ("confirm_disturbing", "confirm_suitable", "needs_more_review")

#: Decisions that assert a label; ``needs_more_review`` intentionally maps to
#: nothing — it parks a channel without contradicting the model.
_DECISION_LABELS = {
    "confirm_disturbing": VideoLabel.DISTURBING,
    "confirm_suitable": VideoLabel.SUITABLE,
}

UNDECIDED = "undecided"


class StoreError(Exception):
    """Raised for unreadable or internally inconsistent store files."""


@dataclass(frozen=True)
class ReviewDecision:
    """One moderator's current verdict on one channel."""

    channel_id: str
    decision: str
    moderator_id: str
    timestamp: float
    note: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.channel_id:
            raise ValueError("channel_id must be non-empty")
        if not self.moderator_id:
            raise ValueError("moderator_id must be non-empty")
        if self.decision not in DECISION_KINDS:
            raise ValueError(
                f"decision must be one of {DECISION_KINDS}, got {self.decision!r}"
            )
        if not isinstance(self.timestamp, (int, float)) or self.timestamp <= 0:
            raise ValueError(f"timestamp must be a positive number: {self.timestamp!r}")

    def to_json_dict(self) -> dict:
        obj = {
            "channel_id": self.channel_id,
            "decision": self.decision,
            "moderator_id": self.moderator_id,
            "timestamp": self.timestamp,
        }
        if self.note is not None:
            obj["note"] = self.note
        return obj

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ReviewDecision":
        return cls(
            channel_id=obj["channel_id"],
            decision=obj["decision"],
            moderator_id=obj["moderator_id"],
            timestamp=float(obj["timestamp"]),
            note=obj.get("note"),
        )


class DecisionStore:
    """Single-writer decision log with at-most-one active row per (channel, moderator).

    ``path=None`` keeps everything in memory (useful for throwaway service
    instances); with a path, every :meth:`record` call is durable before it
    returns.
    """

    def __init__(self, path=None, snapshot_every: int = 100):
        if snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        self._path = Path(path) if path is not None else None
        self._snapshot_path = (
            self._path.with_suffix(self._path.suffix + ".snapshot")
            if self._path is not None
            else None
        )
        self._snapshot_every = snapshot_every
        self._lock = threading.Lock()
        self._active: dict[tuple[str, str], ReviewDecision] = {}
        self._latest_ts: dict[str, float] = {}
        self._record_count = 0
        if self._path is not None:
            self._load()

    # -- loading ----------------------------------------------------------

    def _apply(self, decision: ReviewDecision) -> None:
        self._active[(decision.channel_id, decision.moderator_id)] = decision
        prior = self._latest_ts.get(decision.moderator_id, 0.0)
        self._latest_ts[decision.moderator_id] = max(prior, decision.timestamp)

    def _load(self) -> None:
        skip_lines = 0
        if self._snapshot_path.exists():
            try:
                snapshot = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
                skip_lines = int(snapshot["log_lines"])
                for obj in snapshot["active"]:
                    self._apply(ReviewDecision.from_json_dict(obj))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise StoreError(f"corrupt snapshot {self._snapshot_path}: {exc}") from exc
        self._record_count = skip_lines

        total_lines = 0
        if self._path.exists():
            with open(self._path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    total_lines = lineno
                    if lineno <= skip_lines or not line.strip():
                        continue
                    try:
                        self._apply(ReviewDecision.from_json_dict(json.loads(line)))
                    except (json.JSONDecodeError, KeyError, ValueError) as exc:
                        raise StoreError(f"{self._path}:{lineno}: {exc}") from exc
                    self._record_count += 1
        if total_lines < skip_lines:
            raise StoreError(
                f"log {self._path} is shorter than its snapshot "
                f"({total_lines} < {skip_lines} lines)"
            )

    # -- writes -----------------------------------------------------------

    def record(
        self,
        channel_id: str,
        decision: str,
        moderator_id: str,
        note: Optional[str] = None,
        timestamp: Optional[float] = None,
    ) -> tuple[ReviewDecision, bool]:
        """Append one decision; returns ``(stored, created)``.

        ``created`` is False when this moderator already had an active
        decision on the channel (the new one replaces it).  Server-assigned
        timestamps are nudged forward to stay strictly monotone per
        moderator; explicit timestamps that run backwards are rejected.
        """
        with self._lock:
            floor = self._latest_ts.get(moderator_id, 0.0)
            if timestamp is None:
                timestamp = max(time.time(), floor + 1e-6)
            elif timestamp <= floor:
                raise ValueError(
                    f"timestamp {timestamp} not after moderator "
                    f"{moderator_id!r}'s latest decision at {floor}"
                )
            stored = ReviewDecision(
                channel_id=channel_id,
                decision=decision,
                moderator_id=moderator_id,
                timestamp=timestamp,
                note=note,
            )
            created = (channel_id, moderator_id) not in self._active
            if self._path is not None:
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(stored.to_json_dict(), ensure_ascii=False) + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            self._apply(stored)
            self._record_count += 1
            if self._path is not None and self._record_count % self._snapshot_every == 0:
                self._write_snapshot()
            return stored, created

    def _write_snapshot(self) -> None:
        payload = {
            "log_lines": self._record_count,
            "active": [d.to_json_dict() for d in self._sorted_active()],
        }
        tmp = self._snapshot_path.with_suffix(self._snapshot_path.suffix + ".tmp")
        tmp.write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")
        os.replace(tmp, self._snapshot_path)

    def snapshot(self) -> None:
        """Force a snapshot now (normally written every ``snapshot_every`` records)."""
        if self._path is None:
            raise StoreError("in-memory store has nothing to snapshot")
        with self._lock:
            self._write_snapshot()

    # -- reads ------------------------------------------------------------

    def _sorted_active(self) -> list[ReviewDecision]:
        return [self._active[key] for key in sorted(self._active)]

    @property
    def record_count(self) -> int:
        """Total log records ever written (replacements included)."""
        return self._record_count

    def active_decisions(self) -> list[ReviewDecision]:
        """Current decision per (channel, moderator), sorted by that key."""
        with self._lock:
            return self._sorted_active()

    def decisions_for(self, channel_id: str) -> list[ReviewDecision]:
        """Active decisions on one channel, newest first."""
        with self._lock:
            rows = [d for (cid, _), d in self._active.items() if cid == channel_id]
        return sorted(rows, key=lambda d: (-d.timestamp, d.moderator_id))

    def decision_state(self, channel_id: str) -> str:
        """The newest decision on the channel, or ``"undecided"``."""
        rows = self.decisions_for(channel_id)
        return rows[0].decision if rows else UNDECIDED

    def channel_overrides(self) -> dict[str, VideoLabel]:
        """Per-channel confirmed labels: newest decision wins, confirms only."""
        overrides: dict[str, VideoLabel] = {}
        with self._lock:
            channel_ids = {cid for cid, _ in self._active}
        for channel_id in sorted(channel_ids):
            newest = self.decisions_for(channel_id)[0]
            label = _DECISION_LABELS.get(newest.decision)
            if label is not None:
                overrides[channel_id] = label
        return overrides

    def export_labels(self, path) -> int:
        """Write confirmed decisions as a ``channel_id,label`` CSV; returns row count."""
        overrides = self.channel_overrides()
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["channel_id", "label"])
            for channel_id in sorted(overrides):
                writer.writerow([channel_id, overrides[channel_id].value])
        return len(overrides)


def read_label_file(path) -> dict[str, VideoLabel]:
    """Read a ``channel_id,label`` CSV back into a channel-label mapping."""
    labels: dict[str, VideoLabel] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) < {"channel_id", "label"}:
            raise StoreError(f"{path}: expected header channel_id,label")
        for lineno, row in enumerate(reader, start=2):
            channel_id = row["channel_id"]
            if channel_id in labels:
                raise StoreError(f"{path}:{lineno}: duplicate channel {channel_id!r}")
            try:
                labels[channel_id] = VideoLabel(row["label"])
            except ValueError as exc:
                raise StoreError(f"{path}:{lineno}: {exc}") from exc
    return labels
