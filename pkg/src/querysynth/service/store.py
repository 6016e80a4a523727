"""In-memory session records with TTL eviction and optional JSON snapshots."""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..dsl.nodes import SearchSpec
from ..oracles import InconsistencyReport
from ..synthesis import SessionState
from ..transcript import state_to_transcript


@dataclass
class SessionRecord:
    id: str
    spec: SearchSpec
    mode: str
    state: SessionState
    display: dict | None
    target: tuple[int, ...] | None = None  # demo mode only
    inconsistency: InconsistencyReport | None = None
    attempted: tuple[tuple[int, ...], str] | None = None
    created: float = field(default_factory=time.time)
    last_activity: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def status(self) -> str:
        return "inconsistent" if self.inconsistency is not None else self.state.status


class SessionStore:
    def __init__(self, ttl_seconds: float = 86400.0, snapshot_dir: Path | str | None = None):
        self.ttl = ttl_seconds
        self.snapshot_dir = Path(snapshot_dir) if snapshot_dir else None
        if self.snapshot_dir:
            self.snapshot_dir.mkdir(parents=True, exist_ok=True)
        self._items: dict[str, SessionRecord] = {}
        self._lock = threading.Lock()

    def new_id(self) -> str:
        return secrets.token_urlsafe(12)

    def put(self, record: SessionRecord) -> None:
        with self._lock:
            self._items[record.id] = record
        self.snapshot(record)

    def get(self, session_id: str) -> SessionRecord | None:
        self.evict_expired()
        with self._lock:
            record = self._items.get(session_id)
        if record is not None:
            record.last_activity = time.time()
        return record

    def evict_expired(self) -> None:
        now = time.time()
        with self._lock:
            dead = [sid for sid, rec in self._items.items()
                    if now - rec.last_activity > self.ttl]
            for sid in dead:
                del self._items[sid]

    def snapshot(self, record: SessionRecord) -> None:
        if self.snapshot_dir is None:
            return
        doc = state_to_transcript(record.state, target=record.target)
        doc["session"] = {
            "id": record.id,
            "mode": record.mode,
            "status": record.status,
            "created": record.created,
        }
        path = self.snapshot_dir / f"{record.id}.json"
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
