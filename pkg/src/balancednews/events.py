"""Append-only session event logs.

Each session's history is a sequence of JSON records with a contiguous
``seq`` counter. The file-backed log writes one JSONL file per session;
a batch of records produced by a single mutation is serialized first
and written in one call, so a failing sink rejects the whole batch
before anything lands on disk.
"""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Protocol

from .errors import EventLogError

EVENT_KINDS = frozenset(
    {"created", "page_served", "click", "constraint_change", "no_click_advance"}
)


def make_event(
    session_id: str, seq: int, kind: str, t: int, payload: dict
) -> dict:
    if kind not in EVENT_KINDS:
        raise EventLogError(f"unknown event kind {kind!r}")
    return {
        "session_id": session_id,
        "seq": seq,
        "kind": kind,
        "t": t,
        "wall_time": datetime.now(timezone.utc).isoformat(),
        "payload": payload,
    }


class EventLog(Protocol):
    def append(self, session_id: str, records: Iterable[dict]) -> None: ...

    def read(self, session_id: str) -> list[dict]: ...

    def session_ids(self) -> list[str]: ...


class MemoryEventLog:
    """Keeps event records in process memory. Used by tests and the simulator."""

    def __init__(self) -> None:
        self._events: dict[str, list[dict]] = {}

    def append(self, session_id: str, records: Iterable[dict]) -> None:
        batch = [dict(record) for record in records]
        self._events.setdefault(session_id, []).extend(batch)

    def read(self, session_id: str) -> list[dict]:
        return [dict(record) for record in self._events.get(session_id, [])]

    def session_ids(self) -> list[str]:
        return sorted(self._events)


class FileEventLog:
    """One JSONL file per session under a base directory."""

    def __init__(self, directory: str | Path, fsync: bool = False):
        self._dir = Path(directory)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._fsync = fsync

    def path_for(self, session_id: str) -> Path:
        if not session_id or "/" in session_id or session_id.startswith("."):
            raise EventLogError(f"unusable session id {session_id!r}")
        return self._dir / f"{session_id}.jsonl"

    def append(self, session_id: str, records: Iterable[dict]) -> None:
        # Serialize the full batch before touching the file so encoding
        # errors cannot leave a half-written mutation behind.
        lines = "".join(
            json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n"
            for record in records
        )
        if not lines:
            return
        path = self.path_for(session_id)
        try:
            with open(path, "a", encoding="utf-8") as handle:
                handle.write(lines)
                handle.flush()
                if self._fsync:
                    os.fsync(handle.fileno())
        except OSError as exc:
            raise EventLogError(f"cannot append to {path}: {exc}") from exc

    def read(self, session_id: str) -> list[dict]:
        path = self.path_for(session_id)
        if not path.exists():
            return []
        records = []
        try:
            with open(path, "r", encoding="utf-8") as handle:
                for line_no, line in enumerate(handle, start=1):
                    if not line.strip():
                        continue
                    try:
                        records.append(json.loads(line))
                    except json.JSONDecodeError as exc:
                        raise EventLogError(
                            f"{path} line {line_no} is not valid JSON: {exc}"
                        ) from exc
        except OSError as exc:
            raise EventLogError(f"cannot read {path}: {exc}") from exc
        return records

    def session_ids(self) -> list[str]:
        return sorted(p.stem for p in self._dir.glob("*.jsonl"))
