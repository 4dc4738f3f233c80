"""Newline-delimited JSON session logs.

One record per line, serialized with sorted keys and no whitespace so
identical sessions produce byte-identical files.  The first record is
a header carrying the full session configuration; the last is a
session_end record.  Input records follow the shape
{tick, player, action, payload}; view-sync records {tick, player, kind}.
"""

from __future__ import annotations

import json
from typing import Any, Dict, Iterable, Iterator, List, Optional

from .errors import MalformedLog

HEADER = "header"
INPUT = "input"
PLACEMENT = "placement"
LOCK_GRANT = "lock_grant"
LOCK_DENY = "lock_deny"
MOVE_SAMPLE = "move_sample"
UNDELIVERED = "undelivered"
SESSION_END = "session_end"

SYNC_KINDS = frozenset(
    ("full_sync", "interp_start", "freeze", "unfreeze", "spawn_secondary", "despawn_secondary")
)

INPUT_ACTIONS = frozenset(("select", "grab", "release", "teleport", "shuttle", "transfer"))


def _dump(record: Dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


class SessionLog:
    """Ordered event stream for one session."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.records: List[Dict[str, Any]] = []
        if config is not None:
            self.records.append({"kind": HEADER, "tick": 0, "config": config})

    def append(self, kind: str, tick: int, **fields: Any) -> None:
        rec = {"kind": kind, "tick": tick}
        rec.update(fields)
        self.records.append(rec)

    @property
    def config(self) -> Dict[str, Any]:
        return self.records[0]["config"]

    def of_kind(self, kind: str) -> Iterator[Dict[str, Any]]:
        return (r for r in self.records if r["kind"] == kind)

    def sync_events(self) -> Iterator[Dict[str, Any]]:
        return (r for r in self.records if r["kind"] in SYNC_KINDS)

    def to_ndjson(self) -> str:
        return "\n".join(_dump(r) for r in self.records) + "\n"

    @classmethod
    def from_ndjson(cls, text: str) -> "SessionLog":
        log = cls()
        for i, line in enumerate(text.splitlines()):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedLog(f"line {i + 1}: invalid JSON: {e}") from e
            if not isinstance(rec, dict):
                raise MalformedLog(f"line {i + 1}: record is not an object")
            if "kind" not in rec or "tick" not in rec:
                raise MalformedLog(f"line {i + 1}: record missing kind or tick")
            log.records.append(rec)
        if not log.records:
            raise MalformedLog("log is empty")
        if log.records[0]["kind"] != HEADER or "config" not in log.records[0]:
            raise MalformedLog("first record is not a config header")
        return log

    def validate_complete(self) -> None:
        if not self.records or self.records[0]["kind"] != HEADER:
            raise MalformedLog("missing header record")
        if self.records[-1]["kind"] != SESSION_END:
            raise MalformedLog("missing session_end record")


def load_log(path: str) -> SessionLog:
    with open(path, "r", encoding="utf-8") as f:
        return SessionLog.from_ndjson(f.read())


def save_log(log: SessionLog, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(log.to_ndjson())
