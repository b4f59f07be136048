"""JSONL run log with one event per line."""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

SCHEMA_VERSION = "run_log_event.v0"
EVENTS = (
    "run_started",
    "config_loaded",
    "experiment_finished",
    "result_written",
    "run_failed",
)


@dataclass
class RunLog:
    """Append-only JSONL log; the only place timestamps and wall-clock times go."""

    path: Path

    def emit(self, event: str, payload: dict[str, Any]) -> None:
        if event not in EVENTS:
            raise ValueError(f"unknown run log event: {event}")
        record = {
            "schema_version": SCHEMA_VERSION,
            "ts": datetime.now(timezone.utc).isoformat(),
            "event": event,
            "payload": payload,
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as f:
            f.write(
                json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
            )
            f.write("\n")

    def read(self) -> list[dict[str, Any]]:
        if not self.path.exists():
            return []
        lines = self.path.read_text(encoding="utf-8").splitlines()
        return [json.loads(line) for line in lines if line.strip()]
