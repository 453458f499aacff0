"""
Evolution log: one JSON line per iteration, in the shape
{"iter": 1, "new_sequence": [18, {"15": 0.3}, {"13": 0.45}, 5], "reason": "...", "success": false}.
"""

from __future__ import annotations
import json
import logging
from pathlib import Path
from typing import Any, Union

from pydantic import BaseModel, ValidationError

from ..core.errors import PersistIOError
from ..models.evolution import EvolutionHistory, EvolutionRecord
from .codec import encode_flow

log = logging.getLogger(__name__)


class LogEntry(BaseModel):
    iter: int
    new_sequence: list[Union[int, dict[str, Any]]]
    reason: str
    success: bool


def log_entry(record: EvolutionRecord) -> LogEntry:
    return LogEntry(
        iter=record.iteration,
        new_sequence=encode_flow(record.flow),
        reason=record.supervisor_reason,
        success=record.success,
    )


def history_lines(history: EvolutionHistory) -> list[str]:
    return [json.dumps(log_entry(r).model_dump(mode="json")) for r in history.records]


def write_log(history: EvolutionHistory, path: str | Path, *, append: bool = False) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a" if append else "w", encoding="utf-8") as f:
            for line in history_lines(history):
                f.write(line + "\n")
    except OSError as e:
        raise PersistIOError(f"cannot write evolution log {path}: {e}") from e
    log.info("Wrote %d iterations of %s to %s", len(history.records), history.subtask, path)
    return path


def read_log(path: str | Path) -> list[LogEntry]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise PersistIOError(f"cannot read evolution log {path}: {e}") from e
    entries = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            entries.append(LogEntry.model_validate_json(line))
        except ValidationError as e:
            raise PersistIOError(f"{path}:{n}: malformed log entry: {e.errors()[0]['msg']}") from e
    return entries
