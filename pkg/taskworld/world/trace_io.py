"""
JSONL export of execution traces.
Line 1 is a header naming the scene, the subtask and the primitive table
version; each following line is one executed step.
"""

from __future__ import annotations
import json
import logging
from pathlib import Path
from typing import Any

from ..config.primitives import PRIMITIVE_TABLE_VERSION
from ..core.errors import PersistIOError
from ..evolve.codec import decode_action, encode_action
from .execution import ExecutionTrace
from .state import ExecutionEvent

log = logging.getLogger(__name__)

TRACE_FORMAT = "taskworld-trace"


def trace_lines(trace: ExecutionTrace) -> list[dict[str, Any]]:
    header = {
        "format": TRACE_FORMAT,
        "primitive_table": PRIMITIVE_TABLE_VERSION,
        "scene_id": trace.initial_state.scene.scene_id,
        "task": trace.task.name,
        "success": trace.success,
        "release_tick": trace.release_tick,
        "goal_tick": trace.goal_tick,
    }
    lines = [header]
    for step in trace.steps:
        lines.append({
            "step": step.index,
            "tick": step.end_tick,
            "action": encode_action(step.action),
            "events": [e.to_dict() for e in step.events],
            "predicates_changed": [p.to_bddl() for p in step.changed],
        })
    return lines


def export_trace(trace: ExecutionTrace, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as f:
            for line in trace_lines(trace):
                f.write(json.dumps(line) + "\n")
    except OSError as e:
        raise PersistIOError(f"cannot write trace {path}: {e}") from e
    log.info("Trace for %s written to %s", trace.task.name, path)
    return path


def load_trace(path: str | Path) -> tuple[dict[str, Any], list[dict[str, Any]]]:
    """Header plus steps with `action` decoded and `events` rebuilt."""
    path = Path(path)
    try:
        raw = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    except OSError as e:
        raise PersistIOError(f"cannot read trace {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise PersistIOError(f"{path}: malformed trace line: {e.msg}") from e
    if not raw or raw[0].get("format") != TRACE_FORMAT:
        raise PersistIOError(f"{path} is not a {TRACE_FORMAT} file")
    header, steps = raw[0], raw[1:]
    for i, step in enumerate(steps):
        step["action"] = decode_action(step["action"], i)
        step["events"] = [ExecutionEvent.from_dict(e) for e in step.get("events", [])]
    return header, steps
