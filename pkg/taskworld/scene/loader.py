"""
Scene file ingestion.
load_scene reads a UTF-8 JSON document, validates it field by field and
returns an immutable SceneConfig. serialize_scene is its exact inverse.
"""

from __future__ import annotations
import json
import logging
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ..core.errors import PersistIOError, SceneParseError, SceneValidationError
from ..models.scene import ObjectClass, SceneConfig
from .classify import classify_object

log = logging.getLogger(__name__)


def _field_path(loc: tuple) -> str:
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path or "<root>"


def validate_scene(scene: SceneConfig) -> list[tuple[str, str]]:
    """Cross-object invariants. Returns (field_path, message) pairs; empty when valid."""
    issues: list[tuple[str, str]] = []
    if not scene.objects:
        issues.append(("objects", "empty scene: at least one object is required"))

    seen: dict[str, int] = {}
    w, h = scene.floor_extent
    room_names = set(scene.room_names)
    for i, obj in enumerate(scene.objects):
        if obj.id in seen:
            issues.append((f"objects[{i}].id", f"duplicate id {obj.id!r} (first at objects[{seen[obj.id]}])"))
        else:
            seen[obj.id] = i

        x0, x1 = obj.pos[0] - obj.bbox[0] / 2, obj.pos[0] + obj.bbox[0] / 2
        y0, y1 = obj.pos[1] - obj.bbox[1] / 2, obj.pos[1] + obj.bbox[1] / 2
        if x0 < 0 or y0 < 0 or x1 > w or y1 > h:
            issues.append((f"objects[{i}].pos", f"bounding box of {obj.id!r} leaves floor_extent {w}x{h}"))

        if obj.articulation is not None and obj.object_class == ObjectClass.MANIPULABLE:
            issues.append((f"objects[{i}].articulation", f"{obj.id!r} is class B and cannot carry an articulation"))

        if obj.room and room_names and obj.room not in room_names:
            issues.append((f"objects[{i}].room", f"room {obj.room!r} is not declared in rooms"))

    if scene.robot_start is not None:
        sx, sy = scene.robot_start.pos
        if not (0 <= sx <= w and 0 <= sy <= h):
            issues.append(("robot_start.pos", "robot start lies outside floor_extent"))
    return issues


def _numbers(value: Any, n: int) -> list[float] | None:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        return None
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return None
    return [float(v) for v in value]


def _raw_issues(raw: dict, reported: set[str]) -> list[tuple[str, str]]:
    """
    Id and placement checks on a document pydantic rejected, so one report
    covers every issue. Entries that are themselves malformed are skipped.
    """
    issues: list[tuple[str, str]] = []
    objects = raw.get("objects")
    if not isinstance(objects, list):
        return issues
    extent = _numbers(raw.get("floor_extent"), 2)
    if "floor_extent" in reported or extent is None or min(extent) <= 0:
        extent = None

    seen: dict[str, int] = {}
    for i, obj in enumerate(objects):
        if not isinstance(obj, dict):
            continue
        if isinstance(obj.get("id"), str):
            oid = obj["id"].strip().lower()
            if oid in seen:
                issues.append((f"objects[{i}].id", f"duplicate id {oid!r} (first at objects[{seen[oid]}])"))
            else:
                seen[oid] = i
        if extent is None or any(p.startswith(f"objects[{i}].") for p in reported):
            continue
        pos, bbox = _numbers(obj.get("pos"), 3), _numbers(obj.get("bbox"), 3)
        if pos is None or bbox is None:
            continue
        w, h = extent
        if pos[0] - bbox[0] / 2 < 0 or pos[1] - bbox[1] / 2 < 0 or pos[0] + bbox[0] / 2 > w or pos[1] + bbox[1] / 2 > h:
            issues.append((f"objects[{i}].pos", f"bounding box of {obj.get('id')!r} leaves floor_extent {w}x{h}"))
    return [issue for issue in issues if issue[0] not in reported]


def parse_scene(raw: Any, source: str = "<memory>") -> SceneConfig:
    """Validate an already-decoded scene document."""
    if not isinstance(raw, dict):
        raise SceneParseError(f"{source}: scene document must be a JSON object")
    try:
        scene = SceneConfig.model_validate(raw)
    except ValidationError as e:
        issues = [(_field_path(err["loc"]), err["msg"]) for err in e.errors()]
        issues += _raw_issues(raw, {path for path, _ in issues})
        raise SceneValidationError(issues) from e

    issues = validate_scene(scene)
    if issues:
        raise SceneValidationError(issues)

    # Unknown categories fail here rather than at execution time.
    for obj in scene.objects:
        classified = classify_object(obj)
        if obj.articulation is not None and classified == ObjectClass.MANIPULABLE:
            idx = scene.object_ids.index(obj.id)
            raise SceneValidationError(
                [(f"objects[{idx}].articulation", f"{obj.id!r} classifies as class B and cannot carry an articulation")]
            )
    log.debug("Loaded scene %s with %d objects", scene.scene_id, len(scene.objects))
    return scene


def load_scene(path: str | Path) -> SceneConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SceneParseError(f"cannot read scene file {path}: {e}") from e
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneParseError(f"{path}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    return parse_scene(raw, str(path))


def serialize_scene(scene: SceneConfig) -> dict[str, Any]:
    """Full document with defaults materialised; parse_scene(serialize_scene(s)) == s."""
    return scene.model_dump(mode="json", by_alias=True)


def save_scene(scene: SceneConfig, path: str | Path) -> None:
    path = Path(path)
    try:
        path.write_text(json.dumps(serialize_scene(scene), indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise PersistIOError(f"cannot write scene file {path}: {e}") from e
