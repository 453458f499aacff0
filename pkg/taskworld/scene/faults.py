"""
Fault-injection hooks for benchmark scenarios.
Each hook rewrites a validated SceneConfig so a known failure narrative
reproduces deterministically. Hook values are `true` (every eligible object)
or an object id (only that object).
"""

from __future__ import annotations
import logging
from typing import Callable, Union

from ..core.errors import InvalidParamError, UnknownObjectError
from ..models.scene import ObjectClass, ObjectSpec, SceneConfig
from ..world.geometry import Box, axis_normal, face_point
from .classify import classify_object, is_container

log = logging.getLogger(__name__)

FaultValue = Union[bool, str]

DOOR_BLOCK_DEPTH = 0.5     # m the blocking door leaf reaches out from the front face
HINGE_GAP = 0.05           # m between the handle and the blocking half
DEEP_SHELF_WALL = 0.2
STIFF_DOOR_THRESHOLD = 0.5
RIM_WALL = 0.2


def _door_blocks_path(obj: ObjectSpec) -> ObjectSpec:
    art = obj.articulation
    box = Box.around(obj.pos, obj.bbox)
    nx, ny = axis_normal(obj.yaw)
    handle = art.handle or face_point(box, (nx, ny))
    z0, z1 = box.lo[2], box.hi[2]
    if nx:
        x_face = box.hi[0] if nx > 0 else box.lo[0]
        xs = sorted((x_face, x_face + nx * DOOR_BLOCK_DEPTH))
        ys = (handle[1] + HINGE_GAP, box.hi[1])
    else:
        y_face = box.hi[1] if ny > 0 else box.lo[1]
        ys = tuple(sorted((y_face, y_face + ny * DOOR_BLOCK_DEPTH)))
        xs = (handle[0] + HINGE_GAP, box.hi[0])
    swept = ((xs[0], ys[0], z0), (xs[1], ys[1], z1))
    return obj.model_copy(update={"articulation": art.model_copy(update={"swept_box": swept})})


def _deep_shelf(obj: ObjectSpec) -> ObjectSpec:
    return obj.model_copy(update={"wall": DEEP_SHELF_WALL})


def _stiff_door(obj: ObjectSpec) -> ObjectSpec:
    return obj.model_copy(update={"articulation": obj.articulation.model_copy(update={"open_threshold": STIFF_DOOR_THRESHOLD})})


def _rim_offset(obj: ObjectSpec) -> ObjectSpec:
    return obj.model_copy(update={"wall": RIM_WALL})


def _weld(obj: ObjectSpec) -> ObjectSpec:
    return obj.model_copy(update={"welded": True})


def _articulated(obj: ObjectSpec) -> bool:
    return obj.articulation is not None


def _open_top(obj: ObjectSpec) -> bool:
    return classify_object(obj) == ObjectClass.MANIPULABLE and is_container(obj)


def _manipulable(obj: ObjectSpec) -> bool:
    return classify_object(obj) == ObjectClass.MANIPULABLE


# name -> (eligibility, rewrite)
FAULT_HOOKS: dict[str, tuple[Callable[[ObjectSpec], bool], Callable[[ObjectSpec], ObjectSpec]]] = {
    "door_swept_volume_blocks_path": (_articulated, _door_blocks_path),
    "deep_shelf": (_articulated, _deep_shelf),
    "stiff_door": (_articulated, _stiff_door),
    "rim_offset": (_open_top, _rim_offset),
    "welded_target": (_manipulable, _weld),
}


def apply_faults(scene: SceneConfig, faults: dict[str, FaultValue] | None) -> SceneConfig:
    if not faults:
        return scene
    objects = list(scene.objects)
    for name, value in faults.items():
        if name not in FAULT_HOOKS:
            raise InvalidParamError(f"unknown fault hook {name!r}; known: {sorted(FAULT_HOOKS)}")
        if value is False or value is None:
            continue
        eligible, rewrite = FAULT_HOOKS[name]
        if isinstance(value, str):
            if not scene.has(value.lower()):
                raise UnknownObjectError(f"fault {name!r} names {value!r}, which is not in scene {scene.scene_id!r}")
            picked = {value.lower()}
        else:
            picked = {o.id for o in objects if eligible(o)}
        objects = [rewrite(o) if o.id in picked else o for o in objects]
        log.info("Fault %s applied to %s", name, ", ".join(sorted(picked)) or "nothing")
    return scene.model_copy(update={"objects": objects})
