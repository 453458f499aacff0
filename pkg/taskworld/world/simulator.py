"""
Deterministic kinematic micro-simulator for the 21 atomic primitives.

Context-aware primitives (navigation, approach, converge) teleport to their
computed pose. Parameterised motions are swept: the robot volumes are sampled
every SWEEP_STEP metres (or SWEEP_TURN_STEP_DEG degrees) and tested against
the scene in one vectorised pass per obstacle configuration.
"""

from __future__ import annotations
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..config import defaults
from ..config.primitives import DEFAULT_ARTICULATION_RANGE
from ..core.errors import InvalidParamError
from ..models.actions import PrimitiveAction, PrimitiveKind
from ..models.scene import ObjectClass
from ..models.tasks import TaskContext
from .geometry import (
    AXIS_NORMALS,
    EPS,
    Box,
    Vec3,
    face_point,
    footprint_box,
    horizontal_distance,
    normalize_angle,
    overlap_matrix,
    rotate_xy,
    stack,
    to_base,
    to_world,
)
from .state import EventKind, ExecutionEvent, Gripper, WorldState

log = logging.getLogger(__name__)

BOUNDARY = "floor_boundary"

Pose = tuple[tuple[float, float, float], Vec3]   # (robot_base, arm)

_EEF_DIRECTIONS: dict[PrimitiveKind, Vec3] = {
    PrimitiveKind.MOVE_EEF_FORWARD: (1.0, 0.0, 0.0),
    PrimitiveKind.MOVE_EEF_BACKWARD: (-1.0, 0.0, 0.0),
    PrimitiveKind.MOVE_EEF_LEFT: (0.0, 1.0, 0.0),
    PrimitiveKind.MOVE_EEF_RIGHT: (0.0, -1.0, 0.0),
    PrimitiveKind.LIFT_EEF_UP: (0.0, 0.0, 1.0),
    PrimitiveKind.LIFT_EEF_DOWN: (0.0, 0.0, -1.0),
}

_BASE_DIRECTIONS: dict[PrimitiveKind, tuple[float, float]] = {
    PrimitiveKind.MOVE_BASE_FORWARD: (1.0, 0.0),
    PrimitiveKind.MOVE_BASE_BACKWARD: (-1.0, 0.0),
    PrimitiveKind.MOVE_BASE_LEFT: (0.0, 1.0),
    PrimitiveKind.MOVE_BASE_RIGHT: (0.0, -1.0),
}


# ─── Entry Point ──────────────────────────────────────────────────────────────

def execute_primitive(
    state: WorldState,
    action: PrimitiveAction,
    ctx: TaskContext | None = None,
) -> tuple[WorldState, list[ExecutionEvent]]:
    """
    Apply one primitive to a copy of `state`. Soft failures (collisions, empty
    grasps) are reported as events; only malformed input raises.
    """
    if not isinstance(action, PrimitiveAction):
        raise InvalidParamError(f"expected a PrimitiveAction, got {action!r}")
    ctx = ctx or state.context
    kind = action.kind
    object_id = ctx.resolve(kind.spec["needs"], kind)
    if object_id is not None:
        state.require(object_id)

    s = state.copy()
    s.context = ctx
    s.tick += kind.duration_ticks
    first_event = len(s.event_log)
    _HANDLERS[kind](s, action, object_id)
    return s, s.event_log[first_event:]


# ─── Poses ────────────────────────────────────────────────────────────────────

def _pose_clear(s: WorldState, x: float, y: float, heading: float) -> bool:
    fp = footprint_box(x, y, heading, s.robot.base_footprint, defaults.BASE_HEIGHT)
    w, h = s.scene.floor_extent
    if fp.lo[0] < -EPS or fp.lo[1] < -EPS or fp.hi[0] > w + EPS or fp.hi[1] > h + EPS:
        return False
    for oid in s.scene.object_ids:
        if oid == s.held_object:
            continue
        if fp.overlaps(s.box(oid)):
            return False
        door = s.door_box(oid)
        if door is not None and fp.overlaps(door):
            return False
    return True


def standoff_pose(s: WorldState, object_id: str, reference: tuple[float, float]) -> tuple[float, float, float]:
    """
    Base pose `standoff` in front of a face of the object, facing it. Articulated
    fixtures are always approached on their handle face; other objects on the
    collision-free face closest to `reference`.
    """
    box = s.box(object_id)
    art = s.articulation(object_id)
    gap = s.robot.standoff + s.robot.base_footprint[0] / 2
    normals = [s.front_normal(object_id)] if art is not None else list(AXIS_NORMALS)
    candidates = []
    for order, (nx, ny) in enumerate(normals):
        fx, fy, _ = face_point(box, (nx, ny))
        if art is not None:
            hx, hy, _ = s.grasp_point(object_id)
            fx, fy = (fx, hy) if nx else (hx, fy)
        x, y = fx + nx * gap, fy + ny * gap
        heading = math.atan2(-ny + 0.0, -nx + 0.0)
        blocked = not _pose_clear(s, x, y, heading)
        dist = round(math.hypot(x - reference[0], y - reference[1]), 9)
        candidates.append((blocked, dist, order, (x, y, heading)))
    return min(candidates)[3]


def place_at_standoff(state: WorldState, object_id: str) -> WorldState:
    """Initial robot placement: the standoff of `object_id` nearest the scene's robot start."""
    s = state.copy()
    start = s.scene.start_pose()
    s.robot_base = standoff_pose(s, object_id, start.pos)
    s.arm = s.robot.carry_offset
    _sync_held(s)
    return s


def _clamp_arm(s: WorldState, arm: Vec3) -> Vec3:
    fwd, left, up = arm
    fwd = max(fwd, defaults.EEF_MIN_FORWARD)
    reach = math.hypot(fwd, left)
    if reach > s.robot.eef_reach:
        k = s.robot.eef_reach / reach
        fwd, left = fwd * k, left * k
    up = min(max(up, defaults.EEF_MIN_HEIGHT), defaults.EEF_MAX_HEIGHT)
    return (fwd, left, up)


def _sync_held(s: WorldState) -> None:
    if s.held_object is None:
        return
    ex, ey, ez = s.eef
    ox, oy, oz = rotate_xy(s.held_offset, s.robot_base[2])
    _, yaw = s.object_poses[s.held_object]
    s.object_poses[s.held_object] = ((ex + ox, ey + oy, ez + oz), yaw)


def _release_handle(s: WorldState) -> None:
    if s.grasped_handle is not None:
        s.grasped_handle = None
        if s.held_object is None:
            s.gripper = Gripper.OPEN


# ─── Context-aware primitives ─────────────────────────────────────────────────

def _navigate(s: WorldState, a: PrimitiveAction, object_id: str) -> None:
    _release_handle(s)
    x, y, _ = s.robot_base
    s.robot_base = standoff_pose(s, object_id, (x, y))
    s.arm = s.robot.carry_offset
    _sync_held(s)
    s.emit(EventKind.NAV_ARRIVED, (object_id,), f"base arrived at the standoff of {object_id}")


def _reach_toward(s: WorldState, object_id: str, offset: float) -> None:
    gx, gy, gz = s.grasp_point(object_id)
    fx, fy = s.forward
    point = (gx - fx * offset, gy - fy * offset, gz)
    s.arm = _clamp_arm(s, to_base(s.robot_base, point))
    _sync_held(s)


def _approach(s: WorldState, a: PrimitiveAction, object_id: str) -> None:
    _reach_toward(s, object_id, defaults.APPROACH_OFFSET)


def _converge(s: WorldState, a: PrimitiveAction, object_id: str) -> None:
    _reach_toward(s, object_id, s.robot.converge_offset)


def _grasp(s: WorldState, a: PrimitiveAction, object_id: str) -> None:
    s.gripper = Gripper.CLOSED
    if object_id in (s.held_object, s.grasped_handle):
        return
    if s.held_object is not None or s.grasped_handle is not None:
        s.emit(EventKind.GRASP_EMPTY, (object_id,), "gripper already occupied")
        return

    tool = s.tool_point
    gp = s.grasp_point(object_id)
    horizontal = horizontal_distance(tool, gp)
    vertical = abs(tool[2] - gp[2])
    spec = s.require(object_id)

    if spec.articulation is not None:
        if horizontal <= defaults.GRASP_TOLERANCE and vertical <= defaults.GRASP_VERTICAL_TOLERANCE:
            s.grasped_handle = object_id
            return
        s.emit(EventKind.GRASP_EMPTY, (object_id,),
               f"fingers closed {horizontal:.2f} m from the handle of {object_id}")
        return
    if s.classes[object_id] == ObjectClass.FIXTURE:
        s.emit(EventKind.GRASP_EMPTY, (object_id,), f"{object_id} is a fixture without a handle")
        return

    ex, ey, ez = s.extents[object_id]
    if horizontal > defaults.GRASP_TOLERANCE or vertical > ez / 2 + defaults.GRASP_VERTICAL_TOLERANCE:
        s.emit(EventKind.GRASP_EMPTY, (object_id,),
               f"grasped air {horizontal:.2f} m from {object_id}")
    elif min(ex, ey) > s.robot.gripper_max_width:
        s.emit(EventKind.GRASP_EMPTY, (object_id,),
               f"{object_id} is {min(ex, ey):.3f} m wide, wider than the gripper")
    elif spec.welded:
        s.emit(EventKind.GRASP_EMPTY, (object_id,), f"{object_id} does not come free of its support")
    else:
        s.held_object = object_id
        s.held_offset = to_base(s.robot_base, s.position(object_id))
        eef_base = to_base(s.robot_base, s.eef)
        s.held_offset = tuple(o - e for o, e in zip(s.held_offset, eef_base))


def _ungrasp(s: WorldState, a: PrimitiveAction, object_id: Optional[str]) -> None:
    s.gripper = Gripper.OPEN
    s.grasped_handle = None
    if s.held_object is None:
        return
    held = s.held_object
    s.held_object = None
    s.held_offset = None
    _settle(s, held)


def _settle(s: WorldState, object_id: str) -> None:
    """Drop a released object onto the highest surface below it."""
    box = s.box(object_id)
    bottom = box.bottom
    cx, cy, _ = box.center
    surfaces = [0.0]
    for other in sorted(s.scene.object_ids):
        if other == object_id:
            continue
        ob = s.box(other)
        interior = s.interior(other)
        if interior is not None and interior.contains_xy(box):
            if s.is_container(other):
                floor = ob.bottom + defaults.CONTAINER_FLOOR
                if bottom >= floor - EPS:
                    surfaces.append(floor)
                continue
            if bottom < ob.top - EPS:
                if bottom >= interior.bottom - EPS:
                    surfaces.append(interior.bottom)
                continue
        if ob.covers_point_xy(cx, cy) and bottom >= ob.top - EPS:
            surfaces.append(ob.top)
    surface = max(z for z in surfaces if z <= bottom + EPS)
    (x, y, _), yaw = s.object_poses[object_id]
    s.object_poses[object_id] = ((x, y, surface + s.extents[object_id][2] / 2), yaw)
    fall = bottom - surface
    if fall > defaults.DROP_EVENT_HEIGHT:
        s.emit(EventKind.OBJECT_DROPPED, (object_id,), f"{object_id} fell {fall:.2f} m on release")


def _retreat(s: WorldState, a: PrimitiveAction, object_id: Optional[str]) -> None:
    _release_handle(s)
    s.arm = s.robot.carry_offset
    _sync_held(s)


# ─── Articulation ─────────────────────────────────────────────────────────────

def _articulate(s: WorldState, a: PrimitiveAction, object_id: Optional[str]) -> None:
    fixture = s.grasped_handle
    if fixture is None:
        log.debug("%s with no handle in the gripper at tick %d", a.kind.value, s.tick)
        return
    art = s.articulation(fixture)
    lo, hi = a.param if a.param is not None else DEFAULT_ARTICULATION_RANGE
    current = s.joint_fractions[fixture]
    if a.kind == PrimitiveKind.ARTICULATE_OPEN:
        new = max(current, hi)
    elif hi < art.open_threshold + defaults.CLOSE_AUTHORITY_MARGIN:
        # not enough sweep to seat the door: it stops short by the commanded span
        new = min(current, 1.0 - (hi - lo))
    else:
        new = min(current, lo)
    new = min(max(new, 0.0), 1.0)
    if new != current:
        s.joint_fractions[fixture] = new
        s.emit(EventKind.JOINT_MOVED, (fixture,), f"{fixture} joint {current:.2f} -> {new:.2f}")


# ─── Swept motions ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class _Obstacle:
    oid: str
    door: bool
    box: Box
    interior: Box | None = None    # open-top containers: region where only the floor blocks
    floor: float | None = None

    @property
    def key(self) -> tuple[str, bool]:
        return (self.oid, self.door)


def _boundary_boxes(s: WorldState) -> list[_Obstacle]:
    w, h = s.scene.floor_extent
    t, z = 1.0, defaults.EEF_MAX_HEIGHT + 1.0
    boxes = [
        Box((-t, -t, 0.0), (0.0, h + t, z)),
        Box((w, -t, 0.0), (w + t, h + t, z)),
        Box((-t, -t, 0.0), (w + t, 0.0, z)),
        Box((-t, h, 0.0), (w + t, h + t, z)),
    ]
    return [_Obstacle(BOUNDARY, False, b) for b in boxes]


def _obstacles(s: WorldState, disturbed: set[str]) -> dict[str, list[_Obstacle]]:
    """Obstacles per robot volume. Arm volumes pass open fixtures and the grasped one."""
    base: list[_Obstacle] = _boundary_boxes(s)
    arm: list[_Obstacle] = []
    for oid in sorted(s.scene.object_ids):
        if oid == s.held_object:
            continue
        body = s.box(oid)
        base.append(_Obstacle(oid, False, body))
        door = s.door_box(oid)
        if door is not None and oid not in disturbed:
            base.append(_Obstacle(oid, True, door))
            if oid != s.grasped_handle:
                arm.append(_Obstacle(oid, True, door))
        if oid == s.grasped_handle or s.is_open(oid):
            continue
        if s.is_container(oid):
            arm.append(_Obstacle(oid, False, body, s.interior(oid), body.bottom + defaults.CONTAINER_FLOOR))
        else:
            arm.append(_Obstacle(oid, False, body))
    return {"base": base, "eef": arm, "held": arm}


def _volumes(s: WorldState, poses: list[Pose]) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    bases = np.array([p[0] for p in poses], dtype=float)
    arms = np.array([p[1] for p in poses], dtype=float)
    x, y, h = bases[:, 0], bases[:, 1], bases[:, 2]
    c, sn = np.cos(h), np.sin(h)

    length, width = s.robot.base_footprint
    hx = np.abs(c) * length / 2 + np.abs(sn) * width / 2
    hy = np.abs(sn) * length / 2 + np.abs(c) * width / 2
    zeros = np.zeros_like(x)
    vols = {
        "base": (
            np.stack([x - hx, y - hy, zeros], axis=1),
            np.stack([x + hx, y + hy, zeros + defaults.BASE_HEIGHT], axis=1),
        )
    }

    fwd, left, up = arms[:, 0], arms[:, 1], arms[:, 2]
    eef = np.stack([x + fwd * c - left * sn, y + fwd * sn + left * c, up], axis=1)
    half = defaults.EEF_SIZE / 2
    vols["eef"] = (eef - half, eef + half)

    if s.held_object is not None:
        of, ol, ou = s.held_offset
        center = eef + np.stack([of * c - ol * sn, of * sn + ol * c, zeros + ou], axis=1)
        ext = np.array(s.extents[s.held_object], dtype=float) / 2
        vols["held"] = (center - ext, center + ext)
    return vols


def _hits(vol: tuple[np.ndarray, np.ndarray], obstacles: list[_Obstacle]) -> np.ndarray:
    lo, hi = vol
    full = overlap_matrix(lo, hi, *stack([o.box for o in obstacles]))
    containers = [j for j, o in enumerate(obstacles) if o.interior is not None]
    if not containers:
        return full
    inner = [obstacles[j] for j in containers]
    ilo, ihi = stack([o.interior for o in inner])
    in_xy = np.all(
        (lo[:, None, :2] >= ilo[None, :, :2] - EPS) & (hi[:, None, :2] <= ihi[None, :, :2] + EPS), axis=2
    )
    slabs = [o.box.with_top(o.floor) for o in inner]
    slab_hits = overlap_matrix(lo, hi, *stack(slabs))
    full[:, containers] = np.where(in_xy, slab_hits, full[:, containers])
    return full


def _effective_top(o: _Obstacle, lo: np.ndarray, hi: np.ndarray) -> float:
    if o.interior is not None:
        i = o.interior
        if lo[0] >= i.lo[0] - EPS and hi[0] <= i.hi[0] + EPS and lo[1] >= i.lo[1] - EPS and hi[1] <= i.hi[1] + EPS:
            return o.floor
    return o.box.top


def _disturb(s: WorldState, fixture: str, role: str, kind: PrimitiveKind) -> None:
    before = s.joint_fractions[fixture]
    after = max(0.0, before - defaults.DOOR_DISTURBANCE_DELTA)
    s.joint_fractions[fixture] = after
    who = "base" if role == "base" else "arm"
    s.emit(EventKind.COLLISION, (fixture,), f"robot {who} struck the swinging part of {fixture} during {kind.value}")
    s.emit(EventKind.DOOR_DISTURBED, (fixture,), f"{fixture} swung from {before:.2f} to {after:.2f}")


def _sweep(s: WorldState, poses: list[Pose], kind: PrimitiveKind) -> None:
    """
    Advance along `poses`, stopping one sample before any new contact.
    Door strikes do not stop the motion; each fixture is disturbed at most
    once per primitive and passability is recomputed afterwards. Contacts
    present at the first sample are ignored.
    """
    n = len(poses) - 1
    vols = _volumes(s, poses)
    disturbed: set[str] = set()
    ignored: set[tuple[str, tuple[str, bool]]] = set()
    k0, stop = 1, n

    while True:
        obstacles = _obstacles(s, disturbed)
        masks = {}
        for role, vol in vols.items():
            hits = _hits(vol, obstacles[role])
            ignored |= {(role, obstacles[role][j].key) for j in np.flatnonzero(hits[0])}
            keep = np.array([(role, o.key) not in ignored for o in obstacles[role]], dtype=bool)
            masks[role] = hits & keep[None, :] if len(keep) else hits

        first = n + 1
        for mask in masks.values():
            rows = np.flatnonzero(mask[k0:].any(axis=1)) if mask.size else []
            if len(rows):
                first = min(first, k0 + int(rows[0]))
        if first > n:
            stop = n
            break

        found = [
            (role, obstacles[role][j])
            for role, mask in masks.items()
            for j in np.flatnonzero(mask[first])
        ]
        doors = [(role, o) for role, o in found if o.door]
        if doors:
            for role, o in doors:
                if o.oid not in disturbed:
                    disturbed.add(o.oid)
                    _disturb(s, o.oid, role, kind)
            k0 = first
            continue

        stop = first - 1
        touchdown = kind == PrimitiveKind.LIFT_EEF_DOWN and all(
            role == "held"
            and _effective_top(o, vols["held"][0][stop], vols["held"][1][stop]) <= vols["held"][0][stop][2] + EPS
            for role, o in found
        )
        if not touchdown:
            role, o = found[0]
            s.emit(EventKind.COLLISION, (o.oid,) if o.oid != BOUNDARY else (),
                   f"robot {role} contacted {o.oid} during {kind.value}")
        break

    s.robot_base, s.arm = poses[stop]
    _sync_held(s)


def _samples(count_of: float, step: float) -> int:
    return max(1, math.ceil(abs(count_of) / step - 1e-9))


def _move_eef(s: WorldState, a: PrimitiveAction, object_id: Optional[str]) -> None:
    d = _EEF_DIRECTIONS[a.kind]
    start = s.arm
    goal = _clamp_arm(s, tuple(x + u * a.param for x, u in zip(start, d)))
    n = _samples(math.dist(start, goal), defaults.SWEEP_STEP)
    poses = [
        (s.robot_base, tuple(x0 + (x1 - x0) * (k / n) for x0, x1 in zip(start, goal)))
        for k in range(n + 1)
    ]
    _sweep(s, poses, a.kind)


def _move_base(s: WorldState, a: PrimitiveAction, object_id: Optional[str]) -> None:
    fwd, left = _BASE_DIRECTIONS[a.kind]
    x, y, heading = s.robot_base
    dx, dy, _ = rotate_xy((fwd * a.param, left * a.param, 0.0), heading)
    n = _samples(a.param, defaults.SWEEP_STEP)
    poses = [((x + dx * (k / n), y + dy * (k / n), heading), s.arm) for k in range(n + 1)]
    _sweep(s, poses, a.kind)


def _turn(s: WorldState, a: PrimitiveAction, object_id: Optional[str]) -> None:
    sign = 1.0 if a.kind == PrimitiveKind.TURN_BASE_LEFT else -1.0
    x, y, heading = s.robot_base
    delta = math.radians(sign * a.param)
    n = _samples(a.param, defaults.SWEEP_TURN_STEP_DEG)
    poses = [((x, y, heading + delta * (k / n)), s.arm) for k in range(n + 1)]
    _sweep(s, poses, a.kind)
    bx, by, bh = s.robot_base
    s.robot_base = (bx, by, normalize_angle(bh))
    _sync_held(s)


_Handler = Callable[[WorldState, PrimitiveAction, Optional[str]], None]

_HANDLERS: dict[PrimitiveKind, _Handler] = {
    PrimitiveKind.NAVIGATE_TO_TARGET: _navigate,
    PrimitiveKind.NAVIGATE_TO_SUPPORT: _navigate,
    PrimitiveKind.APPROACH: _approach,
    PrimitiveKind.CONVERGE: _converge,
    PrimitiveKind.GRASP: _grasp,
    PrimitiveKind.UNGRASP: _ungrasp,
    PrimitiveKind.RETREAT: _retreat,
    PrimitiveKind.ARTICULATE_OPEN: _articulate,
    PrimitiveKind.ARTICULATE_CLOSE: _articulate,
    PrimitiveKind.TURN_BASE_LEFT: _turn,
    PrimitiveKind.TURN_BASE_RIGHT: _turn,
    **{k: _move_eef for k in _EEF_DIRECTIONS},
    **{k: _move_base for k in _BASE_DIRECTIONS},
}
