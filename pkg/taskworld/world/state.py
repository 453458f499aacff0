"""
Global world state for one episode.
A WorldState is treated as a value: simulator operations copy it, mutate the
copy and hand it back, so snapshots in a trace never alias each other.
"""

from __future__ import annotations
import copy
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from ..config import defaults
from ..core.errors import UnknownObjectError
from ..models.scene import ArticulationSpec, ObjectClass, ObjectSpec, RobotConfig, SceneConfig
from ..models.tasks import TaskContext
from ..scene.classify import classify_object, is_container
from .geometry import Box, Vec3, axis_normal, face_point, to_world, heading_vectors


class Gripper(str, Enum):
    OPEN = "Open"
    CLOSED = "Closed"


class EventKind(str, Enum):
    COLLISION = "Collision"
    DOOR_DISTURBED = "DoorDisturbed"
    GRASP_EMPTY = "GraspEmpty"
    OBJECT_DROPPED = "ObjectDropped"
    NAV_ARRIVED = "NavArrived"
    JOINT_MOVED = "JointMoved"
    TRANSFER = "Transfer"


@dataclass(frozen=True)
class ExecutionEvent:
    tick: int
    kind: EventKind
    subjects: tuple[str, ...] = ()
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"tick": self.tick, "kind": self.kind.value, "subjects": list(self.subjects), "detail": self.detail}

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ExecutionEvent":
        return cls(int(raw["tick"]), EventKind(raw["kind"]), tuple(raw.get("subjects", ())), raw.get("detail", ""))


@dataclass
class WorldState:
    scene: SceneConfig
    robot: RobotConfig
    classes: dict[str, ObjectClass]
    scales: dict[str, float]
    extents: dict[str, Vec3]
    object_poses: dict[str, tuple[Vec3, float]]
    joint_fractions: dict[str, float]
    robot_base: tuple[float, float, float]
    arm: Vec3
    gripper: Gripper = Gripper.OPEN
    held_object: Optional[str] = None
    held_offset: Optional[Vec3] = None
    grasped_handle: Optional[str] = None
    tick: int = 0
    event_log: list[ExecutionEvent] = field(default_factory=list)
    context: TaskContext = field(default_factory=TaskContext)

    # ── Construction ──────────────────────────────────────────────────────────

    @classmethod
    def initial(
        cls,
        scene: SceneConfig,
        robot: RobotConfig | None = None,
        scales: dict[str, float] | None = None,
        context: TaskContext | None = None,
    ) -> "WorldState":
        """
        Materialise a scene. Scale factors shrink an object uniformly about
        its bottom centre so it keeps resting on whatever supported it.
        """
        robot = robot or RobotConfig()
        scales = {k: float(v) for k, v in (scales or {}).items()}
        classes, extents, poses, joints = {}, {}, {}, {}
        for obj in scene.objects:
            classes[obj.id] = classify_object(obj)
            s = scales.get(obj.id, 1.0)
            ex = tuple(e * s for e in obj.bbox)
            bottom = obj.pos[2] - obj.bbox[2] / 2
            extents[obj.id] = ex
            poses[obj.id] = ((obj.pos[0], obj.pos[1], bottom + ex[2] / 2), obj.yaw)
            if obj.articulation is not None:
                joints[obj.id] = obj.articulation.fraction
        start = scene.start_pose()
        return cls(
            scene=scene,
            robot=robot,
            classes=classes,
            scales={oid: scales.get(oid, 1.0) for oid in scene.object_ids},
            extents=extents,
            object_poses=poses,
            joint_fractions=joints,
            robot_base=(start.pos[0], start.pos[1], start.yaw),
            arm=robot.carry_offset,
            context=context or TaskContext(),
        )

    def copy(self) -> "WorldState":
        clone = copy.copy(self)
        clone.classes = self.classes
        clone.scales = dict(self.scales)
        clone.extents = dict(self.extents)
        clone.object_poses = dict(self.object_poses)
        clone.joint_fractions = dict(self.joint_fractions)
        clone.event_log = list(self.event_log)
        return clone

    # ── Lookups ───────────────────────────────────────────────────────────────

    def require(self, object_id: str) -> ObjectSpec:
        if object_id not in self.extents:
            raise UnknownObjectError(f"object {object_id!r} not in scene {self.scene.scene_id!r}")
        return self.scene.get(object_id)

    def box(self, object_id: str) -> Box:
        self.require(object_id)
        return Box.around(self.object_poses[object_id][0], self.extents[object_id])

    def position(self, object_id: str) -> Vec3:
        self.require(object_id)
        return self.object_poses[object_id][0]

    def articulation(self, object_id: str) -> ArticulationSpec | None:
        return self.require(object_id).articulation

    def is_open(self, object_id: str) -> bool:
        art = self.articulation(object_id)
        return art is not None and self.joint_fractions[object_id] >= art.open_threshold

    def door_box(self, object_id: str) -> Box | None:
        """Swept volume of the moving part while it is off its closed stop."""
        art = self.articulation(object_id)
        if art is None or self.joint_fractions[object_id] <= 0.0:
            return None
        return Box(tuple(art.swept_box[0]), tuple(art.swept_box[1]))

    def is_container(self, object_id: str) -> bool:
        return self.classes[object_id] == ObjectClass.MANIPULABLE and is_container(self.require(object_id))

    def interior(self, object_id: str) -> Box | None:
        """
        Receiving volume: articulated or walled fixtures shrink on every side,
        open-top containers only horizontally. Anything else has none.
        """
        spec = self.require(object_id)
        box = self.box(object_id)
        if self.classes[object_id] == ObjectClass.FIXTURE:
            if spec.articulation is None and spec.wall is None:
                return None
            wall = spec.wall if spec.wall is not None else defaults.FIXTURE_WALL
            return box.shrink(wall, vertical=True)
        if self.is_container(object_id):
            return box.shrink(spec.wall or 0.0, vertical=False)
        return None

    def front_normal(self, object_id: str) -> tuple[float, float]:
        return axis_normal(self.object_poses[object_id][1])

    def grasp_point(self, object_id: str) -> Vec3:
        """Handle of an articulated fixture, centroid of anything else."""
        art = self.articulation(object_id)
        if art is None:
            return self.position(object_id)
        if art.handle is not None:
            return tuple(art.handle)
        return face_point(self.box(object_id), self.front_normal(object_id))

    # ── Robot frames ──────────────────────────────────────────────────────────

    @property
    def eef(self) -> Vec3:
        return to_world(self.robot_base, self.arm)

    @property
    def forward(self) -> tuple[float, float]:
        return heading_vectors(self.robot_base[2])[0]

    @property
    def tool_point(self) -> Vec3:
        """Fingertip centre, converge_offset ahead of the wrist along the heading."""
        x, y, z = self.eef
        fx, fy = self.forward
        d = self.robot.converge_offset
        return (x + fx * d, y + fy * d, z)

    def emit(self, kind: EventKind, subjects: tuple[str, ...] = (), detail: str = "") -> ExecutionEvent:
        event = ExecutionEvent(self.tick, kind, subjects, detail)
        self.event_log.append(event)
        return event
