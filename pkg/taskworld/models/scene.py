"""
Pydantic schemas for declarative scene files and the robot model.
Field-level checks live here; cross-object invariants (unique ids, floor
bounds, class/articulation consistency) are checked by scene.loader so each
violation can be reported with its own field path.
"""

from __future__ import annotations
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config import defaults
from ..core.errors import UnknownObjectError

Vec2 = tuple[float, float]
Vec3 = tuple[float, float, float]


class ObjectClass(str, Enum):
    FIXTURE = "A"        # fixed or articulated fixture
    MANIPULABLE = "B"    # graspable item


class JointKind(str, Enum):
    REVOLUTE = "revolute"
    PRISMATIC = "prismatic"


# ─── Scene Objects ────────────────────────────────────────────────────────────

class ArticulationSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: JointKind
    fraction: float = Field(ge=0.0, le=1.0, description="0 = fully closed")
    swept_box: tuple[Vec3, Vec3] = Field(description="World-frame box occupied by the moving part when fraction > 0")
    open_threshold: float = Field(gt=0.0, lt=1.0)
    handle: Optional[Vec3] = Field(default=None, description="Grasp point; default is the front-face centre")
    command_range: Optional[Vec2] = Field(default=None, description="Sweep range used by planned articulate actions")
    retreat_clearance: bool = Field(default=False, description="Arm must withdraw after opening")

    @field_validator("swept_box")
    @classmethod
    def _ordered_box(cls, v: tuple[Vec3, Vec3]) -> tuple[Vec3, Vec3]:
        lo, hi = v
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("swept_box corners must be ordered [[x0,y0,z0],[x1,y1,z1]] with x0<=x1 etc.")
        return v

    @field_validator("command_range")
    @classmethod
    def _unit_range(cls, v: Optional[Vec2]) -> Optional[Vec2]:
        if v is not None and not (0.0 <= v[0] <= v[1] <= 1.0):
            raise ValueError("command_range must satisfy 0 <= min <= max <= 1")
        return v


class ObjectSpec(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    id: str
    category: str
    object_class: Optional[ObjectClass] = Field(default=None, alias="class")
    bbox: Vec3 = Field(description="Extents (x, y, z) in meters")
    pos: Vec3 = Field(description="Bounding-box centre in world frame")
    yaw: float = 0.0
    room: str = ""
    articulation: Optional[ArticulationSpec] = None
    wall: Optional[float] = Field(default=None, ge=0.0, description="Interior wall thickness")
    welded: bool = False

    @field_validator("id", "category", "room")
    @classmethod
    def _lower(cls, v: str) -> str:
        return v.strip().lower()

    @field_validator("bbox")
    @classmethod
    def _positive(cls, v: Vec3) -> Vec3:
        if any(e <= 0 for e in v):
            raise ValueError("bbox extents must be strictly positive")
        return v

    @property
    def d_min(self) -> float:
        return min(self.bbox[0], self.bbox[1])


class RoomSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    region: Optional[tuple[Vec2, Vec2]] = None

    @field_validator("name")
    @classmethod
    def _lower(cls, v: str) -> str:
        return v.strip().lower()


class RobotStart(BaseModel):
    model_config = ConfigDict(frozen=True)

    pos: Vec2
    yaw: float = 0.0


class SceneConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    scene_id: str
    floor_extent: Vec2
    rooms: list[RoomSpec] = Field(default_factory=list)
    objects: list[ObjectSpec]
    robot_start: Optional[RobotStart] = None

    @field_validator("rooms", mode="before")
    @classmethod
    def _room_strings(cls, v):
        return [{"name": r} if isinstance(r, str) else r for r in (v or [])]

    @field_validator("floor_extent")
    @classmethod
    def _floor_positive(cls, v: Vec2) -> Vec2:
        if v[0] <= 0 or v[1] <= 0:
            raise ValueError("floor_extent must be positive")
        return v

    # ── Lookups ───────────────────────────────────────────────────────────────

    def get(self, object_id: str) -> ObjectSpec:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise UnknownObjectError(f"object {object_id!r} not in scene {self.scene_id!r}")

    def has(self, object_id: str) -> bool:
        return any(obj.id == object_id for obj in self.objects)

    @property
    def object_ids(self) -> list[str]:
        return [obj.id for obj in self.objects]

    @property
    def room_names(self) -> list[str]:
        return [r.name for r in self.rooms]

    def room(self, name: str) -> RoomSpec:
        for r in self.rooms:
            if r.name == name:
                return r
        raise UnknownObjectError(f"room {name!r} not in scene {self.scene_id!r}")

    def start_pose(self) -> RobotStart:
        if self.robot_start is not None:
            return self.robot_start
        return RobotStart(pos=(self.floor_extent[0] / 2, self.floor_extent[1] / 2), yaw=0.0)


# ─── Robot ────────────────────────────────────────────────────────────────────

class RobotConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    scale: float = Field(default=defaults.ROBOT_SCALE, gt=0)
    gripper_max_width: float = Field(default=defaults.GRIPPER_MAX_WIDTH, gt=0)
    ideal_grasp_width: float = Field(default=defaults.IDEAL_GRASP_WIDTH, gt=0)
    base_footprint: Vec2 = defaults.BASE_FOOTPRINT
    eef_reach: float = Field(default=defaults.EEF_REACH, gt=0)

    @model_validator(mode="after")
    def _widths(self) -> "RobotConfig":
        if not (0 < self.ideal_grasp_width < self.gripper_max_width):
            raise ValueError("need 0 < ideal_grasp_width < gripper_max_width")
        return self

    @property
    def converge_offset(self) -> float:
        return defaults.CONVERGE_OFFSET_FACTOR * self.scale

    @property
    def standoff(self) -> float:
        return defaults.STANDOFF_FACTOR * self.scale

    @property
    def carry_offset(self) -> Vec3:
        return (defaults.CARRY_FORWARD_FACTOR * self.scale, 0.0, defaults.CARRY_HEIGHT)
