"""
Pydantic v2 wire models for the planner stages.
The remote planner speaks exactly these shapes; the template planner builds
them in-process so both paths share validation.
"""

from __future__ import annotations
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .scene import SceneConfig


class PlannerStage(str, Enum):
    EXPAND = "expand"
    DECOMPOSE = "decompose"


class SubtaskKind(str, Enum):
    """BDDL activity category of a subtask; selects its predicates and flow template."""
    OPEN = "open"
    CLOSE = "close"
    PICK_UP = "pick_up"
    PUT_INTO = "put_into"
    PUT_ON = "put_on"


# ─── Requests ─────────────────────────────────────────────────────────────────

class SceneObjectSummary(BaseModel):
    id: str
    category: str
    object_class: str = Field(alias="class")
    pos: tuple[float, float, float]
    articulated: bool = False

    model_config = ConfigDict(populate_by_name=True)


class SceneSummary(BaseModel):
    scene_id: str
    objects: list[SceneObjectSummary]

    @classmethod
    def of(cls, scene: SceneConfig, classes: dict[str, str]) -> "SceneSummary":
        return cls(
            scene_id=scene.scene_id,
            objects=[
                SceneObjectSummary(
                    id=o.id, category=o.category, object_class=classes[o.id],
                    pos=o.pos, articulated=o.articulation is not None,
                )
                for o in scene.objects
            ],
        )


class PlannerRequest(BaseModel):
    stage: PlannerStage
    keyword: str
    scene: SceneSummary
    prior: Optional[dict[str, Any]] = None

    def to_wire(self) -> dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)


# ─── Responses ────────────────────────────────────────────────────────────────

class ExpandResponse(BaseModel):
    task_activity_name: str
    task_detail_message: str

    @field_validator("task_activity_name", "task_detail_message")
    @classmethod
    def _non_empty(cls, v: str) -> str:
        v = v.strip()
        if not v:
            raise ValueError("must be non-empty")
        return v


class SubtaskConfig(BaseModel):
    name: str
    description: str
    target_id: Optional[str] = None
    support_init_id: Optional[str] = None
    support_goal_id: Optional[str] = None
    bddl_category: SubtaskKind

    @field_validator("target_id", "support_init_id", "support_goal_id")
    @classmethod
    def _blank_is_none(cls, v: Optional[str]) -> Optional[str]:
        if v is None:
            return None
        v = v.strip().lower()
        return v or None


class DecomposeResponse(BaseModel):
    subtasks: list[SubtaskConfig]
