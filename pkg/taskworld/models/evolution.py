"""
Self-evolution data types: critiques, per-iteration records and the
history buffer handed back to the supervisor on every iteration.
"""

from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..config import defaults
from ..core.errors import InvalidParamError, RepeatedProposalError
from .actions import ActionFlow


class View(str, Enum):
    GLOBAL = "Global"
    HEAD = "Head"
    WRIST = "Wrist"


class CritiqueFlag(str, Enum):
    COLLISION = "Collision"
    DOOR_DISTURBED = "DoorDisturbed"
    GRASP_EMPTY = "GraspEmpty"
    NOT_PLACED = "NotPlaced"
    NO_PROGRESS = "NoProgress"
    OK = "Ok"


class Outcome(str, Enum):
    SUCCEEDED = "Succeeded"
    EXHAUSTED = "ExhaustedBudget"


# ─── Configuration ────────────────────────────────────────────────────────────

class EvolutionConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    tau_max: int = Field(default=defaults.DEFAULT_TAU_MAX, ge=1)
    p1: int = Field(default=defaults.DEFAULT_P1, ge=0, description="Look-back window in steps")
    p2: int = Field(default=defaults.DEFAULT_P2, ge=1, description="Frame sampling period in ticks")
    max_frames_per_action: int = Field(default=defaults.MAX_FRAMES_PER_ACTION, ge=1)
    views: tuple[View, ...] = (View.GLOBAL, View.HEAD)
    raster: bool = False

    @field_validator("views", mode="before")
    @classmethod
    def _views(cls, v):
        if isinstance(v, str):
            v = [s for s in v.split(",") if s.strip()]
        items = []
        for s in v:
            view = View(s.strip().capitalize()) if isinstance(s, str) else View(s)
            if view not in items:
                items.append(view)
        if not items:
            raise ValueError("at least one view is required")
        return tuple(items)


# ─── Critiques ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Critique:
    """One inspector observation. `step_index` is 1-based; `frames` is the count the inspector saw."""
    step_index: int
    text: str
    flags: frozenset[CritiqueFlag]
    frames: int = 0

    def __post_init__(self) -> None:
        flags = frozenset(CritiqueFlag(f) for f in self.flags)
        if not flags:
            raise InvalidParamError(f"critique for step {self.step_index} carries no flags")
        if CritiqueFlag.OK in flags and len(flags) > 1:
            raise InvalidParamError(f"critique for step {self.step_index} mixes Ok with failure flags")
        object.__setattr__(self, "flags", flags)

    @property
    def ok(self) -> bool:
        return self.flags == {CritiqueFlag.OK}

    @property
    def key(self) -> str:
        return f"Step {self.step_index - 1} observation ({self.frames} frames)"

    def sorted_flags(self) -> list[str]:
        return sorted(f.value for f in self.flags)


# ─── History ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class EvolutionRecord:
    iteration: int
    flow: ActionFlow
    critiques: tuple[Critique, ...]
    supervisor_reason: str
    success: bool


@dataclass
class EvolutionHistory:
    """
    Ordered (policy, critique) records for one subtask. Iteration 0 is the
    initial plan. Appending enforces the budget and the no-repeat rule.
    """
    subtask: str
    tau_max: int = defaults.DEFAULT_TAU_MAX
    records: list[EvolutionRecord] = field(default_factory=list)
    outcome: Optional[Outcome] = None

    def append(self, record: EvolutionRecord) -> None:
        if self.records and record.iteration <= self.records[-1].iteration:
            raise InvalidParamError(
                f"iteration {record.iteration} does not follow {self.records[-1].iteration}"
            )
        if record.flow in self.seen_flows():
            raise RepeatedProposalError(
                f"flow for iteration {record.iteration} of {self.subtask!r} repeats an earlier policy"
            )
        if len(self.records) >= self.tau_max + 1:
            raise InvalidParamError(f"history for {self.subtask!r} already holds tau_max + 1 records")
        self.records.append(record)

    def seen_flows(self) -> set[ActionFlow]:
        return {r.flow for r in self.records}

    @property
    def iterations_used(self) -> int:
        """Evolution iterations after the initial plan."""
        return max(len(self.records) - 1, 0)

    @property
    def succeeded(self) -> bool:
        return self.outcome == Outcome.SUCCEEDED

    @property
    def initial_failure(self) -> bool:
        return bool(self.records) and not self.records[0].success

    @property
    def rescued(self) -> bool:
        return self.succeeded and self.iterations_used > 0

    @property
    def final_flow(self) -> ActionFlow | None:
        return self.records[-1].flow if self.records else None
