"""
Task tuples: simple tasks, action transfers and complex long-horizon tasks.

Graph structure:
  SimpleTask   = <target, support_init, support_goal, init, goal>
  ComplexTask  = ordered SimpleTasks joined by ActionTransfers (K-1 of them)
"""

from __future__ import annotations
from dataclasses import dataclass, field, replace
from typing import Any, Optional

from ..config.primitives import NEEDS_SUPPORT, NEEDS_TARGET
from ..core.errors import (
    EmptyConjunctionError,
    InvalidDecompositionError,
    MissingContextError,
)
from .actions import ActionFlow, PrimitiveKind
from .predicates import Conjunction


# ---------------------------------------------------------------------------
# Context
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TaskContext:
    """Object ids the context-aware primitives resolve against."""
    target: Optional[str] = None
    support_init: Optional[str] = None
    support_goal: Optional[str] = None

    def resolve(self, need: str | None, kind: PrimitiveKind) -> str | None:
        if need is None:
            return None
        value = self.target if need == NEEDS_TARGET else self.support_goal
        if not value:
            missing = "target" if need == NEEDS_TARGET else NEEDS_SUPPORT
            raise MissingContextError(f"{kind.value} needs a {missing} id in the task context")
        return value

    def ids(self) -> frozenset[str]:
        return frozenset(x for x in (self.target, self.support_init, self.support_goal) if x)


# ---------------------------------------------------------------------------
# Simple task
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimpleTask:
    name: str
    description: str
    target: str
    init: Conjunction
    goal: Conjunction
    support_init: Optional[str] = None
    support_goal: Optional[str] = None
    bddl_category: str = ""

    def __post_init__(self) -> None:
        if not self.target:
            raise InvalidDecompositionError(f"subtask {self.name!r} has no target object")
        if not self.init:
            raise EmptyConjunctionError(f"subtask {self.name!r} has an empty init conjunction")
        if not self.goal:
            raise EmptyConjunctionError(f"subtask {self.name!r} has an empty goal conjunction")
        object.__setattr__(self, "init", tuple(self.init))
        object.__setattr__(self, "goal", tuple(self.goal))

    def context(self) -> TaskContext:
        return TaskContext(self.target, self.support_init, self.support_goal)

    def object_ids(self) -> frozenset[str]:
        ids = set(self.context().ids())
        for p in self.init + self.goal:
            ids.update(p.object_ids())
        return frozenset(ids)

    def to_dict(self) -> dict[str, Any]:
        return {
            "task_activity_name": self.name,
            "task_detail_message": self.description,
            "target_id": self.target,
            "support_init_id": self.support_init,
            "support_goal_id": self.support_goal,
            "bddl_category": self.bddl_category,
            "init": [p.to_bddl() for p in self.init],
            "goal": [p.to_bddl() for p in self.goal],
        }


# ---------------------------------------------------------------------------
# Transfers and complex tasks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ActionTransfer:
    """
    Zero-physical-time bridge between consecutive subtasks. The end/start
    actions are unknown until flows are planned and stay None before that.
    """
    prev_target: str
    next_target: str
    end_action: Optional[PrimitiveKind] = None
    start_action: Optional[PrimitiveKind] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "prev_target": self.prev_target,
            "next_target": self.next_target,
            "end_action": self.end_action.value if self.end_action else None,
            "start_action": self.start_action.value if self.start_action else None,
        }


@dataclass(frozen=True)
class ComplexTask:
    name: str
    detail: str
    subtasks: tuple[SimpleTask, ...]
    transfers: tuple[ActionTransfer, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "subtasks", tuple(self.subtasks))
        object.__setattr__(self, "transfers", tuple(self.transfers))
        if not self.subtasks:
            raise InvalidDecompositionError(f"task {self.name!r} decomposed into zero subtasks")
        if len(self.transfers) != len(self.subtasks) - 1:
            raise InvalidDecompositionError(
                f"task {self.name!r} has {len(self.subtasks)} subtasks but {len(self.transfers)} transfers"
            )

    @classmethod
    def chain(cls, name: str, detail: str, subtasks: list[SimpleTask]) -> "ComplexTask":
        """Derive transfers from consecutive targets."""
        transfers = [
            ActionTransfer(a.target, b.target) for a, b in zip(subtasks, subtasks[1:])
        ]
        return cls(name, detail, tuple(subtasks), tuple(transfers))

    def with_flows(self, flows: list[ActionFlow]) -> "ComplexTask":
        if len(flows) != len(self.subtasks):
            raise InvalidDecompositionError(
                f"{len(flows)} flows for {len(self.subtasks)} subtasks of {self.name!r}"
            )
        transfers = tuple(
            replace(e, end_action=flows[k][-1].kind, start_action=flows[k + 1][0].kind)
            for k, e in enumerate(self.transfers)
        )
        return replace(self, transfers=transfers)

    def replace_subtask(self, index: int, subtask: SimpleTask) -> "ComplexTask":
        items = list(self.subtasks)
        items[index] = subtask
        return replace(self, subtasks=tuple(items))

    def to_dict(self) -> dict[str, Any]:
        return {
            "task_activity_name": self.name,
            "task_detail_message": self.detail,
            "subtasks": {f"sub_task_{k + 1}": t.to_dict() for k, t in enumerate(self.subtasks)},
            "transfers": [e.to_dict() for e in self.transfers],
        }


@dataclass(frozen=True)
class TaskKeyword:
    text: str
    scene_id: str = ""

    def __post_init__(self) -> None:
        text = " ".join(self.text.split())
        if not text:
            raise InvalidDecompositionError("task keyword is empty")
        object.__setattr__(self, "text", text)

