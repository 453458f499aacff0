"""
Primitive actions and action flows.
A flow is an immutable tuple of PrimitiveAction values, hashable so evolution
histories can enforce the no-repeat rule by set membership.
"""

from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from typing import Union

from ..config import defaults
from ..config.primitives import (
    PRIMITIVE_TABLE,
    SHAPE_ANGLE,
    SHAPE_DISTANCE,
    SHAPE_NONE,
    SHAPE_RANGE,
)
from ..core.errors import InvalidParamError


class PrimitiveKind(str, Enum):
    APPROACH = "APPROACH"
    CONVERGE = "CONVERGE"
    GRASP = "GRASP"
    RETREAT = "RETREAT"
    UNGRASP = "UNGRASP"
    LIFT_EEF_UP = "LIFT_EEF_UP"
    LIFT_EEF_DOWN = "LIFT_EEF_DOWN"
    MOVE_EEF_FORWARD = "MOVE_EEF_FORWARD"
    MOVE_EEF_BACKWARD = "MOVE_EEF_BACKWARD"
    MOVE_EEF_LEFT = "MOVE_EEF_LEFT"
    MOVE_EEF_RIGHT = "MOVE_EEF_RIGHT"
    MOVE_BASE_FORWARD = "MOVE_BASE_FORWARD"
    MOVE_BASE_BACKWARD = "MOVE_BASE_BACKWARD"
    MOVE_BASE_LEFT = "MOVE_BASE_LEFT"
    MOVE_BASE_RIGHT = "MOVE_BASE_RIGHT"
    NAVIGATE_TO_TARGET = "NAVIGATE_TO_TARGET"
    NAVIGATE_TO_SUPPORT = "NAVIGATE_TO_SUPPORT"
    ARTICULATE_CLOSE = "ARTICULATE_CLOSE"
    ARTICULATE_OPEN = "ARTICULATE_OPEN"
    TURN_BASE_LEFT = "TURN_BASE_LEFT"
    TURN_BASE_RIGHT = "TURN_BASE_RIGHT"

    @property
    def spec(self) -> dict:
        return PRIMITIVE_TABLE[self.value]

    @property
    def wire_id(self) -> int:
        return self.spec["id"]

    @property
    def shape(self) -> str:
        return self.spec["shape"]

    @property
    def duration_ticks(self) -> int:
        return self.spec["ticks"]

    @property
    def context_aware(self) -> bool:
        return self.shape == SHAPE_NONE


BASE_TRANSLATIONS = frozenset({
    PrimitiveKind.MOVE_BASE_FORWARD, PrimitiveKind.MOVE_BASE_BACKWARD,
    PrimitiveKind.MOVE_BASE_LEFT, PrimitiveKind.MOVE_BASE_RIGHT,
})
EEF_TRANSLATIONS = frozenset({
    PrimitiveKind.MOVE_EEF_FORWARD, PrimitiveKind.MOVE_EEF_BACKWARD,
    PrimitiveKind.MOVE_EEF_LEFT, PrimitiveKind.MOVE_EEF_RIGHT,
    PrimitiveKind.LIFT_EEF_UP, PrimitiveKind.LIFT_EEF_DOWN,
})
TURNS = frozenset({PrimitiveKind.TURN_BASE_LEFT, PrimitiveKind.TURN_BASE_RIGHT})
ARTICULATIONS = frozenset({PrimitiveKind.ARTICULATE_OPEN, PrimitiveKind.ARTICULATE_CLOSE})
NAVIGATIONS = frozenset({PrimitiveKind.NAVIGATE_TO_TARGET, PrimitiveKind.NAVIGATE_TO_SUPPORT})

Param = Union[float, tuple[float, float], None]


@dataclass(frozen=True)
class PrimitiveAction:
    """
    One parameterised primitive. `param` is None for context-aware kinds and
    for articulate kinds carrying the default-range sentinel.
    """
    kind: PrimitiveKind
    param: Param = None

    def __post_init__(self) -> None:
        kind = PrimitiveKind(self.kind)
        object.__setattr__(self, "kind", kind)
        shape = kind.shape
        param = self.param

        if shape == SHAPE_NONE:
            if param is not None:
                raise InvalidParamError(f"{kind.value} takes no parameter, got {param!r}")
        elif shape in (SHAPE_DISTANCE, SHAPE_ANGLE):
            unit = "meters" if shape == SHAPE_DISTANCE else "degrees"
            if isinstance(param, bool) or not isinstance(param, (int, float)):
                raise InvalidParamError(f"{kind.value} takes a scalar in {unit}, got {param!r}")
            bound = defaults.MAX_DISTANCE_PARAM if shape == SHAPE_DISTANCE else defaults.MAX_ANGLE_PARAM
            # also rejects NaN and ±inf
            if not abs(param) <= bound:
                raise InvalidParamError(f"{kind.value} takes a finite scalar within ±{bound} {unit}, got {param!r}")
            object.__setattr__(self, "param", float(param))
        elif shape == SHAPE_RANGE and param is not None:
            if not isinstance(param, (tuple, list)) or len(param) != 2:
                raise InvalidParamError(f"{kind.value} takes a [min, max] range, got {param!r}")
            if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in param):
                raise InvalidParamError(f"{kind.value} range bounds must be numbers, got {param!r}")
            if not (0 <= param[0] <= param[1] <= 1):
                raise InvalidParamError(f"{kind.value} range must satisfy 0 <= min <= max <= 1, got {param!r}")
            object.__setattr__(self, "param", (float(param[0]), float(param[1])))

    @property
    def uses_default_range(self) -> bool:
        return self.kind.shape == SHAPE_RANGE and self.param is None

    def label(self) -> str:
        if self.param is None:
            return self.kind.value
        if isinstance(self.param, tuple):
            return f"{self.kind.value}({self.param[0]}, {self.param[1]})"
        return f"{self.kind.value}({self.param})"

    def __str__(self) -> str:
        return self.label()


ActionFlow = tuple[PrimitiveAction, ...]


def make_flow(*items: PrimitiveKind | tuple[PrimitiveKind, Param]) -> ActionFlow:
    """Build a flow from bare kinds or (kind, param) pairs."""
    actions = []
    for item in items:
        if isinstance(item, tuple):
            actions.append(PrimitiveAction(item[0], item[1]))
        else:
            actions.append(PrimitiveAction(item))
    return tuple(actions)


def flow_label(flow: ActionFlow) -> str:
    return " → ".join(a.label() for a in flow)
