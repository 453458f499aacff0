"""
`new_sequence` wire codec.

  parameter-free action      → bare integer id              e.g. 18
  scalar parameter           → {"<id>": number}             e.g. {"15": 0.3}
  range parameter            → {"<id>": [min, max]}         e.g. {"19": [0.0, 0.6]}

Articulate actions carrying the default range travel as a bare id.
"""

from __future__ import annotations
import json
from typing import Any

from ..config.primitives import SHAPE_NONE, SHAPE_RANGE, WIRE_ID_TO_KIND
from ..core.errors import (
    EmptySequenceError,
    InvalidParamError,
    ParamShapeMismatchError,
    UnknownActionIdError,
)
from ..models.actions import ActionFlow, PrimitiveAction, PrimitiveKind

WireItem = int | dict[str, Any]


def encode_action(action: PrimitiveAction) -> WireItem:
    wire_id = action.kind.wire_id
    if action.param is None:
        return wire_id
    if isinstance(action.param, tuple):
        return {str(wire_id): [action.param[0], action.param[1]]}
    return {str(wire_id): action.param}


def encode_flow(flow: ActionFlow) -> list[WireItem]:
    return [encode_action(a) for a in flow]


def _kind_for(raw_id: Any, position: int) -> PrimitiveKind:
    try:
        wire_id = int(raw_id)
    except (TypeError, ValueError):
        raise UnknownActionIdError(f"item {position}: {raw_id!r} is not an action id") from None
    if isinstance(raw_id, bool) or wire_id not in WIRE_ID_TO_KIND or (isinstance(raw_id, float) and raw_id != wire_id):
        raise UnknownActionIdError(f"item {position}: unknown action id {raw_id!r}")
    return PrimitiveKind(WIRE_ID_TO_KIND[wire_id])


def decode_action(item: Any, position: int = 0) -> PrimitiveAction:
    if isinstance(item, dict):
        if len(item) != 1:
            raise ParamShapeMismatchError(f"item {position}: parameter object must have exactly one key, got {item!r}")
        (raw_id, param), = item.items()
        kind = _kind_for(raw_id, position)
        if kind.shape == SHAPE_NONE:
            raise ParamShapeMismatchError(f"item {position}: {kind.value} takes no parameter, got {param!r}")
        if kind.shape == SHAPE_RANGE and isinstance(param, list):
            param = tuple(param)
    else:
        kind = _kind_for(item, position)
        if kind.shape not in (SHAPE_NONE, SHAPE_RANGE):
            raise ParamShapeMismatchError(f"item {position}: {kind.value} needs a parameter")
        param = None
    try:
        return PrimitiveAction(kind, param)
    except InvalidParamError as e:
        raise ParamShapeMismatchError(f"item {position}: {e.message}") from e


def decode_flow(wire: Any) -> ActionFlow:
    if isinstance(wire, str):
        try:
            wire = json.loads(wire)
        except json.JSONDecodeError as e:
            raise ParamShapeMismatchError(f"new_sequence is not valid JSON: {e.msg}") from e
    if not isinstance(wire, list):
        raise ParamShapeMismatchError(f"new_sequence must be a JSON array, got {type(wire).__name__}")
    if not wire:
        raise EmptySequenceError("new_sequence is empty")
    return tuple(decode_action(item, i) for i, item in enumerate(wire))


def canonical_json(wire: list[WireItem]) -> str:
    """Stable text form used for byte comparisons."""
    return json.dumps(wire, separators=(", ", ": "))
