"""
Graspability scaling.
Manipulable items wider than the gripper are shrunk so their narrowest
horizontal side lands near the ideal grasp width.
"""

from __future__ import annotations
import logging
from decimal import ROUND_FLOOR, ROUND_HALF_UP, Decimal
from typing import Iterable, Literal

from ..config import defaults
from ..models.scene import ObjectClass, ObjectSpec, RobotConfig
from .classify import classify_object

log = logging.getLogger(__name__)

RoundingMode = Literal["decimals", "grid"]


def _quantum(mode: RoundingMode) -> Decimal:
    if mode == "grid":
        return Decimal(str(defaults.SCALE_GRID))
    return Decimal(1).scaleb(-defaults.SCALE_DECIMALS)


def _snap(value: Decimal, step: Decimal, rounding: str) -> Decimal:
    return (value / step).quantize(Decimal(1), rounding=rounding) * step


def _round(value: float, mode: RoundingMode) -> float:
    return float(_snap(Decimal(repr(value)), _quantum(mode), ROUND_HALF_UP))


def _round_down(value: float, mode: RoundingMode) -> float:
    """
    Largest positive multiple of the mode's step not above `value`. Very wide
    objects fall through to finer decimal steps so the factor stays above zero.
    """
    exact = Decimal(repr(value))
    snapped = _snap(exact, _quantum(mode), ROUND_FLOOR)
    places = defaults.SCALE_DECIMALS - 1
    while snapped <= 0:
        places += 1
        snapped = _snap(exact, Decimal(1).scaleb(-places), ROUND_FLOOR)
    return float(snapped)


def adjust_object_scale(
    spec: ObjectSpec,
    robot: RobotConfig | None = None,
    *,
    mode: RoundingMode = "decimals",
    extents_scale: float = 1.0,
) -> float:
    """
    Scale factor for one object. Fixtures are never scaled. `extents_scale`
    lets callers ask about an object that was already shrunk once.
    """
    robot = robot or RobotConfig()
    if classify_object(spec) == ObjectClass.FIXTURE:
        return 1.0
    d_min = spec.d_min * extents_scale
    if d_min <= robot.gripper_max_width:
        return 1.0
    exact = robot.ideal_grasp_width / d_min
    factor = min(_round(exact, mode), 1.0)
    # scaled width must still fit the gripper
    if factor <= 0 or factor * d_min > robot.gripper_max_width:
        factor = _round_down(exact, mode)
    log.debug("Scale for %s: d_min=%.4f -> %s", spec.id, d_min, factor)
    return factor


def first_occurrence_scales(
    targets: Iterable[ObjectSpec],
    robot: RobotConfig | None = None,
    *,
    mode: RoundingMode = "decimals",
) -> dict[str, float]:
    """Per-subtask target scales, keeping the first factor seen for each object."""
    scales: dict[str, float] = {}
    for spec in targets:
        if spec.id not in scales:
            scales[spec.id] = adjust_object_scale(spec, robot, mode=mode)
    return scales
