"""
Initial action flows.
Templates are keyed by the shape of the subtask's goal; fixture annotations
(command_range, retreat_clearance) parameterise them.
"""

from __future__ import annotations
from typing import Optional

from ..config import defaults
from ..core.errors import NoTemplateError
from ..models.actions import ActionFlow, PrimitiveAction, PrimitiveKind as K, make_flow
from ..models.predicates import PredicateName
from ..models.scene import ObjectClass, SceneConfig
from ..models.tasks import SimpleTask
from ..scene.classify import classify_object

LIFT_AFTER_PICK = 0.2
PLACE_ADVANCE = 0.4
PLACE_REACH = 0.1
PLACE_LOWER = 0.3

OPEN = "open"
CLOSE = "close"
PICK = "pick"
PLACE_IN_FIXTURE = "place_in_fixture"
PLACE_DOWN = "place_down"


def goal_shape(subtask: SimpleTask, scene: SceneConfig) -> str:
    """Template key for a subtask, read off its first goal literal that names the target."""
    for p in subtask.goal:
        if p.name == PredicateName.OPEN and p.args[0] == subtask.target:
            return CLOSE if p.negated else OPEN
        if p.name in (PredicateName.ONTOP, PredicateName.INSIDE) and p.args[0] == subtask.target:
            if p.negated:
                return PICK
            support = scene.get(p.args[1]) if scene.has(p.args[1]) else None
            if (
                p.name == PredicateName.INSIDE and support is not None
                and support.articulation is not None
                and classify_object(support) == ObjectClass.FIXTURE
            ):
                return PLACE_IN_FIXTURE
            return PLACE_DOWN
    raise NoTemplateError(
        f"no flow template for subtask {subtask.name!r} with goal "
        f"{' '.join(p.to_bddl() for p in subtask.goal)}"
    )


def _articulate(kind: K, subtask: SimpleTask, scene: SceneConfig) -> PrimitiveAction:
    art = scene.get(subtask.target).articulation
    if art is not None and art.command_range is not None:
        return PrimitiveAction(kind, tuple(art.command_range))
    if kind == K.ARTICULATE_CLOSE:
        return PrimitiveAction(kind, defaults.DEFAULT_CLOSE_RANGE)
    return PrimitiveAction(kind)


def _needs_retreat(subtask: Optional[SimpleTask], scene: SceneConfig) -> bool:
    if subtask is None or not scene.has(subtask.target):
        return False
    art = scene.get(subtask.target).articulation
    return art is not None and art.retreat_clearance


def plan_initial_flow(
    subtask: SimpleTask,
    scene: SceneConfig,
    previous: Optional[SimpleTask] = None,
) -> ActionFlow:
    """
    `previous` is the subtask executed just before this one, None for the
    first subtask (the robot then already stands at the target's standoff).
    """
    shape = goal_shape(subtask, scene)
    lead: list = [] if previous is None else [K.NAVIGATE_TO_TARGET]

    if shape == OPEN:
        body = [*lead, K.APPROACH, K.CONVERGE, K.GRASP, _articulate(K.ARTICULATE_OPEN, subtask, scene), K.UNGRASP]
        if _needs_retreat(subtask, scene):
            body.append(K.RETREAT)
    elif shape == CLOSE:
        body = [*lead, K.APPROACH, K.CONVERGE, K.GRASP, _articulate(K.ARTICULATE_CLOSE, subtask, scene), K.UNGRASP]
    elif shape == PICK:
        if lead and _needs_retreat(previous, scene):
            lead.append(K.RETREAT)
        body = [*lead, K.APPROACH, K.CONVERGE, K.GRASP, (K.LIFT_EEF_UP, LIFT_AFTER_PICK)]
    elif shape == PLACE_IN_FIXTURE:
        body = [K.NAVIGATE_TO_SUPPORT, (K.MOVE_BASE_FORWARD, PLACE_ADVANCE), (K.MOVE_EEF_FORWARD, PLACE_REACH), K.UNGRASP]
    else:
        body = [
            K.NAVIGATE_TO_SUPPORT, (K.MOVE_BASE_FORWARD, PLACE_ADVANCE), (K.MOVE_EEF_FORWARD, PLACE_REACH),
            (K.LIFT_EEF_DOWN, PLACE_LOWER), K.UNGRASP,
        ]
    return tuple(b if isinstance(b, PrimitiveAction) else make_flow(b)[0] for b in body)
