"""
Geometric evaluation of BDDL-style predicates over a WorldState.
Predicates are derived on demand, never stored; snapshot_predicates gives the
full valuation used for diffing consecutive states.
"""

from __future__ import annotations
from typing import Iterable

from ..config import defaults
from ..core.errors import EmptyConjunctionError, UnknownObjectError
from ..models.predicates import GRIPPER, ROBOT, Predicate, PredicateName
from ..models.scene import ObjectClass
from .state import WorldState

Snapshot = tuple[tuple[Predicate, bool], ...]


def _check_ids(state: WorldState, p: Predicate) -> None:
    for oid in p.object_ids():
        state.require(oid)
    if p.name == PredicateName.INROOM:
        if p.args[0] == GRIPPER:
            raise UnknownObjectError("inroom takes a robot or an object, not the gripper")
        state.scene.room(p.args[1])
    elif GRIPPER in p.args and not p.holds_in_gripper:
        raise UnknownObjectError(f"{p.to_bddl()}: the gripper is only valid as (inside x gripper)")
    elif ROBOT in p.args:
        raise UnknownObjectError(f"{p.to_bddl()}: the robot is only valid in inroom")


def on_top(state: WorldState, a: str, b: str) -> bool:
    if a == b:
        return False
    box_a, box_b = state.box(a), state.box(b)
    if abs(box_a.bottom - box_b.top) > defaults.EPSILON_Z:
        return False
    cx, cy, _ = box_a.center
    return box_b.covers_point_xy(cx, cy)


def inside(state: WorldState, a: str, b: str) -> bool:
    if a == b:
        return False
    interior = state.interior(b)
    return interior is not None and interior.contains(state.box(a))


def in_room(state: WorldState, x: str, room: str) -> bool:
    region = state.scene.room(room).region
    if x == ROBOT:
        px, py, _ = state.robot_base
    else:
        px, py, _ = state.position(x)
    if region is None:
        w, h = state.scene.floor_extent
        return 0.0 <= px <= w and 0.0 <= py <= h
    (x0, y0), (x1, y1) = region
    return x0 <= px <= x1 and y0 <= py <= y1


def evaluate_predicate(state: WorldState, p: Predicate) -> bool:
    _check_ids(state, p)
    if p.holds_in_gripper:
        value = state.held_object == p.args[0]
    elif p.name == PredicateName.ONTOP:
        value = on_top(state, *p.args)
    elif p.name == PredicateName.INSIDE:
        value = inside(state, *p.args)
    elif p.name == PredicateName.OPEN:
        value = state.is_open(p.args[0])
    else:
        value = in_room(state, *p.args)
    return value != p.negated


def evaluate_goal(state: WorldState, goal: Iterable[Predicate]) -> bool:
    goal = tuple(goal)
    if not goal:
        raise EmptyConjunctionError("goal conjunction is empty")
    return all(evaluate_predicate(state, p) for p in goal)


def snapshot_predicates(state: WorldState) -> Snapshot:
    """
    Exhaustive positive valuation: OnTop/Inside over ordered object pairs,
    Open over articulated fixtures, InGripper over manipulables, InRoom for the
    robot and every object. Sorted, so equal states give equal snapshots.
    """
    ids = sorted(state.scene.object_ids)
    rooms = sorted(state.scene.room_names)
    items: list[tuple[Predicate, bool]] = []
    for a in ids:
        for b in ids:
            if a == b:
                continue
            items.append((Predicate.ontop(a, b), on_top(state, a, b)))
            items.append((Predicate.inside(a, b), inside(state, a, b)))
    for oid in ids:
        if state.articulation(oid) is not None:
            items.append((Predicate.open(oid), state.is_open(oid)))
        if state.classes[oid] == ObjectClass.MANIPULABLE:
            items.append((Predicate.ingripper(oid), state.held_object == oid))
    for room in rooms:
        items.append((Predicate.inroom(ROBOT, room), in_room(state, ROBOT, room)))
        for oid in ids:
            items.append((Predicate.inroom(oid, room), in_room(state, oid, room)))
    return tuple(sorted(items, key=lambda kv: kv[0]))


def changed_predicates(before: Snapshot, after: Snapshot) -> list[Predicate]:
    prior = dict(before)
    return [p for p, v in after if prior.get(p) != v]


def changed_pairs(before: Snapshot, after: Snapshot) -> set[frozenset[str]]:
    """Entity groups (pairs, or singletons for unary predicates) whose valuation flipped."""
    return {p.subjects() for p in changed_predicates(before, after)}
