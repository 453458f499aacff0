"""
Open-loop execution of an action flow for one simple task.
Flows always run to completion; soft failures surface as events and are
left for the critics to interpret.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Optional

from ..core.errors import EmptySequenceError
from ..models.actions import ActionFlow, PrimitiveAction
from ..models.predicates import Predicate
from ..models.scene import RobotConfig, SceneConfig
from ..models.tasks import SimpleTask
from .predicates import Snapshot, changed_predicates, evaluate_goal, evaluate_predicate, snapshot_predicates
from .simulator import execute_primitive, place_at_standoff
from .state import EventKind, ExecutionEvent, WorldState

log = logging.getLogger(__name__)

DISTURBANCE_EVENTS = frozenset({EventKind.COLLISION, EventKind.DOOR_DISTURBED})


@dataclass(frozen=True)
class TraceStep:
    index: int                          # 1-based position in the flow
    action: PrimitiveAction
    post_state: WorldState
    events: tuple[ExecutionEvent, ...]
    start_tick: int
    duration_ticks: int
    changed: tuple[Predicate, ...]      # valuations flipped by this step, as they now hold

    @property
    def end_tick(self) -> int:
        return self.start_tick + self.duration_ticks

    def has_event(self, *kinds: EventKind) -> bool:
        return any(e.kind in kinds for e in self.events)


@dataclass
class ExecutionTrace:
    task: SimpleTask
    initial_state: WorldState
    steps: list[TraceStep] = field(default_factory=list)
    snapshots: list[Snapshot] = field(default_factory=list)
    success: bool = False
    changed_pairs: set[frozenset[str]] = field(default_factory=set)
    release_tick: Optional[int] = None   # first tick an init predicate stops holding
    goal_tick: Optional[int] = None      # first tick the goal conjunction holds

    @property
    def final_state(self) -> WorldState:
        return self.steps[-1].post_state if self.steps else self.initial_state

    @property
    def flow(self) -> ActionFlow:
        return tuple(s.action for s in self.steps)

    @property
    def events(self) -> list[ExecutionEvent]:
        return [e for s in self.steps for e in s.events]

    @property
    def disturbed(self) -> bool:
        return any(e.kind in DISTURBANCE_EVENTS for e in self.events)


def _as_holding(changed: list[Predicate], after: Snapshot) -> tuple[Predicate, ...]:
    now = dict(after)
    return tuple(p if now[p] else p.negate() for p in changed)


def execute_flow(state: WorldState, flow: ActionFlow, task: SimpleTask) -> ExecutionTrace:
    if not flow:
        raise EmptySequenceError(f"empty action flow for subtask {task.name!r}")
    for oid in task.object_ids():
        state.require(oid)

    ctx = task.context()
    current = state.copy()
    current.context = ctx
    snapshot = snapshot_predicates(current)
    trace = ExecutionTrace(task=task, initial_state=current, snapshots=[snapshot])

    for j, action in enumerate(flow, start=1):
        start = current.tick
        current, events = execute_primitive(current, action, ctx)
        after = snapshot_predicates(current)
        changed = changed_predicates(snapshot, after)
        trace.changed_pairs |= {p.subjects() for p in changed}
        trace.steps.append(TraceStep(
            index=j,
            action=action,
            post_state=current,
            events=tuple(events),
            start_tick=start,
            duration_ticks=current.tick - start,
            changed=_as_holding(changed, after),
        ))
        trace.snapshots.append(after)
        snapshot = after

        if trace.release_tick is None and not all(evaluate_predicate(current, p) for p in task.init):
            trace.release_tick = current.tick
        if trace.goal_tick is None and evaluate_goal(current, task.goal):
            trace.goal_tick = current.tick

    trace.success = evaluate_goal(current, task.goal)
    log.debug(
        "Executed %d actions for %s: success=%s events=%d",
        len(flow), task.name, trace.success, len(trace.events),
    )
    return trace


def initial_world(
    scene: SceneConfig,
    first: SimpleTask,
    scales: dict[str, float] | None = None,
    robot: RobotConfig | None = None,
) -> WorldState:
    """Episode start: scaled scene, robot at the standoff of the first subtask's target."""
    state = WorldState.initial(scene, robot, scales, first.context())
    return place_at_standoff(state, first.target)
