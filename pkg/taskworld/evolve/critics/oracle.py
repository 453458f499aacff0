"""
Deterministic trace-driven critic.
Inspection reads flags straight off the execution trace; supervision walks
the rulebook in order and applies the first repair whose trigger matches.
Identical inputs always give identical critiques and proposals.
"""

from __future__ import annotations
import logging
from typing import Callable, Optional

from ...config.primitives import DEFAULT_ARTICULATION_RANGE
from ...config.rulebook import FLAG_ORDER, INSPECTOR_TEXTS, REPAIR_RULES
from ...core.errors import NoTemplateError
from ...models.actions import (
    ARTICULATIONS,
    BASE_TRANSLATIONS,
    EEF_TRANSLATIONS,
    TURNS,
    ActionFlow,
    PrimitiveAction,
    PrimitiveKind as K,
)
from ...models.evolution import Critique, CritiqueFlag, EvolutionConfig, EvolutionHistory
from ...models.predicates import GRIPPER, Predicate, PredicateName
from ...models.tasks import SimpleTask
from ...observe.frames import ObservationSet
from ...world.execution import ExecutionTrace, TraceStep
from ...world.predicates import evaluate_predicate
from ...world.state import EventKind
from .base import Critic

log = logging.getLogger(__name__)

MOVEMENTS = BASE_TRANSLATIONS | EEF_TRANSLATIONS | TURNS | ARTICULATIONS

_EVENT_FLAGS = {
    EventKind.COLLISION: CritiqueFlag.COLLISION,
    EventKind.DOOR_DISTURBED: CritiqueFlag.DOOR_DISTURBED,
    EventKind.GRASP_EMPTY: CritiqueFlag.GRASP_EMPTY,
}

Words = dict[str, str]
Proposal = Optional[tuple[list[PrimitiveAction], Words]]


def _fmt(value: float) -> str:
    return repr(round(float(value), 3))


def _placement_goal(task: SimpleTask) -> Optional[Predicate]:
    for p in task.goal:
        if (
            not p.negated and p.name in (PredicateName.ONTOP, PredicateName.INSIDE)
            and p.args[0] == task.target and p.args[1] != GRIPPER
        ):
            return p
    return None


def _relation(p: Predicate) -> str:
    return "inside" if p.name == PredicateName.INSIDE else "on top of"


def _event_subject(step: TraceStep, kind: EventKind, default: str) -> str:
    for e in step.events:
        if e.kind == kind:
            return e.subjects[0] if e.subjects else default
    return default


def _event_detail(step: TraceStep, kind: EventKind) -> str:
    return next((e.detail for e in step.events if e.kind == kind), "")


def _last_index(flow: list[PrimitiveAction], kind: K, before: Optional[int] = None) -> Optional[int]:
    stop = len(flow) if before is None else before
    for i in range(stop - 1, -1, -1):
        if flow[i].kind == kind:
            return i
    return None


def _rounded(flow: list[PrimitiveAction]) -> ActionFlow:
    out = []
    for a in flow:
        if isinstance(a.param, tuple):
            out.append(PrimitiveAction(a.kind, (round(a.param[0], 3), round(a.param[1], 3))))
        elif a.param is not None:
            out.append(PrimitiveAction(a.kind, round(a.param, 3)))
        else:
            out.append(a)
    return tuple(out)


# ─── Trace conditions ─────────────────────────────────────────────────────────

def _residual_open(trace: ExecutionTrace) -> bool:
    """A close was commanded but the fixture is still open at the end."""
    task = trace.task
    has_close = any(a.kind == K.ARTICULATE_CLOSE for a in trace.flow)
    return has_close and any(
        p.name == PredicateName.OPEN and p.negated and trace.final_state.is_open(p.args[0])
        for p in task.goal
    )


def _short_open(trace: ExecutionTrace) -> bool:
    """The fixture did not open and the commanded sweep stopped below full travel."""
    task = trace.task
    opens = [a for a in trace.flow if a.kind == K.ARTICULATE_OPEN]
    if not opens:
        return False
    hi = (opens[-1].param or DEFAULT_ARTICULATION_RANGE)[1]
    return hi < 1.0 and any(
        p.name == PredicateName.OPEN and not p.negated and not trace.final_state.is_open(p.args[0])
        for p in task.goal
    )


_CONDITIONS: dict[str, Callable[[ExecutionTrace], bool]] = {
    "residual_open": _residual_open,
    "short_open": _short_open,
}


def _matches(trigger: dict, trace: ExecutionTrace, critique: Optional[Critique], step: Optional[TraceStep]) -> bool:
    """Check whether a rule trigger matches the failed trace (and, for step triggers, one step)."""
    if "flag" in trigger:
        if critique is None or CritiqueFlag(trigger["flag"]) not in critique.flags:
            return False

    if "action_in" in trigger:
        if step is None or step.action.kind.value not in trigger["action_in"]:
            return False

    if "condition" in trigger:
        if not _CONDITIONS[trigger["condition"]](trace):
            return False

    return True


# ─── Repairs ──────────────────────────────────────────────────────────────────

def _sidestep(rule: dict, trace: ExecutionTrace, step: TraceStep) -> Proposal:
    params = rule["repair"]
    side = K(params["sidestep"])
    flow = list(trace.flow)
    i = step.index - 1
    if i > 0 and flow[i - 1].kind == side:
        distance = flow[i - 1].param + params["grow"]
        flow[i - 1] = PrimitiveAction(side, distance)
    else:
        distance = params["distance"]
        flow.insert(i, PrimitiveAction(side, distance))
    return flow, {
        "fixture": _event_subject(step, EventKind.DOOR_DISTURBED, "the fixture"),
        "action": step.action.kind.value,
        "sidestep": side.value,
        "distance": _fmt(distance),
    }


def _realign_before(flow: list[PrimitiveAction], i: int, rule: dict) -> list[PrimitiveAction]:
    return flow[:i] + [PrimitiveAction(K(k)) for k in rule["repair"]["realign"]] + flow[i:]


def _regrasp(rule: dict, trace: ExecutionTrace, step: TraceStep) -> Proposal:
    flow = _realign_before(list(trace.flow), step.index - 1, rule)
    detail = _event_detail(step, EventKind.GRASP_EMPTY) or "nothing between the fingers"
    return flow, {"target": trace.task.target, "detail": detail}


def _close_harder(rule: dict, trace: ExecutionTrace, step: Optional[TraceStep]) -> Proposal:
    params = rule["repair"]
    flow = list(trace.flow)
    k = _last_index(flow, K.ARTICULATE_CLOSE)
    lo, hi = flow[k].param or DEFAULT_ARTICULATION_RANGE
    new_hi = min(1.0, hi + params["widen"])
    flow[k] = PrimitiveAction(K.ARTICULATE_CLOSE, (lo, new_hi))
    u = _last_index(flow, K.UNGRASP)
    if u is not None and u > k and flow[u - 1].kind != K.MOVE_EEF_FORWARD:
        flow.insert(u, PrimitiveAction(K.MOVE_EEF_FORWARD, params["push"]))
    return flow, {"fixture": trace.task.target, "lo": _fmt(lo), "hi": _fmt(hi), "new_hi": _fmt(new_hi)}


def _open_further(rule: dict, trace: ExecutionTrace, step: Optional[TraceStep]) -> Proposal:
    flow = list(trace.flow)
    k = _last_index(flow, K.ARTICULATE_OPEN)
    lo, hi = flow[k].param or DEFAULT_ARTICULATION_RANGE
    new_hi = min(1.0, hi + rule["repair"]["widen"])
    flow[k] = PrimitiveAction(K.ARTICULATE_OPEN, (lo, new_hi))
    return flow, {"fixture": trace.task.target, "lo": _fmt(lo), "hi": _fmt(hi), "new_hi": _fmt(new_hi)}


def _reach_deeper(rule: dict, trace: ExecutionTrace, step: TraceStep) -> Proposal:
    params = rule["repair"]
    goal = _placement_goal(trace.task)
    flow = list(trace.flow)
    u = _last_index(flow, K.UNGRASP)
    if goal is None or u is None:
        return None

    m = _last_index(flow, K.MOVE_EEF_FORWARD, before=u)
    if m is not None:
        reach = flow[m].param + params["extend"]
        flow[m] = PrimitiveAction(K.MOVE_EEF_FORWARD, reach)
    else:
        reach = params["extend"]
        at = u - 1 if u > 0 and flow[u - 1].kind == K.LIFT_EEF_DOWN else u
        flow.insert(at, PrimitiveAction(K.MOVE_EEF_FORWARD, reach))
        u += 1

    if u > 0 and flow[u - 1].kind == K.LIFT_EEF_DOWN:
        lower = flow[u - 1].param
    else:
        lower = params["lower"]
        flow.insert(u, PrimitiveAction(K.LIFT_EEF_DOWN, lower))
    return flow, {
        "target": trace.task.target,
        "relation": _relation(goal),
        "support": goal.args[1],
        "reach": _fmt(reach),
        "lower": _fmt(lower),
    }


def _retry(rule: dict, trace: ExecutionTrace, step: Optional[TraceStep]) -> Proposal:
    flow = list(trace.flow)
    g = next((i for i, a in enumerate(flow) if a.kind == K.GRASP), None)
    if g is None:
        return [PrimitiveAction(K.RETREAT)] + flow, {}
    return _realign_before(flow, g, rule), {}


_REPAIRS: dict[str, Callable[[dict, ExecutionTrace, Optional[TraceStep]], Proposal]] = {
    "REPAIR-01": _sidestep,
    "REPAIR-02": _regrasp,
    "REPAIR-03": _close_harder,
    "REPAIR-04": _open_further,
    "REPAIR-05": _reach_deeper,
    "REPAIR-06": _retry,
}


# ─── Critic ───────────────────────────────────────────────────────────────────

class OracleCritic(Critic):
    name = "oracle"

    def __init__(self, rules: list[dict] | None = None) -> None:
        self.rules = rules if rules is not None else REPAIR_RULES

    # ── Inspector ──────────────────────────────────────────────────────────────

    def _flags(self, trace: ExecutionTrace, step: TraceStep) -> set[CritiqueFlag]:
        flags = {_EVENT_FLAGS[e.kind] for e in step.events if e.kind in _EVENT_FLAGS}
        goal = _placement_goal(trace.task)
        if (
            step.action.kind == K.UNGRASP and step.index == len(trace.steps)
            and goal is not None and not evaluate_predicate(step.post_state, goal)
        ):
            flags.add(CritiqueFlag.NOT_PLACED)
        if not flags and not trace.success and step.action.kind in MOVEMENTS and not step.changed:
            flags.add(CritiqueFlag.NO_PROGRESS)
        return flags or {CritiqueFlag.OK}

    def _text(self, trace: ExecutionTrace, step: TraceStep, flags: set[CritiqueFlag]) -> str:
        dominant = next(f for f in FLAG_ORDER if CritiqueFlag(f) in flags)
        goal = _placement_goal(trace.task)
        if dominant == CritiqueFlag.DOOR_DISTURBED.value:
            subject = _event_subject(step, EventKind.DOOR_DISTURBED, "the fixture")
        elif dominant == CritiqueFlag.COLLISION.value:
            subject = _event_subject(step, EventKind.COLLISION, "the room boundary")
        else:
            subject = trace.task.target
        return INSPECTOR_TEXTS[dominant].format(
            subject=subject,
            action=step.action.label(),
            relation=_relation(goal) if goal is not None else "at",
            support=goal.args[1] if goal is not None else "its destination",
        )

    def inspect(self, trace: ExecutionTrace, obs: ObservationSet, cfg: EvolutionConfig) -> list[Critique]:
        critiques = []
        for step in trace.steps:
            flags = self._flags(trace, step)
            critiques.append(Critique(
                step_index=step.index,
                text=self._text(trace, step, flags),
                flags=frozenset(flags),
                frames=obs.frame_count(step.index),
            ))
        return critiques

    # ── Supervisor ─────────────────────────────────────────────────────────────

    def supervise(
        self,
        trace: ExecutionTrace,
        critiques: list[Critique],
        task: SimpleTask,
        history: EvolutionHistory,
    ) -> tuple[ActionFlow, str]:
        for rule in self.rules:
            trigger = rule["trigger"]
            if "flag" in trigger or "action_in" in trigger:
                candidates = list(zip(critiques, trace.steps))
            else:
                candidates = [(None, None)]
            for critique, step in candidates:
                if not _matches(trigger, trace, critique, step):
                    continue
                proposal = _REPAIRS[rule["id"]](rule, trace, step)
                if proposal is None:
                    continue
                flow, words = proposal
                log.info("%s (%s) fired for %s", rule["id"], rule["strategy"], task.name)
                return _rounded(flow), rule["reason"].format(**words)
        raise NoTemplateError(f"no repair rule matches the failed trace of {task.name!r}")
