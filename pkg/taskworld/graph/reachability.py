"""
Compositional reachability of a complex task.

A chain is feasible when every segment reaches its goal from the
post-transfer state of its predecessor and every boundary lines up:
the next subtask's init holds on the state right after the transfer.
Probabilities collapse to {0, 1} in the deterministic simulator, so the
product condition becomes a conjunction.
"""

from __future__ import annotations
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Optional

from ..config import defaults
from ..core.errors import EmptyConjunctionError, InvalidParamError
from ..models.actions import ActionFlow
from ..models.predicates import Predicate
from ..models.scene import RobotConfig, SceneConfig
from ..models.tasks import ActionTransfer, ComplexTask, TaskContext
from ..world.execution import execute_flow, initial_world
from ..world.predicates import evaluate_predicate
from ..world.state import WorldState
from ..world.transfer import apply_transfer
from .task_graph import build_graph, embed_flow

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SegmentResult:
    index: int                      # 1-based subtask position
    subtask: str
    executed: bool
    success: bool
    release_tick: Optional[int] = None
    goal_tick: Optional[int] = None


@dataclass(frozen=True)
class TransferResult:
    index: int                      # 1-based; joins subtask `index` to `index + 1`
    prev_target: str
    next_target: str
    boundary_match: bool


@dataclass
class ReachabilityReport:
    feasible: bool
    segments: list[SegmentResult] = field(default_factory=list)
    transfers: list[TransferResult] = field(default_factory=list)
    failing_index: Optional[int] = None
    failing_kind: Optional[str] = None    # "segment" | "transfer"
    horizon: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "feasible": self.feasible,
            "failing_index": self.failing_index,
            "failing_kind": self.failing_kind,
            "horizon": self.horizon,
            "segments": [asdict(s) for s in self.segments],
            "transfers": [asdict(t) for t in self.transfers],
        }


def check_boundary(
    prev_goal: Iterable[Predicate],
    next_init: Iterable[Predicate],
    state_after_prev: WorldState,
    transfer: ActionTransfer | None = None,
    context: TaskContext | None = None,
) -> bool:
    """
    True iff `next_init` holds on the state an instant after the previous
    segment. With a transfer the check runs on the transferred state; since a
    transfer never changes a predicate, omitting it gives the same answer.
    """
    prev_goal, next_init = tuple(prev_goal), tuple(next_init)
    if not next_init:
        raise EmptyConjunctionError("next subtask has an empty init conjunction")
    if not prev_goal:
        raise EmptyConjunctionError("previous subtask has an empty goal conjunction")
    for p in prev_goal:
        evaluate_predicate(state_after_prev, p)     # id check only
    state = state_after_prev
    if transfer is not None:
        state = apply_transfer(state_after_prev, transfer, context)
    return all(evaluate_predicate(state, p) for p in next_init)


def check_reachability(
    scene: SceneConfig,
    plan: ComplexTask,
    flows: list[ActionFlow],
    *,
    scales: dict[str, float] | None = None,
    robot: RobotConfig | None = None,
    max_steps: int = defaults.DEFAULT_MAX_STEPS,
) -> ReachabilityReport:
    """
    Run every segment in order, even after a failure, and report the first
    failing segment or boundary.
    """
    if len(flows) != len(plan.subtasks):
        raise InvalidParamError(f"{len(flows)} flows for {len(plan.subtasks)} subtasks of {plan.name!r}")

    graph = build_graph(scene, max_steps)
    state = initial_world(scene, plan.subtasks[0], scales, robot)
    report = ReachabilityReport(feasible=True)
    last_node = None

    for k, (task, flow) in enumerate(zip(plan.subtasks, flows), start=1):
        nodes = embed_flow(graph, task, flow)
        graph.add_path(k, task, nodes)
        if last_node is not None:
            graph.add_transfer(k - 1, plan.transfers[k - 2], last_node, nodes[0])
        last_node = nodes[-1]

        trace = execute_flow(state, flow, task)
        report.segments.append(SegmentResult(
            k, task.name, True, trace.success, trace.release_tick, trace.goal_tick,
        ))
        if not trace.success and report.feasible:
            report.feasible, report.failing_index, report.failing_kind = False, k, "segment"
        state = trace.final_state

        if k < len(plan.subtasks):
            transfer = plan.transfers[k - 1]
            nxt = plan.subtasks[k]
            match = check_boundary(task.goal, nxt.init, state, transfer, nxt.context())
            report.transfers.append(TransferResult(k, transfer.prev_target, transfer.next_target, match))
            if not match and report.feasible:
                report.feasible, report.failing_index, report.failing_kind = False, k, "transfer"
            state = apply_transfer(state, transfer, nxt.context())

    report.horizon = graph.horizon()
    log.info(
        "Reachability of %s: feasible=%s failing=%s %s",
        plan.name, report.feasible, report.failing_kind, report.failing_index,
    )
    return report
