"""
Task generation pipeline.
Runs the three stages for one keyword and scene:
  expand       → grounded task name + detail message
  decompose    → ordered simple tasks joined by transfers
  instantiate  → BDDL documents, graspability scales, initial action flows
Every failure leaves tagged with the stage that raised it.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Any, Optional

from ..core.errors import InitUnsatisfiedError, InvalidDecompositionError, TaskWorldError
from ..core.tracer import get_tracer
from ..evolve.codec import encode_flow
from ..models.actions import ActionFlow
from ..models.planning import ExpandResponse, SubtaskConfig, SubtaskKind
from ..models.predicates import GRIPPER, Predicate
from ..models.scene import RobotConfig, SceneConfig
from ..models.tasks import ComplexTask, SimpleTask, TaskKeyword
from ..scene.scaling import RoundingMode, first_occurrence_scales
from ..world.execution import initial_world
from ..world.predicates import evaluate_predicate, inside
from ..world.state import WorldState
from .bddl import emit_bddl
from .flows import plan_initial_flow
from .planners.base import Planner

log = logging.getLogger(__name__)


@dataclass
class GenerationBundle:
    keyword: TaskKeyword
    plan: ComplexTask
    flows: list[ActionFlow]
    scales: dict[str, float]
    bddl: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "keyword": self.keyword.text,
            "scene_id": self.keyword.scene_id,
            "task": self.plan.to_dict(),
            "flows": {t.name: encode_flow(f) for t, f in zip(self.plan.subtasks, self.flows)},
            "scales": dict(sorted(self.scales.items())),
        }


# ─── Stage I ──────────────────────────────────────────────────────────────────

def expand(keyword: TaskKeyword, scene: SceneConfig, planner: Planner) -> ExpandResponse:
    expansion = planner.expand(keyword, scene)
    log.info("Expanded %r -> %s", keyword.text, expansion.task_activity_name)
    return expansion


# ─── Stage II ─────────────────────────────────────────────────────────────────

def _require_articulated(scene: SceneConfig, fixture: str, cfg: SubtaskConfig) -> None:
    if scene.get(fixture).articulation is None:
        raise InvalidDecompositionError(f"subtask {cfg.name!r}: {fixture!r} has no articulated part")


def subtask_from_config(cfg: SubtaskConfig, scene: SceneConfig, state: WorldState) -> SimpleTask:
    """Derive the init/goal conjunctions of one subtask from its category and ids."""
    if cfg.target_id is None:
        raise InvalidDecompositionError(f"subtask {cfg.name!r} has no target object")
    for oid in (cfg.target_id, cfg.support_init_id, cfg.support_goal_id):
        if oid is not None and not scene.has(oid):
            raise InvalidDecompositionError(f"subtask {cfg.name!r} names {oid!r}, which is not in the scene")

    x = cfg.target_id
    kind = cfg.bddl_category
    if kind in (SubtaskKind.OPEN, SubtaskKind.CLOSE):
        _require_articulated(scene, x, cfg)
        is_open = Predicate.open(x)
        init, goal = (is_open.negate(), is_open) if kind == SubtaskKind.OPEN else (is_open, is_open.negate())
    elif kind == SubtaskKind.PICK_UP:
        s = cfg.support_init_id
        if s is None:
            raise InvalidDecompositionError(f"pick subtask {cfg.name!r} has no initial support")
        rests = Predicate.inside(x, s) if inside(state, x, s) else Predicate.ontop(x, s)
        init, goal = rests, rests.negate()
    else:
        s = cfg.support_goal_id
        if s is None:
            raise InvalidDecompositionError(f"place subtask {cfg.name!r} has no goal support")
        init = Predicate.inside(x, GRIPPER)
        goal = Predicate.inside(x, s) if kind == SubtaskKind.PUT_INTO else Predicate.ontop(x, s)

    return SimpleTask(
        name=cfg.name,
        description=cfg.description,
        target=x,
        init=(init,),
        goal=(goal,),
        support_init=cfg.support_init_id,
        support_goal=cfg.support_goal_id,
        bddl_category=kind.value,
    )


def decompose(expansion: ExpandResponse, keyword: TaskKeyword, scene: SceneConfig, planner: Planner) -> ComplexTask:
    response = planner.decompose(expansion, keyword, scene)
    if not response.subtasks:
        raise InvalidDecompositionError(f"{expansion.task_activity_name!r} decomposed into zero subtasks")
    state = WorldState.initial(scene)
    subtasks = [subtask_from_config(cfg, scene, state) for cfg in response.subtasks]
    plan = ComplexTask.chain(expansion.task_activity_name, expansion.task_detail_message, subtasks)
    log.info("Decomposed %s: %s", plan.name, ", ".join(t.name for t in subtasks))
    return plan


# ─── Stage III ────────────────────────────────────────────────────────────────

def instantiate(
    plan: ComplexTask,
    scene: SceneConfig,
    robot: RobotConfig | None = None,
    scale_mode: RoundingMode = "decimals",
) -> tuple[ComplexTask, list[ActionFlow], dict[str, float], dict[str, str]]:
    scales = first_occurrence_scales([scene.get(t.target) for t in plan.subtasks], robot, mode=scale_mode)
    bddl = {t.name: emit_bddl(t) for t in plan.subtasks}

    flows: list[ActionFlow] = []
    previous: Optional[SimpleTask] = None
    for task in plan.subtasks:
        flows.append(plan_initial_flow(task, scene, previous))
        previous = task

    first = plan.subtasks[0]
    world = initial_world(scene, first, scales, robot)
    unmet = [p.to_bddl() for p in first.init if not evaluate_predicate(world, p)]
    if unmet:
        raise InitUnsatisfiedError(
            f"init of {first.name!r} does not hold in scene {scene.scene_id!r}: {' '.join(unmet)}"
        )
    return plan.with_flows(flows), flows, scales, bddl


# ─── Orchestration ────────────────────────────────────────────────────────────

def generate(
    keyword: TaskKeyword | str,
    scene: SceneConfig,
    planner: Planner,
    *,
    robot: RobotConfig | None = None,
    scale_mode: RoundingMode = "decimals",
) -> GenerationBundle:
    if isinstance(keyword, str):
        keyword = TaskKeyword(keyword, scene.scene_id)
    tracer = get_tracer()

    with tracer.start_as_current_span("taskgen.generate") as root_span:
        root_span.set_attribute("keyword", keyword.text)
        root_span.set_attribute("scene_id", scene.scene_id)
        root_span.set_attribute("planner", planner.name)
        stage = "expand"
        try:
            with tracer.start_as_current_span("step.expand"):
                expansion = expand(keyword, scene, planner)

            stage = "decompose"
            with tracer.start_as_current_span("step.decompose") as span:
                plan = decompose(expansion, keyword, scene, planner)
                span.set_attribute("subtasks", len(plan.subtasks))

            stage = "instantiate"
            with tracer.start_as_current_span("step.instantiate"):
                plan, flows, scales, bddl = instantiate(plan, scene, robot, scale_mode)
        except TaskWorldError as e:
            root_span.set_attribute("error.stage", stage)
            raise e.with_stage(stage)

    return GenerationBundle(keyword=keyword, plan=plan, flows=flows, scales=scales, bddl=bddl)
