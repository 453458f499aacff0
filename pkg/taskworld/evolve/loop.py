"""
Self-evolution loop.

For one subtask:
  execute → goal check → inspect each step → supervise → retry
Every iteration restarts from the subtask's entry state. The loop stops on
the first success or after tau_max evolution iterations.

For a complex task the subtasks run in order; a success hands its final
state (through the action transfer) to the next subtask, an exhausted budget
ends the episode.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Optional

from ..core.errors import (
    EmptySequenceError,
    InitUnsatisfiedError,
    InvalidDecompositionError,
    MisalignedObservationsError,
    RepeatedProposalError,
)
from ..core.tracer import get_tracer
from ..models.actions import ActionFlow
from ..models.evolution import (
    Critique,
    EvolutionConfig,
    EvolutionHistory,
    EvolutionRecord,
    Outcome,
)
from ..models.tasks import ComplexTask, SimpleTask
from ..observe.frames import ObservationSet, capture
from ..world.execution import ExecutionTrace, execute_flow
from ..world.predicates import evaluate_predicate
from ..world.state import WorldState
from ..world.transfer import apply_transfer
from .critics.base import Critic

log = logging.getLogger(__name__)

INITIAL_REASON = "Initial action flow from the subtask template."


@dataclass
class SubtaskEvolution:
    history: EvolutionHistory
    trace: ExecutionTrace           # last execution

    @property
    def final_state(self) -> WorldState:
        return self.trace.final_state


@dataclass
class ComplexEvolution:
    plan: ComplexTask
    results: list[SubtaskEvolution] = field(default_factory=list)

    @property
    def histories(self) -> list[EvolutionHistory]:
        return [r.history for r in self.results]

    @property
    def success(self) -> bool:
        return len(self.results) == len(self.plan.subtasks) and all(h.succeeded for h in self.histories)

    @property
    def total_iterations(self) -> int:
        return sum(h.iterations_used for h in self.histories)


# ─── Critic roles ─────────────────────────────────────────────────────────────

def inspect_steps(trace: ExecutionTrace, obs: ObservationSet, critic: Critic, cfg: EvolutionConfig) -> list[Critique]:
    n = len(trace.steps)
    if set(obs.steps) != set(range(1, n + 1)):
        raise MisalignedObservationsError(
            f"{len(obs)} observation steps for a {n}-step trace of {trace.task.name!r}"
        )
    critiques = critic.inspect(trace, obs, cfg)
    if [c.step_index for c in critiques] != list(range(1, n + 1)):
        raise MisalignedObservationsError(
            f"{critic.name} critic returned {len(critiques)} critiques for {n} steps"
        )
    return critiques


def supervise(
    trace: ExecutionTrace,
    critiques: list[Critique],
    task: SimpleTask,
    history: EvolutionHistory,
    critic: Critic,
) -> tuple[ActionFlow, str]:
    flow, reason = critic.supervise(trace, critiques, task, history)
    if not flow:
        raise EmptySequenceError(f"{critic.name} critic proposed an empty flow for {task.name!r}")
    if flow in history.seen_flows():
        raise RepeatedProposalError(
            f"{critic.name} critic repeated an earlier flow for {task.name!r}"
        )
    return flow, reason


# ─── Simple task ──────────────────────────────────────────────────────────────

def _check_init(world: WorldState, task: SimpleTask) -> None:
    unmet = [p.to_bddl() for p in task.init if not evaluate_predicate(world, p)]
    if unmet:
        raise InitUnsatisfiedError(f"init of {task.name!r} does not hold: {' '.join(unmet)}")


def run_subtask(
    world: WorldState,
    task: SimpleTask,
    flow0: ActionFlow,
    cfg: EvolutionConfig,
    critic: Critic,
) -> SubtaskEvolution:
    _check_init(world, task)
    tracer = get_tracer()
    history = EvolutionHistory(subtask=task.name, tau_max=cfg.tau_max)
    flow, reason = flow0, INITIAL_REASON
    trace: Optional[ExecutionTrace] = None

    with tracer.start_as_current_span("evolve.subtask") as span:
        span.set_attribute("subtask", task.name)
        span.set_attribute("critic", critic.name)
        for iteration in range(cfg.tau_max + 1):
            with tracer.start_as_current_span("evolve.iteration") as it_span:
                # execute_flow works on a copy, so `world` stays the entry state
                trace = execute_flow(world, flow, task)
                it_span.set_attribute("iteration", iteration)
                it_span.set_attribute("success", trace.success)
                it_span.set_attribute("flow.length", len(flow))
                log.info("%s iteration %d: success=%s", task.name, iteration, trace.success)

                if trace.success:
                    history.append(EvolutionRecord(iteration, flow, (), reason, True))
                    history.outcome = Outcome.SUCCEEDED
                    break

                obs = capture(trace, cfg)
                critiques = inspect_steps(trace, obs, critic, cfg)
                history.append(EvolutionRecord(iteration, flow, tuple(critiques), reason, False))
                if iteration == cfg.tau_max:
                    break
                flow, reason = supervise(trace, critiques, task, history, critic)

        if history.outcome is None:
            history.outcome = Outcome.EXHAUSTED
            log.warning("%s exhausted its budget of %d iterations", task.name, cfg.tau_max)
        span.set_attribute("outcome", history.outcome.value)
        span.set_attribute("iterations", history.iterations_used)

    return SubtaskEvolution(history=history, trace=trace)


def evolve_subtask(
    world: WorldState,
    task: SimpleTask,
    flow0: ActionFlow,
    cfg: EvolutionConfig,
    critic: Critic,
) -> EvolutionHistory:
    return run_subtask(world, task, flow0, cfg, critic).history


# ─── Complex task ─────────────────────────────────────────────────────────────

def evolve_complex(
    world: WorldState,
    plan: ComplexTask,
    flows: list[ActionFlow],
    cfg: EvolutionConfig,
    critic: Critic,
) -> ComplexEvolution:
    if len(flows) != len(plan.subtasks):
        raise InvalidDecompositionError(f"{len(flows)} flows for {len(plan.subtasks)} subtasks of {plan.name!r}")
    result = ComplexEvolution(plan=plan)
    state = world
    for k, (task, flow) in enumerate(zip(plan.subtasks, flows)):
        if k > 0:
            state = apply_transfer(state, plan.transfers[k - 1], task.context())
        outcome = run_subtask(state, task, flow, cfg, critic)
        result.results.append(outcome)
        if not outcome.history.succeeded:
            log.warning("%s: stopping after %s", plan.name, task.name)
            break
        state = outcome.final_state
    return result
