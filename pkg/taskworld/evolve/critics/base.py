"""
Abstract base class for critics.

A critic plays two roles per failed iteration:
  - inspector:  one Critique per executed step, from that step's observation window
  - supervisor: a revised action flow plus the reasoning behind it
"""

from __future__ import annotations
import logging
from abc import ABC, abstractmethod

from ...models.actions import ActionFlow
from ...models.evolution import Critique, EvolutionConfig, EvolutionHistory
from ...models.tasks import SimpleTask
from ...observe.frames import ObservationSet
from ...world.execution import ExecutionTrace

log = logging.getLogger(__name__)


class Critic(ABC):
    name: str = "critic"

    @abstractmethod
    def inspect(self, trace: ExecutionTrace, obs: ObservationSet, cfg: EvolutionConfig) -> list[Critique]:
        """Return exactly one critique per step of `trace`, in step order."""

    @abstractmethod
    def supervise(
        self,
        trace: ExecutionTrace,
        critiques: list[Critique],
        task: SimpleTask,
        history: EvolutionHistory,
    ) -> tuple[ActionFlow, str]:
        """Propose the next flow and the reason for it."""

    def close(self) -> None:
        pass
