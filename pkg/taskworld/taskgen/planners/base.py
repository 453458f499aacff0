"""
Abstract base class for task planners.
"""

from __future__ import annotations
import logging
from abc import ABC, abstractmethod

from ...models.planning import DecomposeResponse, ExpandResponse, SceneSummary
from ...models.scene import SceneConfig
from ...models.tasks import TaskKeyword
from ...scene.classify import classify_object

log = logging.getLogger(__name__)


class Planner(ABC):
    """
    Two-stage planner contract:
    - expand:    keyword + scene → grounded task name and detail message
    - decompose: expansion + scene → ordered subtask configs
    Implementations must be safe to call concurrently.
    """

    name: str = "planner"

    @abstractmethod
    def expand(self, keyword: TaskKeyword, scene: SceneConfig) -> ExpandResponse:
        ...

    @abstractmethod
    def decompose(self, expansion: ExpandResponse, keyword: TaskKeyword, scene: SceneConfig) -> DecomposeResponse:
        ...

    # ── Helpers ────────────────────────────────────────────────────────────────

    @staticmethod
    def summarize(scene: SceneConfig) -> SceneSummary:
        classes = {o.id: classify_object(o).value for o in scene.objects}
        return SceneSummary.of(scene, classes)

    def close(self) -> None:
        pass
