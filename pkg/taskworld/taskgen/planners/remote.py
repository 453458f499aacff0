"""
Remote planner client.
Posts PlannerRequest documents to AGT_PLANNER_URL. Responses are validated
and then trusted; ids the scene does not know are rejected, never repaired.
"""

from __future__ import annotations
import logging

import httpx
from pydantic import ValidationError

from ...config.settings import RemoteSettings, planner_endpoint
from ...core.errors import InvalidDecompositionError, PlannerUnavailableError
from ...core.http_client import JsonClient
from ...models.planning import DecomposeResponse, ExpandResponse, PlannerRequest, PlannerStage
from ...models.scene import SceneConfig
from ...models.tasks import TaskKeyword
from .base import Planner

log = logging.getLogger(__name__)


class RemotePlanner(Planner):
    name = "remote"

    def __init__(
        self,
        settings: RemoteSettings | None = None,
        *,
        client: JsonClient | None = None,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        self._client = client or JsonClient(
            planner_endpoint(), settings, unavailable=PlannerUnavailableError, transport=transport,
        )

    def _post(self, request: PlannerRequest) -> dict:
        log.info("Remote planner: %s for %r", request.stage.value, request.keyword)
        return self._client.post_json(request.to_wire())

    def expand(self, keyword: TaskKeyword, scene: SceneConfig) -> ExpandResponse:
        body = self._post(PlannerRequest(
            stage=PlannerStage.EXPAND, keyword=keyword.text, scene=self.summarize(scene),
        ))
        try:
            return ExpandResponse.model_validate(body)
        except ValidationError as e:
            raise InvalidDecompositionError(f"planner expand response rejected: {e.errors()[0]['msg']}") from e

    def decompose(self, expansion: ExpandResponse, keyword: TaskKeyword, scene: SceneConfig) -> DecomposeResponse:
        body = self._post(PlannerRequest(
            stage=PlannerStage.DECOMPOSE,
            keyword=keyword.text,
            scene=self.summarize(scene),
            prior=expansion.model_dump(),
        ))
        try:
            return DecomposeResponse.model_validate(body)
        except ValidationError as e:
            raise InvalidDecompositionError(f"planner decompose response rejected: {e.errors()[0]['msg']}") from e

    def close(self) -> None:
        self._client.close()
