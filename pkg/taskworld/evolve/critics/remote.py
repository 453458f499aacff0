"""
Remote critic client.
The inspector is asked once per step with that step's p1 observation window;
the supervisor once per failed iteration with the full critique list and
evolution history. Endpoint and token come from AGT_CRITIC_URL / AGT_CRITIC_TOKEN.
"""

from __future__ import annotations
import logging
import re
from typing import Any

import httpx
from pydantic import ValidationError

from ...config.settings import RemoteSettings, critic_endpoint
from ...core.errors import CriticUnavailableError
from ...core.http_client import JsonClient
from ...models.actions import ActionFlow
from ...models.critic import (
    CriticRequest,
    CriticRole,
    HistoryEntry,
    InspectorResponse,
    StepObservations,
    SupervisorResponse,
)
from ...models.evolution import Critique, CritiqueFlag, EvolutionConfig, EvolutionHistory
from ...models.tasks import SimpleTask
from ...observe.frames import ObservationSet
from ...world.execution import ExecutionTrace
from ..codec import decode_flow, encode_flow
from .base import Critic

log = logging.getLogger(__name__)

# Text heuristics used when the inspector sends no explicit flags.
_FLAG_PATTERNS: list[tuple[re.Pattern, tuple[CritiqueFlag, ...]]] = [
    (re.compile(r"\bdoor\b.*\b(swing|swung|shut)", re.I), (CritiqueFlag.COLLISION, CritiqueFlag.DOOR_DISTURBED)),
    (re.compile(r"\b(collid|collision|bump|struck|strike)", re.I), (CritiqueFlag.COLLISION,)),
    (re.compile(r"grasping air|not secured|empty grasp|misses the", re.I), (CritiqueFlag.GRASP_EMPTY,)),
    (re.compile(r"(does not|doesn't|fails to) (come to rest|land|end up)|not placed", re.I), (CritiqueFlag.NOT_PLACED,)),
    (re.compile(r"no (visible )?change|no progress", re.I), (CritiqueFlag.NO_PROGRESS,)),
]


def flags_from_text(text: str) -> frozenset[CritiqueFlag]:
    flags: set[CritiqueFlag] = set()
    for pattern, found in _FLAG_PATTERNS:
        if pattern.search(text):
            flags.update(found)
    return frozenset(flags or {CritiqueFlag.OK})


def _parse_flags(raw: list[str]) -> frozenset[CritiqueFlag]:
    try:
        flags = {CritiqueFlag(f) for f in raw}
    except ValueError as e:
        raise CriticUnavailableError(f"inspector sent an unknown flag: {e}") from e
    if CritiqueFlag.OK in flags and len(flags) > 1:
        flags.discard(CritiqueFlag.OK)
    return frozenset(flags or {CritiqueFlag.OK})


class RemoteCritic(Critic):
    name = "remote"

    def __init__(
        self,
        settings: RemoteSettings | None = None,
        *,
        client: JsonClient | None = None,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        self._client = client or JsonClient(
            critic_endpoint(), settings, unavailable=CriticUnavailableError, transport=transport,
        )

    # ── Inspector ──────────────────────────────────────────────────────────────

    @staticmethod
    def _observations(obs: ObservationSet, step: int, p1: int) -> list[StepObservations]:
        """The step's look-back window, one entry per step."""
        return [
            StepObservations(step=j, views={v.value: [f.payload for f in obs.frames(j, v)] for v in obs.views})
            for j in range(max(step - p1, 1), step + 1)
        ]

    def _inspect_step(self, trace: ExecutionTrace, obs: ObservationSet, cfg: EvolutionConfig, j: int) -> Critique:
        request = CriticRequest(
            role=CriticRole.INSPECTOR,
            task=trace.task.to_dict(),
            actions=encode_flow(trace.flow[:j]),
            observations=self._observations(obs, j, cfg.p1),
        )
        body = self._client.post_json(request.to_wire())
        try:
            response = InspectorResponse.model_validate(body)
        except ValidationError as e:
            raise CriticUnavailableError(f"inspector response rejected: {e.errors()[0]['msg']}") from e

        prefix = f"Step {j - 1} observation"
        key = next((k for k in response.observations if k.startswith(prefix)), None)
        if key is None and len(response.observations) == 1:
            key = next(iter(response.observations))
        if key is None:
            raise CriticUnavailableError(f"inspector response has no entry for {prefix!r}")

        text = response.observations[key]
        if response.flags and key in response.flags:
            flags = _parse_flags(response.flags[key])
        else:
            flags = flags_from_text(text)
        return Critique(step_index=j, text=text, flags=flags, frames=obs.frame_count(j))

    def inspect(self, trace: ExecutionTrace, obs: ObservationSet, cfg: EvolutionConfig) -> list[Critique]:
        log.info("Remote inspector: %d steps of %s", len(trace.steps), trace.task.name)
        return [self._inspect_step(trace, obs, cfg, step.index) for step in trace.steps]

    # ── Supervisor ─────────────────────────────────────────────────────────────

    def supervise(
        self,
        trace: ExecutionTrace,
        critiques: list[Critique],
        task: SimpleTask,
        history: EvolutionHistory,
    ) -> tuple[ActionFlow, str]:
        request = CriticRequest(
            role=CriticRole.SUPERVISOR,
            task=task.to_dict(),
            actions=encode_flow(trace.flow),
            critiques=[f"{c.key}: {c.text}" for c in critiques],
            history=[
                HistoryEntry(new_sequence=encode_flow(r.flow), reason=r.supervisor_reason)
                for r in history.records
            ],
        )
        body: dict[str, Any] = self._client.post_json(request.to_wire())
        try:
            response = SupervisorResponse.model_validate(body)
        except ValidationError as e:
            raise CriticUnavailableError(f"supervisor response rejected: {e.errors()[0]['msg']}") from e
        return decode_flow(response.new_sequence), response.reason.strip()

    def close(self) -> None:
        self._client.close()
