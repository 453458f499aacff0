"""
Pydantic v2 wire models for the remote critic.
Supervisor responses use the `reason` / `new_sequence` keys of the evolution log.
"""

from __future__ import annotations
from enum import Enum
from typing import Any, Optional, Union

from pydantic import BaseModel, Field, field_validator


class CriticRole(str, Enum):
    INSPECTOR = "inspector"
    SUPERVISOR = "supervisor"


class StepObservations(BaseModel):
    step: int
    views: dict[str, list[dict[str, Any]]]


class HistoryEntry(BaseModel):
    new_sequence: list[Union[int, dict[str, Any]]]
    reason: str


class CriticRequest(BaseModel):
    role: CriticRole
    task: dict[str, Any]
    actions: list[Union[int, dict[str, Any]]]
    critiques: list[str] = Field(default_factory=list)
    observations: list[StepObservations] = Field(default_factory=list)
    history: list[HistoryEntry] = Field(default_factory=list)

    def to_wire(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


class InspectorResponse(BaseModel):
    observations: dict[str, str]
    # Optional per-key flag lists; absent keys fall back to reading the text.
    flags: Optional[dict[str, list[str]]] = None

    @field_validator("observations")
    @classmethod
    def _non_empty(cls, v: dict[str, str]) -> dict[str, str]:
        if not v:
            raise ValueError("inspector returned no observations")
        return v


class SupervisorResponse(BaseModel):
    reason: str
    new_sequence: Any
