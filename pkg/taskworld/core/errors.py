"""
Exception hierarchy for the task-world engine.
Every error carries the CLI exit code of its family and an optional pipeline
stage tag, so failures propagate through generation and evolution unchanged
and the CLI maps them to the documented exit-code taxonomy.
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_GENERATION = 3
EXIT_REMOTE = 4


class TaskWorldError(Exception):
    """Base class. `stage` names the pipeline stage that raised, when known."""

    exit_code = EXIT_VALIDATION

    def __init__(self, message: str, *, stage: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.stage = stage

    def with_stage(self, stage: str) -> "TaskWorldError":
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self) -> str:
        return f"[{self.stage}] {self.message}" if self.stage else self.message


# ─── Validation (exit 1) ──────────────────────────────────────────────────────

class ValidationFailure(TaskWorldError):
    exit_code = EXIT_VALIDATION


class SceneValidationError(ValidationFailure):
    """One or more scene invariants failed. `issues` holds (field_path, message) pairs."""

    def __init__(self, issues: list[tuple[str, str]], *, stage: str | None = None) -> None:
        self.issues = list(issues)
        summary = "; ".join(f"{path}: {msg}" for path, msg in self.issues) or "invalid scene"
        super().__init__(summary, stage=stage)

    @property
    def field_path(self) -> str:
        return self.issues[0][0] if self.issues else ""


class UnknownCategoryError(ValidationFailure):
    pass


class UnknownObjectError(ValidationFailure):
    pass


class InvalidParamError(ValidationFailure):
    pass


class MissingContextError(ValidationFailure):
    pass


class EmptyConjunctionError(ValidationFailure):
    pass


class SliceViolationError(ValidationFailure):
    pass


class StepOutOfRangeError(ValidationFailure):
    pass


class MisalignedObservationsError(ValidationFailure):
    pass


class InitUnsatisfiedError(ValidationFailure):
    pass


class EmptyBatchError(ValidationFailure):
    pass


# ─── IO (exit 2) ──────────────────────────────────────────────────────────────

class IOFailure(TaskWorldError):
    exit_code = EXIT_IO


class SceneParseError(IOFailure):
    pass


class PersistIOError(IOFailure):
    pass


# ─── Generation (exit 3) ──────────────────────────────────────────────────────

class GenerationFailure(TaskWorldError):
    exit_code = EXIT_GENERATION


class NoTemplateError(GenerationFailure):
    pass


class UnresolvedObjectError(GenerationFailure):
    pass


class InvalidDecompositionError(GenerationFailure):
    pass


class BddlParseError(GenerationFailure):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownActionIdError(GenerationFailure):
    pass


class ParamShapeMismatchError(GenerationFailure):
    pass


class EmptySequenceError(GenerationFailure):
    pass


class RepeatedProposalError(GenerationFailure):
    pass


# ─── Remote (exit 4) ──────────────────────────────────────────────────────────

class RemoteFailure(TaskWorldError):
    exit_code = EXIT_REMOTE


class ConfigError(RemoteFailure):
    """A remote mode was selected but its endpoint is not configured."""


class PlannerUnavailableError(RemoteFailure):
    pass


class CriticUnavailableError(RemoteFailure):
    pass
