"""Action transfer: the one-tick context switch between consecutive subtasks."""

from __future__ import annotations

from ..models.tasks import ActionTransfer, TaskContext
from .state import EventKind, WorldState


def apply_transfer(state: WorldState, transfer: ActionTransfer, context: TaskContext | None = None) -> WorldState:
    """
    Advance one tick and swap the active context to the next target. Poses,
    joints and the gripper are untouched. Without an explicit `context` the
    supports of the current context are carried over.
    """
    state.require(transfer.prev_target)
    state.require(transfer.next_target)
    if context is None:
        context = TaskContext(transfer.next_target, state.context.support_init, state.context.support_goal)
    for oid in context.ids():
        state.require(oid)

    s = state.copy()
    s.tick += 1
    s.context = context
    s.emit(
        EventKind.TRANSFER,
        (transfer.prev_target, transfer.next_target),
        f"context {transfer.prev_target} -> {transfer.next_target}",
    )
    return s
