"""
Multi-view observations for the critics.
A step lasting t ticks yields ceil(t / p2) frames per view, uniformly
downsampled to the per-action cap. Payloads are deterministic state
summaries; with raster enabled they also carry a base64 PGM top-down image.
"""

from __future__ import annotations
import base64
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Sequence, TypeVar

import numpy as np

from ..core.errors import StepOutOfRangeError
from ..models.evolution import EvolutionConfig, View
from ..world.execution import ExecutionTrace
from ..world.geometry import horizontal_distance
from ..world.predicates import snapshot_predicates
from ..world.state import WorldState
from . import raster

log = logging.getLogger(__name__)

T = TypeVar("T")

# Objects farther than this from the camera origin are left out of a view's summary.
VIEW_RADIUS = {View.GLOBAL: math.inf, View.HEAD: 2.5, View.WRIST: 0.6}


@dataclass(frozen=True)
class Frame:
    tick: int
    view: View
    payload: dict[str, Any]


@dataclass
class ObservationSet:
    """step index (1-based) → view → frames, ordered by tick."""
    cfg: EvolutionConfig
    steps: dict[int, dict[View, tuple[Frame, ...]]] = field(default_factory=dict)

    @property
    def views(self) -> tuple[View, ...]:
        return self.cfg.views

    def __len__(self) -> int:
        return len(self.steps)

    def frames(self, step: int, view: View) -> tuple[Frame, ...]:
        if step not in self.steps:
            raise StepOutOfRangeError(f"step {step} outside 1..{len(self.steps)}")
        return self.steps[step][view]

    def frame_count(self, step: int) -> int:
        """Frames one view contributes for a step (equal across views)."""
        return len(self.frames(step, self.views[0]))


# ─── Sampling ─────────────────────────────────────────────────────────────────

def downsample_indices(n: int, cap: int) -> list[int]:
    if cap < 1:
        raise StepOutOfRangeError(f"frame cap must be at least 1, got {cap}")
    if n <= cap:
        return list(range(n))
    if cap == 1:
        return [n - 1]
    # round half up, so 2.5 → 3
    raw = np.arange(cap) * (n - 1) / (cap - 1)
    return [int(i) for i in np.floor(raw + 0.5)]


def downsample(frames: Sequence[T], cap: int) -> list[T]:
    """Keep at most `cap` frames, always including the first and last."""
    frames = list(frames)
    return [frames[i] for i in downsample_indices(len(frames), cap)]


def _frame_ticks(start: int, duration: int, p2: int) -> list[int]:
    count = max(1, math.ceil(duration / p2))
    end = start + duration
    return [min(start + (i + 1) * p2, end) for i in range(count)]


# ─── Summaries ────────────────────────────────────────────────────────────────

def _round(values, digits: int = 4) -> list[float]:
    return [round(float(v), digits) + 0.0 for v in values]


def _visible(state: WorldState, view: View, base: Sequence[float], eef: Sequence[float]) -> set[str]:
    radius = VIEW_RADIUS[view]
    origin = (eef[0], eef[1], eef[2]) if view == View.WRIST else (base[0], base[1], 0.0)
    return {
        oid for oid in state.scene.object_ids
        if horizontal_distance(state.position(oid), origin) <= radius
    }


def _summary(
    before: WorldState,
    after: WorldState,
    tick: int,
    alpha: float,
    view: View,
    final: bool,
    events: list[dict[str, Any]],
) -> dict[str, Any]:
    """
    Robot poses are interpolated between the step's end points; predicates
    switch to the post-step valuation on the step's last frame.
    """
    base = np.asarray(before.robot_base) + alpha * (np.asarray(after.robot_base) - np.asarray(before.robot_base))
    eef = np.asarray(before.eef) + alpha * (np.asarray(after.eef) - np.asarray(before.eef))
    state = after if final else before
    visible = _visible(state, view, base, eef)
    holding = [
        p.to_bddl() for p, v in snapshot_predicates(state)
        if v and (view == View.GLOBAL or set(p.object_ids()) & visible)
    ]
    return {
        "tick": tick,
        "view": view.value,
        "robot": {"base": _round(base), "eef": _round(eef)},
        "gripper": state.gripper.value,
        "held": state.held_object,
        "visible": sorted(visible),
        "predicates": holding,
        "events": [e for e in events if e["tick"] <= tick],
    }


def capture(trace: ExecutionTrace, cfg: EvolutionConfig) -> ObservationSet:
    obs = ObservationSet(cfg=cfg)
    before = trace.initial_state
    for step in trace.steps:
        ticks = _frame_ticks(step.start_tick, step.duration_ticks, cfg.p2)
        events = [e.to_dict() for e in step.events]
        per_view: dict[View, tuple[Frame, ...]] = {}
        for view in cfg.views:
            frames = []
            for t in downsample(ticks, cfg.max_frames_per_action):
                alpha = (t - step.start_tick) / step.duration_ticks if step.duration_ticks else 1.0
                payload = _summary(before, step.post_state, t, alpha, view, t == step.end_tick, events)
                if cfg.raster:
                    image = raster.render(step.post_state if t == step.end_tick else before, view)
                    payload["raster"] = base64.b64encode(raster.to_pgm(image)).decode("ascii")
                frames.append(Frame(t, view, payload))
            per_view[view] = tuple(frames)
        obs.steps[step.index] = per_view
        before = step.post_state
    log.debug("Captured %d steps x %d views for %s", len(obs), len(cfg.views), trace.task.name)
    return obs


# ─── Windows ──────────────────────────────────────────────────────────────────

def window(obs: ObservationSet, step: int, p1: int) -> dict[View, list[Frame]]:
    """Frames of steps max(step - p1, 1)..step, concatenated per view."""
    if step not in obs.steps:
        raise StepOutOfRangeError(f"step {step} outside 1..{len(obs.steps)}")
    first = max(step - p1, 1)
    return {
        view: [f for j in range(first, step + 1) for f in obs.steps[j][view]]
        for view in obs.views
    }
