"""Frame sampling, downsampling and per-step observation windows."""

import base64
from fractions import Fraction
from math import floor

import pytest

from taskworld.core.errors import StepOutOfRangeError
from taskworld.models.evolution import EvolutionConfig, View
from taskworld.observe.frames import capture, downsample, downsample_indices, window
from taskworld.world.execution import execute_flow, initial_world

CAP = 6


def _index_oracle(n: int, cap: int) -> list[int]:
    """Evenly spaced indices, exact rational arithmetic, ties rounded up."""
    if n <= cap:
        return list(range(n))
    if cap == 1:
        return [n - 1]
    return [floor(Fraction(i * (n - 1), cap - 1) + Fraction(1, 2)) for i in range(cap)]


@pytest.mark.parametrize("n", range(1, 41))
def test_downsample_matches_the_index_oracle(n):
    indices = downsample_indices(n, CAP)
    assert indices == _index_oracle(n, CAP)
    assert len(indices) == min(n, CAP)
    assert indices[0] == 0
    assert indices[-1] == n - 1
    assert all(a < b for a, b in zip(indices, indices[1:]))


def test_downsample_keeps_frames_in_order():
    frames = [f"f{i}" for i in range(13)]
    assert downsample(frames, 4) == ["f0", "f4", "f8", "f12"]
    assert downsample(frames, 1) == ["f12"]
    assert downsample(frames[:3], 6) == frames[:3]


def test_zero_cap_is_rejected():
    with pytest.raises(StepOutOfRangeError):
        downsample_indices(5, 0)


# ─── Capture ──────────────────────────────────────────────────────────────────

@pytest.fixture(scope="module")
def pick_trace(bundles):
    scene, bundle = bundles["T3"]
    task = bundle.plan.subtasks[0]
    return execute_flow(initial_world(scene, task, bundle.scales), bundle.flows[0], task)


def test_capture_is_aligned_with_the_trace(pick_trace):
    cfg = EvolutionConfig(views="Global,Head,Wrist", max_frames_per_action=3)
    obs = capture(pick_trace, cfg)
    assert len(obs) == len(pick_trace.steps)
    for step in pick_trace.steps:
        counts = {len(obs.frames(step.index, v)) for v in cfg.views}
        assert len(counts) == 1
        assert 1 <= obs.frame_count(step.index) <= 3
        for view in cfg.views:
            frames = obs.frames(step.index, view)
            ticks = [f.tick for f in frames]
            assert ticks == sorted(ticks)
            assert ticks[-1] == step.end_tick
            assert all(f.view == view for f in frames)


def test_last_frame_carries_the_post_step_predicates(pick_trace):
    obs = capture(pick_trace, EvolutionConfig())
    grasp = next(s for s in pick_trace.steps if s.action.kind.value == "LIFT_EEF_UP")
    last = obs.frames(grasp.index, View.GLOBAL)[-1].payload
    assert last["held"] == "apple_0"
    assert "(ontop apple_0 cabinet_0)" not in last["predicates"]


def test_wrist_view_sees_less_than_global(pick_trace):
    obs = capture(pick_trace, EvolutionConfig(views=("Global", "Wrist")))
    g = obs.frames(1, View.GLOBAL)[-1].payload["visible"]
    w = obs.frames(1, View.WRIST)[-1].payload["visible"]
    assert set(w) <= set(g)
    assert len(w) < len(g)


def test_window_spans_the_look_back(pick_trace):
    obs = capture(pick_trace, EvolutionConfig())
    win = window(obs, 3, p1=1)
    assert len(win[View.GLOBAL]) == obs.frame_count(2) + obs.frame_count(3)
    assert len(window(obs, 1, p1=5)[View.HEAD]) == obs.frame_count(1)
    with pytest.raises(StepOutOfRangeError):
        window(obs, len(obs) + 1, p1=1)
    with pytest.raises(StepOutOfRangeError):
        obs.frames(0, View.GLOBAL)


def test_raster_frames_are_pgm(pick_trace):
    obs = capture(pick_trace, EvolutionConfig(raster=True, views=("Head",)))
    raw = base64.b64decode(obs.frames(1, View.HEAD)[0].payload["raster"])
    assert raw.startswith(b"P5\n64 64\n255\n")
    assert len(raw) == len(b"P5\n64 64\n255\n") + 64 * 64
