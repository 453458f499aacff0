"""
Top-down occupancy rasters.
Global is the whole floor in world axes, Head a square window centred on the
base, Wrist a small crop centred on the end effector.
"""

from __future__ import annotations

import numpy as np

from ..models.evolution import View
from ..models.scene import ObjectClass
from ..world.geometry import footprint_box
from ..world.state import WorldState

RASTER_SIZE = 64
HEAD_SPAN = 3.0
WRIST_SPAN = 0.8

FLOOR = 0
FIXTURE = 96
OPEN_PART = 144
MANIPULABLE = 192
HELD = 224
ROBOT = 255


def _frame(state: WorldState, view: View) -> tuple[float, float, float, float]:
    """(x0, y0, x1, y1) of the rendered window."""
    if view == View.GLOBAL:
        w, h = state.scene.floor_extent
        return 0.0, 0.0, float(w), float(h)
    if view == View.HEAD:
        cx, cy, _ = state.robot_base
        half = HEAD_SPAN / 2
    else:
        cx, cy, _ = state.eef
        half = WRIST_SPAN / 2
    return cx - half, cy - half, cx + half, cy + half


def _fill(img: np.ndarray, window, lo, hi, value: int) -> None:
    x0, y0, x1, y1 = window
    n = img.shape[0]
    cols = np.clip(np.floor((np.array([lo[0], hi[0]]) - x0) / (x1 - x0) * n), 0, n).astype(int)
    rows = np.clip(np.floor((np.array([lo[1], hi[1]]) - y0) / (y1 - y0) * n), 0, n).astype(int)
    if cols[1] <= cols[0] or rows[1] <= rows[0]:
        return
    # row 0 is the far (high y) edge
    img[n - rows[1]:n - rows[0], cols[0]:cols[1]] = np.maximum(
        img[n - rows[1]:n - rows[0], cols[0]:cols[1]], value
    )


def render(state: WorldState, view: View, size: int = RASTER_SIZE) -> np.ndarray:
    img = np.full((size, size), FLOOR, dtype=np.uint8)
    window = _frame(state, view)
    for oid in sorted(state.scene.object_ids):
        box = state.box(oid)
        if oid == state.held_object:
            value = HELD
        elif state.classes[oid] == ObjectClass.FIXTURE:
            value = FIXTURE
        else:
            value = MANIPULABLE
        _fill(img, window, box.lo, box.hi, value)
        door = state.door_box(oid)
        if door is not None:
            _fill(img, window, door.lo, door.hi, OPEN_PART)
    x, y, heading = state.robot_base
    fp = footprint_box(x, y, heading, state.robot.base_footprint, 0.0)
    _fill(img, window, fp.lo, fp.hi, ROBOT)
    return img


def to_pgm(img: np.ndarray) -> bytes:
    """Binary (P5) PGM encoding of an 8-bit image."""
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(img, dtype=np.uint8).tobytes()
