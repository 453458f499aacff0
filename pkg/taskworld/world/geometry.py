"""
Axis-aligned box geometry for the micro-simulator.
Objects are boxes centred on their pose; yaw only selects the front face of
articulated fixtures. Sweep tests are vectorised with numpy: every sample of
a motion is checked against every obstacle in one pass.
"""

from __future__ import annotations
import math
from dataclasses import dataclass

import numpy as np

from ..config import defaults

Vec2 = tuple[float, float]
Vec3 = tuple[float, float, float]

EPS = defaults.GEOMETRY_EPS

# Outward face normals in the order ties are broken.
AXIS_NORMALS: tuple[Vec2, ...] = ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))


@dataclass(frozen=True)
class Box:
    lo: Vec3
    hi: Vec3

    @classmethod
    def around(cls, center: Vec3, extents: Vec3) -> "Box":
        return cls(
            tuple(c - e / 2 for c, e in zip(center, extents)),
            tuple(c + e / 2 for c, e in zip(center, extents)),
        )

    @property
    def center(self) -> Vec3:
        return tuple((a + b) / 2 for a, b in zip(self.lo, self.hi))

    @property
    def bottom(self) -> float:
        return self.lo[2]

    @property
    def top(self) -> float:
        return self.hi[2]

    def shrink(self, wall: float, *, vertical: bool = True) -> "Box | None":
        dz = wall if vertical else 0.0
        lo = (self.lo[0] + wall, self.lo[1] + wall, self.lo[2] + dz)
        hi = (self.hi[0] - wall, self.hi[1] - wall, self.hi[2] - dz)
        if any(a >= b for a, b in zip(lo, hi)):
            return None
        return Box(lo, hi)

    def contains(self, other: "Box") -> bool:
        return all(a >= b - EPS for a, b in zip(other.lo, self.lo)) and all(
            a <= b + EPS for a, b in zip(other.hi, self.hi)
        )

    def contains_xy(self, other: "Box") -> bool:
        return (
            other.lo[0] >= self.lo[0] - EPS and other.hi[0] <= self.hi[0] + EPS
            and other.lo[1] >= self.lo[1] - EPS and other.hi[1] <= self.hi[1] + EPS
        )

    def covers_point_xy(self, x: float, y: float) -> bool:
        return self.lo[0] - EPS <= x <= self.hi[0] + EPS and self.lo[1] - EPS <= y <= self.hi[1] + EPS

    def overlaps(self, other: "Box") -> bool:
        return bool(overlap_matrix(
            np.array([self.lo]), np.array([self.hi]), np.array([other.lo]), np.array([other.hi])
        )[0, 0])

    def with_top(self, z: float) -> "Box":
        return Box(self.lo, (self.hi[0], self.hi[1], z))


def overlap_matrix(lo_a: np.ndarray, hi_a: np.ndarray, lo_b: np.ndarray, hi_b: np.ndarray) -> np.ndarray:
    """(A, B) boolean matrix of strict interpenetration; touching faces do not overlap."""
    if len(lo_a) == 0 or len(lo_b) == 0:
        return np.zeros((len(lo_a), len(lo_b)), dtype=bool)
    a_lo = lo_a[:, None, :]
    a_hi = hi_a[:, None, :]
    b_lo = lo_b[None, :, :]
    b_hi = hi_b[None, :, :]
    return np.all((a_lo < b_hi - EPS) & (a_hi > b_lo + EPS), axis=2)


def stack(boxes: list[Box]) -> tuple[np.ndarray, np.ndarray]:
    if not boxes:
        return np.zeros((0, 3)), np.zeros((0, 3))
    return np.array([b.lo for b in boxes], dtype=float), np.array([b.hi for b in boxes], dtype=float)


# ─── Frames ───────────────────────────────────────────────────────────────────

def heading_vectors(heading: float) -> tuple[Vec2, Vec2]:
    """Forward and left unit vectors for a base heading."""
    c, s = math.cos(heading), math.sin(heading)
    return (c, s), (-s, c)


def to_world(base: tuple[float, float, float], offset: Vec3) -> Vec3:
    """Base-frame (forward, left, up) offset to a world point."""
    x, y, heading = base
    (fx, fy), (lx, ly) = heading_vectors(heading)
    fwd, left, up = offset
    return (x + fwd * fx + left * lx, y + fwd * fy + left * ly, up)


def to_base(base: tuple[float, float, float], point: Vec3) -> Vec3:
    """World point to a base-frame (forward, left, up) offset."""
    x, y, heading = base
    (fx, fy), (lx, ly) = heading_vectors(heading)
    dx, dy = point[0] - x, point[1] - y
    return (dx * fx + dy * fy, dx * lx + dy * ly, point[2])


def rotate_xy(vec: Vec3, heading: float) -> Vec3:
    (fx, fy), (lx, ly) = heading_vectors(heading)
    return (vec[0] * fx + vec[1] * lx, vec[0] * fy + vec[1] * ly, vec[2])


def footprint_box(x: float, y: float, heading: float, footprint: Vec2, height: float) -> Box:
    """Axis-aligned bound of the rotated base footprint."""
    length, width = footprint
    c, s = abs(math.cos(heading)), abs(math.sin(heading))
    hx = c * length / 2 + s * width / 2
    hy = s * length / 2 + c * width / 2
    return Box((x - hx, y - hy, 0.0), (x + hx, y + hy, height))


def axis_normal(yaw: float) -> Vec2:
    """Snap a yaw to the nearest axis direction."""
    c, s = math.cos(yaw), math.sin(yaw)
    if abs(c) >= abs(s):
        return (1.0 if c >= 0 else -1.0, 0.0)
    return (0.0, 1.0 if s >= 0 else -1.0)


def face_point(box: Box, normal: Vec2) -> Vec3:
    """Centre of the side face with the given outward normal, at half height."""
    cx, cy, cz = box.center
    nx, ny = normal
    x = box.hi[0] if nx > 0 else box.lo[0] if nx < 0 else cx
    y = box.hi[1] if ny > 0 else box.lo[1] if ny < 0 else cy
    return (x, y, cz)


def normalize_angle(a: float) -> float:
    return math.atan2(math.sin(a), math.cos(a))


def horizontal_distance(a: Vec3, b: Vec3) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])
