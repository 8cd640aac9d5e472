"""Exact 2D reflection algebra and small computational-geometry helpers.

A reflection is stored as the axis slope angle ``theta`` plus a point ``t``
on the axis.  Its linear part is the symmetric orthogonal matrix

    M = [[cos 2t, sin 2t], [sin 2t, -cos 2t]]

so a point maps as ``M @ (x - t) + t`` and a direction as ``M @ v``.
``det M = -1`` and ``M @ M = I``, which is what the tests pin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "ReflectionTransform",
    "reflection_from_pair",
    "reflect_point",
    "reflect_points",
    "reflect_vector",
    "reflect_vectors",
    "reflect_curve",
    "canonical_axis_angle",
    "convex_hull",
    "points_in_hull",
]


def canonical_axis_angle(theta: float) -> float:
    """Fold an axis angle into (-pi/2, pi/2] (a line, not a ray)."""
    while theta <= -0.5 * math.pi:
        theta += math.pi
    while theta > 0.5 * math.pi:
        theta -= math.pi
    return theta


@dataclass(frozen=True)
class ReflectionTransform:
    """Reflection across the line through ``t`` with slope angle ``theta``."""

    theta: float
    t: tuple[float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", canonical_axis_angle(float(self.theta)))
        object.__setattr__(self, "t", (float(self.t[0]), float(self.t[1])))

    @cached_property
    def matrix(self) -> np.ndarray:
        c = math.cos(2.0 * self.theta)
        s = math.sin(2.0 * self.theta)
        m = np.array([[c, s], [s, -c]], dtype=np.float64)
        m.setflags(write=False)
        return m

    @property
    def direction(self) -> np.ndarray:
        """Unit vector along the axis."""
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    def axis_distance(self, x) -> float:
        """Signed distance from a point to the axis line."""
        n = np.array([-math.sin(self.theta), math.cos(self.theta)])
        return float(np.dot(np.asarray(x, dtype=np.float64) - self.t, n))


def reflection_from_pair(a, b) -> ReflectionTransform:
    """Reflection mapping a <-> b: axis is the perpendicular bisector of (a, b).

    Canonical, so (a, b) and (b, a) produce the identical transform.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    d = a - b
    if float(d[0]) == 0.0 and float(d[1]) == 0.0:
        raise ValueError("cannot build a reflection from coincident points")
    # axis is perpendicular to d: direction (-dy, dx)
    theta = math.atan2(float(d[0]), -float(d[1]))
    t = (a + b) * 0.5
    return ReflectionTransform(theta=theta, t=(float(t[0]), float(t[1])))


def reflect_point(transform: ReflectionTransform, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(transform.t)
    return transform.matrix @ (x - t) + t


def reflect_points(transform: ReflectionTransform, pts: np.ndarray) -> np.ndarray:
    """Vectorized reflect_point over an (n, 2) array."""
    pts = np.asarray(pts, dtype=np.float64)
    t = np.asarray(transform.t)
    return (pts - t) @ transform.matrix.T + t


def reflect_vector(transform: ReflectionTransform, v) -> np.ndarray:
    """Linear part only; preserves norm."""
    return transform.matrix @ np.asarray(v, dtype=np.float64)


def reflect_vectors(transform: ReflectionTransform, vecs: np.ndarray) -> np.ndarray:
    return np.asarray(vecs, dtype=np.float64) @ transform.matrix.T


def reflect_curve(transform: ReflectionTransform, curve):
    """Reflect a Curve: samples pointwise, normals as vectors, alpha kept."""
    from symmpix.image import Curve  # local import to avoid a cycle

    normals = None
    if curve.normals is not None:
        normals = reflect_vectors(transform, curve.normals)
    anchor = reflect_point(transform, curve.anchor)
    return Curve(
        anchor=(float(anchor[0]), float(anchor[1])),
        samples=reflect_points(transform, curve.samples),
        normals=normals,
    )


# ---------------------------------------------------------------------------
# Convex hull (Andrew's monotone chain) and point-in-hull tests
# ---------------------------------------------------------------------------

def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Convex hull vertices in counter-clockwise order, shape (m, 2).

    Degenerate inputs (fewer than 3 distinct points, or all collinear)
    return the reduced vertex list; points_in_hull treats such hulls as
    containing nothing of positive area.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        return pts.copy()
    uniq = np.unique(pts, axis=0)
    order = np.lexsort((uniq[:, 1], uniq[:, 0]))
    uniq = uniq[order]
    if len(uniq) <= 2:
        return uniq

    lower: list[np.ndarray] = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in uniq[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def points_in_hull(points: np.ndarray, hull: np.ndarray) -> np.ndarray:
    """Boolean mask of points inside or on the hull (CCW vertex list)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(hull) < 3:
        return np.zeros(len(pts), dtype=bool)
    inside = np.ones(len(pts), dtype=bool)
    n = len(hull)
    for i in range(n):
        a = hull[i]
        b = hull[(i + 1) % n]
        cross = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
        inside &= cross >= -1e-9
    return inside
