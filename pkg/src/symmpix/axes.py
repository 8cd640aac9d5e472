"""Symmetry axis estimation from pair clusters, and axis-level scoring.

A cluster's axis is the average line: through the mean of all pair
midpoints, perpendicular to the sum of the (canonically ordered) endpoint
differences.  Detections are scored against ground truth with greedy
one-to-one matching under angle and distance tolerances, summarized as
F = 2tp / (2tp + fp + fn).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from symmpix.clustering import PairCluster

__all__ = [
    "SymmetryAxis",
    "axis_from_cluster",
    "match_axes",
    "f_score",
    "axes_to_json",
    "axes_from_json",
]


@dataclass
class SymmetryAxis:
    """A line: point on it, unit direction, and pair-count support."""

    point: tuple[float, float]
    direction: tuple[float, float]
    support: int = 0

    def __post_init__(self) -> None:
        dx, dy = float(self.direction[0]), float(self.direction[1])
        norm = math.hypot(dx, dy)
        if norm == 0.0:
            raise ValueError("axis direction cannot be zero")
        dx, dy = dx / norm, dy / norm
        # canonical sign: positive y, or positive x when horizontal
        if dy < 0.0 or (dy == 0.0 and dx < 0.0):
            dx, dy = -dx, -dy
        object.__setattr__(self, "direction", (dx, dy))
        object.__setattr__(self, "point", (float(self.point[0]), float(self.point[1])))

    @property
    def angle_degrees(self) -> float:
        return math.degrees(math.atan2(self.direction[1], self.direction[0]))

    def distance_to_point(self, p) -> float:
        nx, ny = -self.direction[1], self.direction[0]
        return abs((p[0] - self.point[0]) * nx + (p[1] - self.point[1]) * ny)


def axis_from_cluster(cluster: PairCluster) -> SymmetryAxis:
    """Average axis of a cluster: mean midpoint, perpendicular to the summed
    endpoint differences (endpoints ordered lexicographically first so the
    differences cannot cancel)."""
    if not cluster.members:
        raise ValueError("empty cluster")
    midsum = np.zeros(2)
    diffsum = np.zeros(2)
    for pr in cluster.members:
        a = np.array(pr.xi, dtype=np.float64)
        b = np.array(pr.xj, dtype=np.float64)
        if tuple(b) < tuple(a):
            a, b = b, a
        midsum += (a + b) * 0.5
        diffsum += a - b
    if math.hypot(diffsum[0], diffsum[1]) < 1e-12:
        raise ValueError("degenerate cluster: endpoint differences cancel")
    point = midsum / len(cluster.members)
    direction = (-diffsum[1], diffsum[0])  # perpendicular to the difference
    return SymmetryAxis(point=(point[0], point[1]), direction=direction, support=len(cluster.members))


def _angle_between(a: SymmetryAxis, b: SymmetryAxis) -> float:
    """Unsigned angle between two undirected lines, in degrees, in [0, 90]."""
    dot = abs(a.direction[0] * b.direction[0] + a.direction[1] * b.direction[1])
    return math.degrees(math.acos(min(1.0, dot)))


def match_axes(
    detected: list[SymmetryAxis],
    truth: list[SymmetryAxis],
    angle_tol: float,
    dist_tol: float,
) -> dict[str, int]:
    """Greedy one-to-one matching of detected axes against ground truth.

    A detection matches an unmatched truth axis when the line angle differs
    by at most angle_tol degrees and the detection's point lies within
    dist_tol pixels of the truth line; among admissible truths the smallest
    angle difference wins.
    """
    if angle_tol <= 0 or dist_tol <= 0:
        raise ValueError("tolerances must be positive")
    taken = [False] * len(truth)
    tp = 0
    for det in detected:
        best = None
        best_angle = None
        for idx, gt in enumerate(truth):
            if taken[idx]:
                continue
            ang = _angle_between(det, gt)
            dist = gt.distance_to_point(det.point)
            if ang <= angle_tol and dist <= dist_tol:
                if best_angle is None or ang < best_angle:
                    best = idx
                    best_angle = ang
        if best is not None:
            taken[best] = True
            tp += 1
    fp = len(detected) - tp
    fn = len(truth) - tp
    return {"tp": tp, "fp": fp, "fn": fn}


def f_score(tp: int, fp: int, fn: int) -> float:
    if tp < 0 or fp < 0 or fn < 0:
        raise ValueError("counts must be non-negative")
    if tp == 0 and fp == 0 and fn == 0:
        raise ValueError("f_score undefined for all-zero counts")
    return 2.0 * tp / (2.0 * tp + fp + fn)


def axes_to_json(axes: list[SymmetryAxis]) -> list[dict]:
    return [
        {
            "point": [ax.point[0], ax.point[1]],
            "angle_degrees": ax.angle_degrees,
            "support": ax.support,
        }
        for ax in axes
    ]


def axes_from_json(items: list[dict]) -> list[SymmetryAxis]:
    out = []
    for item in items:
        ang = math.radians(float(item["angle_degrees"]))
        out.append(
            SymmetryAxis(
                point=(float(item["point"][0]), float(item["point"][1])),
                direction=(math.cos(ang), math.sin(ang)),
                support=int(item.get("support", 0)),
            )
        )
    return out
