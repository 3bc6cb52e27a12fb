"""Plane primitives: points, polylines with an optional terminal ray, and
first-hit polyline intersection.

A PolyLine is a chain of vertices optionally followed by a semi-straight
line leaving the last vertex toward increasing x with a given slope.  The
intersection routine walks the pieces of the first polyline in traversal
order and returns the earliest hit, which is what the polygonal chart
construction needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import MalformedPolyline

# Determinants below this are treated as parallel (double-precision noise
# floor with coordinates up to ~1e6).
PARALLEL_EPS = 1e-14
PARAM_EPS = 1e-12


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def as_tuple(self):
        return (self.x, self.y)


def dist(p: Point, q: Point) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


@dataclass(frozen=True)
class PolyLine:
    vertices: tuple[Point, ...]
    terminal_ray_slope: float | None = None


def validate_polyline(pl: PolyLine) -> None:
    if len(pl.vertices) < 1:
        raise MalformedPolyline("polyline needs at least one vertex")
    for v in pl.vertices:
        if not (math.isfinite(v.x) and math.isfinite(v.y)):
            raise MalformedPolyline(f"non-finite vertex {v}")
    for a, b in zip(pl.vertices, pl.vertices[1:]):
        if a.x == b.x and a.y == b.y:
            raise MalformedPolyline(f"repeated consecutive vertex {a}")
    if pl.terminal_ray_slope is not None and not math.isfinite(pl.terminal_ray_slope):
        raise MalformedPolyline("non-finite ray slope")
    if len(pl.vertices) == 1 and pl.terminal_ray_slope is None:
        raise MalformedPolyline("single vertex without a terminal ray")


def _pieces(pl: PolyLine):
    """Yield (origin, direction, max_param) pieces; max_param is math.inf for the ray."""
    vs = pl.vertices
    for a, b in zip(vs, vs[1:]):
        yield a, (b.x - a.x, b.y - a.y), 1.0
    if pl.terminal_ray_slope is not None:
        last = vs[-1]
        yield last, (1.0, pl.terminal_ray_slope), math.inf


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _piece_hit(p: Point, dp, tmax, q: Point, dq, umax):
    """Intersection of two parametric pieces.

    Returns (t, point) with t the parameter along the first piece, or None.
    Collinear overlaps return the overlap point with smallest t.
    """
    # Exact fast path for axis-parallel crossings: a vertical piece against a
    # horizontal one lands exactly on (px, qy), which keeps the polygonal
    # chart an exact identity on its core.
    if dp[0] == 0.0 and dq[1] == 0.0 and dp[1] != 0.0 and dq[0] != 0.0:
        t = (q.y - p.y) / dp[1]
        u = (p.x - q.x) / dq[0]
        if -PARAM_EPS <= t <= tmax + PARAM_EPS and -PARAM_EPS <= u <= umax + PARAM_EPS:
            return max(t, 0.0), Point(p.x, q.y)
        return None
    if dp[1] == 0.0 and dq[0] == 0.0 and dp[0] != 0.0 and dq[1] != 0.0:
        t = (q.x - p.x) / dp[0]
        u = (p.y - q.y) / dq[1]
        if -PARAM_EPS <= t <= tmax + PARAM_EPS and -PARAM_EPS <= u <= umax + PARAM_EPS:
            return max(t, 0.0), Point(q.x, p.y)
        return None

    det = _cross(dp[0], dp[1], dq[0], dq[1])
    rx, ry = q.x - p.x, q.y - p.y
    if abs(det) < PARALLEL_EPS:
        # Parallel; only collinear overlaps can intersect.
        dplen = math.hypot(*dp)
        dd = dp[0] * dp[0] + dp[1] * dp[1]
        if dplen == 0.0 or dd == 0.0:  # degenerate or denormal direction
            return None
        if abs(_cross(rx, ry, dp[0], dp[1])) / dplen > 1e-12 * (1.0 + math.hypot(rx, ry)):
            return None
        t0 = (rx * dp[0] + ry * dp[1]) / dd
        ddir = (dq[0] * dp[0] + dq[1] * dp[1]) / dd
        t1 = t0 + (umax * ddir if math.isfinite(umax) else math.copysign(math.inf, ddir))
        lo = max(0.0, min(t0, t1))
        hi = min(tmax, max(t0, t1))
        if lo > hi + PARAM_EPS:
            return None
        t = lo
        return t, Point(p.x + t * dp[0], p.y + t * dp[1])
    t = _cross(rx, ry, dq[0], dq[1]) / det
    u = _cross(rx, ry, dp[0], dp[1]) / det
    if -PARAM_EPS <= t <= tmax + PARAM_EPS and -PARAM_EPS <= u <= umax + PARAM_EPS:
        t = min(max(t, 0.0), tmax if math.isfinite(tmax) else t)
        return t, Point(p.x + t * dp[0], p.y + t * dp[1])
    return None


def intersect(a: PolyLine, b: PolyLine) -> Point | None:
    """First intersection point in traversal order of `a`, or None.

    All segment-segment, segment-ray and ray-ray pairs are considered.
    """
    validate_polyline(a)
    validate_polyline(b)
    for p, dp, tmax in _pieces(a):
        best = None
        for q, dq, umax in _pieces(b):
            hit = _piece_hit(p, dp, tmax, q, dq, umax)
            if hit is not None and (best is None or hit[0] < best[0]):
                best = hit
        if best is not None:
            return best[1]
    return None


def point_polyline_distance(p: Point, pl: PolyLine) -> float:
    """Euclidean distance from p to the nearest piece of the polyline."""
    validate_polyline(pl)
    best = math.inf
    if len(pl.vertices) == 1 and pl.terminal_ray_slope is None:
        v = pl.vertices[0]
        return math.hypot(p.x - v.x, p.y - v.y)
    for q, dq, umax in _pieces(pl):
        dd = dq[0] * dq[0] + dq[1] * dq[1]
        if dd == 0.0:
            best = min(best, math.hypot(p.x - q.x, p.y - q.y))
            continue
        t = ((p.x - q.x) * dq[0] + (p.y - q.y) * dq[1]) / dd
        t = min(max(t, 0.0), umax)
        cx, cy = q.x + t * dq[0], q.y + t * dq[1]
        best = min(best, math.hypot(p.x - cx, p.y - cy))
    return best
