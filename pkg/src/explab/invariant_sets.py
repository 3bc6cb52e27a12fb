"""Stable/unstable set computations: membership of the k-stable set,
connected-component grids, curve tracing through charts, curve intersection,
and conjugacy construction between charted systems.

Membership is decided along the orbit: a value above k is a certain escape;
a positive first difference makes escape certain as well (the second
difference is positive for every built-in metric, so the gap only grows);
a confirmed run of negative first differences pins membership (a decreasing
sequence never exceeds its start).  Anything else stays Undecided, which is
a first-class verdict here.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import PlanarSystem, apply
from .errors import (
    BadParameter,
    ChartMismatch,
    MissingChart,
    NoIntersection,
    NonPositiveK,
    NotOnAxis,
    OutOfDomain,
)
from .geom import Point, PolyLine, dist

AXIS_TOL = 1e-9

LABEL_ESCAPES = 0
LABEL_COMPONENT = 1
LABEL_MEMBER_OFF = 2
LABEL_UNDECIDED = 3
LABEL_NAMES = {
    LABEL_ESCAPES: "escapes",
    LABEL_COMPONENT: "member-in-component",
    LABEL_MEMBER_OFF: "member-off-component",
    LABEL_UNDECIDED: "undecided",
}


@dataclass(frozen=True)
class SetVerdict:
    kind: str  # "member" | "escapes" | "undecided"
    n: int | None = None
    U: float | None = None
    V: float | None = None

    @property
    def is_member(self) -> bool:
        return self.kind == "member"

    @property
    def witness_n(self) -> int | None:
        return self.n if self.kind == "escapes" else None

    @staticmethod
    def member() -> "SetVerdict":
        return SetVerdict("member")

    @staticmethod
    def escapes(n: int) -> "SetVerdict":
        return SetVerdict("escapes", n=n)

    @staticmethod
    def undecided(n: int, U: float, V: float) -> "SetVerdict":
        return SetVerdict("undecided", n=n, U=U, V=V)


def membership(sys: PlanarSystem, x: Point, y: Point, k: float,
               direction: str = "stable", horizon: int = 200,
               tol: float = 1e-10, confirm_depth: int = 5) -> SetVerdict:
    """Decide whether y stays within metric distance k of x's orbit.

    direction "stable" follows forward iterates, "unstable" backward ones.
    """
    if not (k > 0.0):
        raise NonPositiveK(f"need k > 0, got {k}")
    if direction not in ("stable", "unstable"):
        raise BadParameter(f"direction must be stable or unstable, got {direction!r}")
    step = "forward" if direction == "stable" else "inverse"

    px, py = x, y
    u = sys.metric.eval(px, py)
    neg_streak = zero_streak = 0
    n = 0
    while n <= horizon:
        if u > k:
            return SetVerdict.escapes(n)
        nx, ny = apply(sys.map, px, step), apply(sys.map, py, step)
        u_next = sys.metric.eval(nx, ny)
        v = u_next - u
        if v > tol:
            # The gap is growing and keeps growing; walk until it clears k.
            m, cap = n, 10 * horizon + 1000
            while u <= k and m <= cap:
                px, py = apply(sys.map, px, step), apply(sys.map, py, step)
                u = sys.metric.eval(px, py)
                m += 1
            if u > k:
                return SetVerdict.escapes(m)
            return SetVerdict.undecided(m, u, v)
        if v < -tol:
            neg_streak += 1
            zero_streak = 0
            if neg_streak >= confirm_depth:
                return SetVerdict.member()
        else:
            neg_streak = 0
            if u <= tol:
                zero_streak += 1
                if zero_streak >= confirm_depth:
                    return SetVerdict.member()
            else:
                zero_streak = 0
        px, py, u = nx, ny, u_next
        n += 1
    return SetVerdict.undecided(horizon, u, v)


@dataclass(frozen=True)
class GridClassification:
    window: tuple[float, float, float, float]
    resolution: float
    labels: np.ndarray  # shape (nx, ny), int8 label codes
    center_index: tuple[int, int]
    xs: np.ndarray
    ys: np.ndarray
    parameters: dict

    def label_name(self, ix: int, iy: int) -> str:
        return LABEL_NAMES[int(self.labels[ix, iy])]

    def component_nodes(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.labels == LABEL_COMPONENT))]


def component_grid(sys: PlanarSystem, x: Point, k: float,
                   window: tuple[float, float, float, float], resolution: float,
                   horizon: int = 200, direction: str = "stable",
                   tol: float = 1e-10) -> GridClassification:
    """Classify grid nodes by stable-set membership and extract the
    4-connected member component through x.

    The grid is aligned so x itself is a node (the component must contain it).
    """
    if resolution <= 0:
        raise BadParameter("resolution must be positive")
    xmin, xmax, ymin, ymax = window
    if not (xmin <= x.x <= xmax and ymin <= x.y <= ymax):
        raise BadParameter("center point must lie inside the window")
    i_lo = -int(math.floor((x.x - xmin) / resolution + 1e-9))
    i_hi = int(math.floor((xmax - x.x) / resolution + 1e-9))
    j_lo = -int(math.floor((x.y - ymin) / resolution + 1e-9))
    j_hi = int(math.floor((ymax - x.y) / resolution + 1e-9))
    xs = np.array([x.x + i * resolution for i in range(i_lo, i_hi + 1)])
    ys = np.array([x.y + j * resolution for j in range(j_lo, j_hi + 1)])
    nx, ny = len(xs), len(ys)
    labels = np.full((nx, ny), LABEL_UNDECIDED, dtype=np.int8)

    for i in range(nx):
        for j in range(ny):
            y = Point(float(xs[i]), float(ys[j]))
            verdict = membership(sys, x, y, k, direction=direction,
                                 horizon=horizon, tol=tol)
            if verdict.is_member:
                labels[i, j] = LABEL_MEMBER_OFF
            elif verdict.kind == "escapes":
                labels[i, j] = LABEL_ESCAPES

    ci, cj = -i_lo, -j_lo
    if labels[ci, cj] == LABEL_MEMBER_OFF:
        q = deque([(ci, cj)])
        labels[ci, cj] = LABEL_COMPONENT
        while q:
            i, j = q.popleft()
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                a, b = i + di, j + dj
                if 0 <= a < nx and 0 <= b < ny and labels[a, b] == LABEL_MEMBER_OFF:
                    labels[a, b] = LABEL_COMPONENT
                    q.append((a, b))

    return GridClassification(
        window=window, resolution=resolution, labels=labels,
        center_index=(ci, cj), xs=xs, ys=ys,
        parameters={"system": sys.name, "k": k, "horizon": horizon,
                    "direction": direction, "tol": tol,
                    "x": [x.x, x.y], "seed": 0},
    )


def _geometric_ramp(lo: float, hi: float, n: int, min_gap_frac: float = 1e-6) -> list[float]:
    """n values from lo to hi with gaps shrinking geometrically toward hi."""
    if n < 2:
        return [lo]
    span = hi - lo
    rho = min_gap_frac ** (1.0 / (n - 1))
    return [hi - span * rho ** j for j in range(n)]


def trace_curve(sys: PlanarSystem, p: Point, kind: str,
                span: tuple[float, float] | None = None,
                n_samples: int = 100) -> PolyLine:
    """Stable or unstable curve through p, as the chart preimage of the
    vertical (stable) or horizontal (unstable) model line through chart(p).

    Samples are spaced geometrically toward the model-region boundary.
    """
    if sys.chart is None:
        raise MissingChart(f"system {sys.name!r} has no chart")
    if kind not in ("stable", "unstable"):
        raise BadParameter(f"kind must be stable or unstable, got {kind!r}")
    c = sys.chart.forward(p)
    target = sys.chart.target
    fixed, moving = (c.x, c.y) if kind == "stable" else (c.y, c.x)

    if span is None:
        if target.kind in ("omega", "composite"):
            # parameters run from the axis toward the hyperbola
            limit = 1e6 if fixed == 0.0 else (1.0 - 1e-9) / abs(fixed)
            span = (0.0, limit)
        else:
            width = 100.0 * (1.0 + abs(moving))
            span = (moving - width, moving + width)
    lo, hi = span
    if lo > hi:
        raise BadParameter("span must be ordered")

    if target.kind in ("omega", "composite"):
        params = sorted(_geometric_ramp(lo, hi, n_samples))
    else:
        half = n_samples // 2
        down = _geometric_ramp(moving, lo, max(half, 2))
        up = _geometric_ramp(moving, hi, max(n_samples - half, 2))
        params = sorted(set(down + up))

    pts = []
    for t in params:
        model = Point(c.x, t) if kind == "stable" else Point(t, c.y)
        if not target.contains(model):
            continue
        pts.append(sys.chart.inverse(model))
    dedup = [pts[0]]
    for q in pts[1:]:
        if q.x != dedup[-1].x or q.y != dedup[-1].y:
            dedup.append(q)
    if len(dedup) < 2:
        raise BadParameter("span too narrow: fewer than two distinct samples")
    return PolyLine(tuple(dedup))


def curve_intersection(sys: PlanarSystem, a: Point, b: Point) -> Point | None:
    """Meeting point of the stable curve through a (a on the fixed point's
    unstable curve) and the unstable curve through b (b on its stable curve).

    In model coordinates the answer is (chart(a).x, chart(b).y); returns its
    chart preimage, or None when that point falls outside the chart's target
    region (the non-intersecting-curves phenomenon of invariant regions).
    """
    if sys.chart is None:
        raise MissingChart(f"system {sys.name!r} has no chart")
    ca = sys.chart.forward(a)
    if abs(ca.y) > AXIS_TOL:
        raise NotOnAxis(f"{a.as_tuple()} is not on the unstable curve of the fixed point")
    cb = sys.chart.forward(b)
    if abs(cb.x) > AXIS_TOL:
        raise NotOnAxis(f"{b.as_tuple()} is not on the stable curve of the fixed point")
    q = Point(ca.x, cb.y)
    if not sys.chart.target.contains(q):
        return None
    return sys.chart.inverse(q)


@dataclass(frozen=True)
class ConjugacyMap:
    forward: Callable[[Point], Point]
    inverse: Callable[[Point], Point]
    residual_stats: dict


def build_conjugacy(sys_a: PlanarSystem, sys_b: PlanarSystem,
                    window: tuple[float, float, float, float],
                    nx: int = 50, ny: int = 50) -> ConjugacyMap:
    """Compose the two charts into h = chart_b^-1 ∘ chart_a and verify the
    conjugation identity h ∘ f_a = f_b ∘ h over a grid.

    Grid points where any evaluation leaves a domain are counted as
    unverifiable rather than silently skipped.
    """
    if sys_a.chart is None or sys_b.chart is None:
        raise MissingChart("both systems need charts to the linear model")
    if sys_a.lam != sys_b.lam:
        raise ChartMismatch(f"expansion factors differ: {sys_a.lam} vs {sys_b.lam}")

    def h(p: Point) -> Point:
        m = sys_a.chart.forward(p)
        if not sys_b.chart.target.contains(m):
            raise OutOfDomain(f"model image {m.as_tuple()} outside the target chart", point=m)
        return sys_b.chart.inverse(m)

    def h_inv(p: Point) -> Point:
        m = sys_b.chart.forward(p)
        if not sys_a.chart.target.contains(m):
            raise OutOfDomain(f"model image {m.as_tuple()} outside the source chart", point=m)
        return sys_a.chart.inverse(m)

    xmin, xmax, ymin, ymax = window
    residuals, roundtrips = [], []
    n_unverifiable = 0
    for i in range(nx):
        for j in range(ny):
            p = Point(xmin + (xmax - xmin) * i / (nx - 1),
                      ymin + (ymax - ymin) * j / (ny - 1))
            try:
                q = h(p)
                lhs = apply(sys_b.map, q)
                rhs = h(apply(sys_a.map, p))
                residuals.append(dist(lhs, rhs))
                roundtrips.append(dist(h_inv(q), p))
            except (OutOfDomain, NoIntersection):
                n_unverifiable += 1
    if not residuals:
        raise OutOfDomain("no grid point could be verified", point=None)
    stats = {
        "max": max(residuals),
        "mean": sum(residuals) / len(residuals),
        "roundtrip_max": max(roundtrips),
        "n_verified": len(residuals),
        "n_unverifiable": n_unverifiable,
    }
    return ConjugacyMap(forward=h, inverse=h_inv, residual_stats=stats)
