"""Planar maps, their regions, orbit iteration, and the chart flow.

A PlanarSystem bundles a map with a Lyapunov metric, its fixed point and an
optional chart into linear-model coordinates.  Systems are immutable after
construction and every operation here is pure, so they can be shared freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import BadParameter, MissingChart, MissingInverse, OutOfDomain
from .geom import Point


@dataclass(frozen=True)
class Region:
    """Plane subset the maps act on.

    kind is one of "plane", "quadrant" (closed first quadrant), "omega"
    (x >= 0, y >= 0, xy < 1), "rect", or "composite" (per-quadrant model
    regions glued along the axes, used as the target of composite charts).
    """

    kind: str
    bounds: tuple[float, float, float, float] | None = None
    quadrant_kinds: tuple[str, str, str, str] | None = None

    def contains(self, p: Point) -> bool:
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            return False
        if self.kind == "plane":
            return True
        if self.kind == "quadrant":
            return p.x >= 0.0 and p.y >= 0.0
        if self.kind == "omega":
            return p.x >= 0.0 and p.y >= 0.0 and p.x * p.y < 1.0
        if self.kind == "rect":
            xmin, xmax, ymin, ymax = self.bounds
            return xmin <= p.x <= xmax and ymin <= p.y <= ymax
        if self.kind == "composite":
            sub = self.quadrant_kinds[quadrant_index(p)]
            ax, ay = abs(p.x), abs(p.y)
            if sub == "omega":
                return ax * ay < 1.0
            return True
        raise BadParameter(f"unknown region kind {self.kind!r}")


PLANE = Region("plane")
QUADRANT = Region("quadrant")
OMEGA = Region("omega")


def rect(xmin, xmax, ymin, ymax) -> Region:
    if not (xmin < xmax and ymin < ymax):
        raise BadParameter("rectangle bounds must be ordered")
    return Region("rect", bounds=(xmin, xmax, ymin, ymax))


def quadrant_index(p: Point) -> int:
    """0..3 for quadrants I..IV; axis points go to the nonnegative side."""
    if p.x >= 0.0:
        return 0 if p.y >= 0.0 else 3
    return 1 if p.y >= 0.0 else 2


@dataclass(frozen=True)
class PlanarMap:
    forward: Callable[[Point], Point]
    inverse: Optional[Callable[[Point], Point]]
    domain: Region


@dataclass(frozen=True)
class PlanarSystem:
    name: str
    map: PlanarMap
    metric: object  # anything with .eval(Point, Point) -> float
    fixed_point: Point
    chart: object | None = None  # gallery.Chart, system -> linear-model coords
    lam: float | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)


def apply(m: PlanarMap, p: Point, direction: str = "forward") -> Point:
    """Evaluate the map or its inverse with a domain check on the input."""
    if not (math.isfinite(p.x) and math.isfinite(p.y)):
        raise OutOfDomain(f"non-finite point {p}", point=p)
    if not m.domain.contains(p):
        raise OutOfDomain(f"point {p.as_tuple()} outside the domain", point=p)
    if direction == "forward":
        return m.forward(p)
    if direction == "inverse":
        if m.inverse is None:
            raise MissingInverse("map has no inverse")
        return m.inverse(p)
    raise BadParameter(f"direction must be forward or inverse, got {direction!r}")


def orbit(m: PlanarMap, p: Point, n_min: int, n_max: int) -> list[Point]:
    """List of iterates f^n(p) for n = n_min..n_max.

    Raises OutOfDomain at the first iterate that exits the region, reporting
    the offending n.
    """
    if n_min > n_max:
        raise BadParameter("need n_min <= n_max")
    if not m.domain.contains(p):
        raise OutOfDomain(f"starting point {p.as_tuple()} outside the domain", point=p, n=0)

    fwd: list[Point] = [p]
    for n in range(1, max(n_max, 0) + 1):
        nxt = apply(m, fwd[-1], "forward")
        if not m.domain.contains(nxt):
            raise OutOfDomain(f"orbit exits the domain at n={n}", point=nxt, n=n)
        fwd.append(nxt)
    bwd: list[Point] = [p]
    for n in range(1, -min(n_min, 0) + 1):
        nxt = apply(m, bwd[-1], "inverse")
        if not m.domain.contains(nxt):
            raise OutOfDomain(f"orbit exits the domain at n={-n}", point=nxt, n=-n)
        bwd.append(nxt)

    def at(n: int) -> Point:
        return fwd[n] if n >= 0 else bwd[-n]

    return [at(n) for n in range(n_min, n_max + 1)]


def flow_time(sys: PlanarSystem, t: float, p: Point) -> Point:
    """Time-t point of the flow interpolating the map through its chart.

    The model flow scales the expanding coordinate by lam**t and the
    contracting one by lam**-t; time 1 reproduces the map itself.
    """
    if sys.chart is None:
        raise MissingChart(f"system {sys.name!r} has no chart to the linear model")
    if sys.lam is None:
        raise MissingChart(f"system {sys.name!r} has no expansion factor")
    m = sys.chart.forward(p)
    moved = Point(m.x * sys.lam ** t, m.y * sys.lam ** (-t))
    return sys.chart.inverse(moved)
