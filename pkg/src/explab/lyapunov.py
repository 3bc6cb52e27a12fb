"""Lyapunov metric functions and the orbit difference operators.

The split metric D = D_s + D_u (taxicab split into contracting and expanding
parts) is the metric of the linear hyperbolic model; conjugated systems carry
its pullback through their chart.  The first and second differences along one
map step, V and W, drive every checker in the analysis module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import PlanarSystem, apply
from .errors import BadLambda
from .geom import Point


@dataclass(frozen=True)
class SplitLyapunov:
    """Taxicab metric split into a contracting and an expanding part."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 1.0):
            raise BadLambda(f"expansion factor must exceed 1, got {self.lam}")

    def d_s(self, p: Point, q: Point) -> float:
        return abs(p.y - q.y)

    def d_u(self, p: Point, q: Point) -> float:
        return abs(p.x - q.x)

    def eval(self, p: Point, q: Point) -> float:
        return self.d_s(p, q) + self.d_u(p, q)


@dataclass(frozen=True)
class PullbackLyapunov:
    """Split metric transported through a chart into system coordinates."""

    base: SplitLyapunov
    chart: object  # gallery.Chart; forward maps system -> model coords

    def eval(self, p: Point, q: Point) -> float:
        return self.base.eval(self.chart.forward(p), self.chart.forward(q))


@dataclass(frozen=True)
class DifferenceTriple:
    U: float
    V: float
    W: float


def split_eval(lam: float, p: Point, q: Point) -> tuple[float, float, float]:
    """(D_s, D_u, D) of the split metric with expansion factor lam."""
    if not (lam > 1.0):
        raise BadLambda(f"expansion factor must exceed 1, got {lam}")
    m = SplitLyapunov(lam)
    ds, du = m.d_s(p, q), m.d_u(p, q)
    return ds, du, ds + du


def differences(sys: PlanarSystem, p: Point, q: Point) -> DifferenceTriple:
    """U, V = ΔU, W = Δ²U computed by metric evaluation along the orbit."""
    u0 = sys.metric.eval(p, q)
    p1, q1 = apply(sys.map, p), apply(sys.map, q)
    u1 = sys.metric.eval(p1, q1)
    p2, q2 = apply(sys.map, p1), apply(sys.map, q1)
    u2 = sys.metric.eval(p2, q2)
    return DifferenceTriple(u0, u1 - u0, u2 - 2.0 * u1 + u0)


def linear_first_difference(lam: float, p: Point, q: Point) -> float:
    """Closed form of V for the linear model: (λ-1)D_u - (1-1/λ)D_s."""
    ds, du, _ = split_eval(lam, p, q)
    return (lam - 1.0) * du - (1.0 - 1.0 / lam) * ds


def linear_second_difference(lam: float, p: Point, q: Point) -> float:
    """Closed form of W for the linear model: (λ-1)²D_u + (1-1/λ)²D_s."""
    ds, du, _ = split_eval(lam, p, q)
    return (lam - 1.0) ** 2 * du + (1.0 - 1.0 / lam) ** 2 * ds


@dataclass(frozen=True)
class MetricAxiomReport:
    n_points: int
    violations: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def metric_axioms_check(metric, points, tol: float = 1e-9) -> MetricAxiomReport:
    """Report violations of symmetry, identity of indiscernibles, positivity
    and the triangle inequality over all sampled triples.

    Report-only: an empty violation list means the sampled axioms pass.
    """
    pts = list(points)
    if len(pts) < 3:
        raise BadLambda("need at least 3 sample points")
    violations: list[str] = []

    def fmt(p):
        return f"({p.x:.6g},{p.y:.6g})"

    for p in pts:
        v = metric.eval(p, p)
        if abs(v) > tol:
            violations.append(f"nonzero on diagonal at {fmt(p)}: {v:.3e}")
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            upq, uqp = metric.eval(p, q), metric.eval(q, p)
            if abs(upq - uqp) > tol:
                violations.append(f"asymmetry at {fmt(p)},{fmt(q)}: {upq - uqp:.3e}")
            if upq < -tol:
                violations.append(f"negative value at {fmt(p)},{fmt(q)}: {upq:.3e}")
            if upq <= tol and math.hypot(p.x - q.x, p.y - q.y) > math.sqrt(tol):
                violations.append(f"zero between distinct points {fmt(p)},{fmt(q)}")
    for p in pts:
        for q in pts:
            for r in pts:
                if metric.eval(p, r) > metric.eval(p, q) + metric.eval(q, r) + tol:
                    violations.append(
                        f"triangle violation at {fmt(p)},{fmt(q)},{fmt(r)}"
                    )
    return MetricAxiomReport(n_points=len(pts), violations=tuple(violations))
