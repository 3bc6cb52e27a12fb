"""Built-in systems: the linear hyperbolic automorphism, two chart-conjugated
extensions of its restriction to the region omega = {x>=0, y>=0, xy<1}, and
per-quadrant composites.

Both extensions rebuild the quadrant from the stable/unstable segment
structure of omega.  The rational chart sends segments to straight half-lines
with a closed-form inverse; the polygonal chart sends them to two-piece
polygonal lines (an axis-parallel piece followed by a ray of slope 1/k) and
is inverted by bisection over the nested curve families.

System charts always run system coordinates -> linear-model coordinates, so
the pullback metric is base metric composed with chart.forward.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

from .dynamics import OMEGA, PLANE, QUADRANT, PlanarMap, PlanarSystem, Region, quadrant_index
from .errors import BadParameter, NoIntersection, OutOfDomain, RootNotBracketed
from .geom import Point, PolyLine, intersect
from .lyapunov import PullbackLyapunov, SplitLyapunov
from .numerics import bisect_root_log


@dataclass(frozen=True)
class Chart:
    """Bijection between a system region and a linear-model region."""

    forward: Callable[[Point], Point]  # system -> model
    inverse: Callable[[Point], Point]  # model -> system
    source: Region
    target: Region


# ---------------------------------------------------------------------------
# Rational chart (example 1)
# ---------------------------------------------------------------------------

def example1_chart(p: Point, direction: str = "forward") -> Point:
    """Rational chart between omega and the closed first quadrant.

    forward: (x,y) -> (x(1+y), y(1+x)) / (1-xy), axes fixed pointwise.
    inverse: (X,Y) -> (X/(1+Y), Y/(1+X)).
    """
    if direction == "forward":
        if not OMEGA.contains(p):
            raise OutOfDomain(f"{p.as_tuple()} not in the omega region", point=p)
        if p.x == 0.0 or p.y == 0.0:
            return p
        den = 1.0 - p.x * p.y
        return Point(p.x * (1.0 + p.y) / den, p.y * (1.0 + p.x) / den)
    if direction == "inverse":
        if not QUADRANT.contains(p):
            raise OutOfDomain(f"{p.as_tuple()} not in the closed first quadrant", point=p)
        if p.x == 0.0 or p.y == 0.0:
            return p
        return Point(p.x / (1.0 + p.y), p.y / (1.0 + p.x))
    raise BadParameter(f"direction must be forward or inverse, got {direction!r}")


# ---------------------------------------------------------------------------
# Polygonal chart (example 2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Example2Params:
    """Knobs of the polygonal construction.

    The gap interpolant is pinned by gap(1/2) = 1 and gap(2) = 1/6 and is
    clamped to those values outside [1/2, 2]; clamping below 1/2 makes the
    break bisection reproduce the explicit small-k rule exactly.

    bracket_lo/hi bound curve parameters accepted by the public polyline
    constructor; the chart inversion itself derives exact brackets from the
    sweep bounds, which stay valid far outside this window (orbit iterates
    reach 2^50 and beyond).
    """

    bisection_tol: float = 1e-12
    bracket_lo: float = 1e-9
    bracket_hi: float = 1e9


DEFAULT_PARAMS = Example2Params()


def hyperbola_gap(t: float) -> float:
    """Prescribed vertical gap between a curve's break and the hyperbola."""
    if t <= 0.5:
        return 1.0
    if t >= 2.0:
        return 1.0 / 6.0
    return 1.0 - (5.0 / 9.0) * (t - 0.5)


def stable_break_height(k: float) -> float:
    """Height where the stable polygonal line for abscissa k leaves x = k."""
    if k <= 2.0:
        return 1.0 / k - hyperbola_gap(k)
    return 1.0 / (1.0 + k)


@functools.lru_cache(maxsize=1 << 16)
def _unstable_break_x_cached(k: float, params: Example2Params) -> float:
    # The gap lies in [1/6, 1], so the root of 1/t - 1/k = gap(t) always
    # sits between k/(1+k) (gap = 1) and 6k/(6+k) (gap = 1/6); bisect there.
    inv_k = 1.0 / k
    lo = k / (1.0 + k) * (1.0 - 1e-14)
    hi = 6.0 * k / (6.0 + k) * (1.0 + 1e-14)
    xtol = params.bisection_tol
    flo = 1.0 / lo - inv_k - hyperbola_gap(lo)
    fhi = 1.0 / hi - inv_k - hyperbola_gap(hi)
    if flo < 0.0 or fhi > 0.0:
        raise RootNotBracketed(f"break equation not bracketed for k={k:.6g}")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mid <= 0.5:
            gap = 1.0
        elif mid >= 2.0:
            gap = 1.0 / 6.0
        else:
            gap = 1.0 - (5.0 / 9.0) * (mid - 0.5)
        if 1.0 / mid - inv_k - gap >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def unstable_break_x(k: float, params: Example2Params = DEFAULT_PARAMS) -> float:
    """Abscissa where the unstable polygonal line for k leaves y = 1/k.

    Solves 1/t - 1/k = gap(t) for t in (0, k) by bisection.  For k <= 1/2
    this equals k/(k+1) to within the bisection tolerance.
    """
    if not (k > 0.0) or not math.isfinite(k):
        raise BadParameter(f"k must be positive, got {k}")
    return _unstable_break_x_cached(k, params)


def _unstable_polyline_at_height(h: float, params: Example2Params = DEFAULT_PARAMS) -> PolyLine:
    # Parameterizing by the exact height keeps the chart an exact identity
    # on its core (1/(1/y) can be an ulp off y).
    bx = unstable_break_x(1.0 / h, params)
    return PolyLine((Point(0.0, h), Point(bx, h)), terminal_ray_slope=h)


def example2_polyline(kind: str, k: float, params: Example2Params = DEFAULT_PARAMS) -> PolyLine:
    """Stable or unstable polygonal curve for the hyperbola point (k, 1/k)."""
    if not (k > 0.0) or not math.isfinite(k):
        raise BadParameter(f"k must be positive, got {k}")
    if kind == "stable":
        h = stable_break_height(k)
        return PolyLine((Point(k, 0.0), Point(k, h)), terminal_ray_slope=1.0 / k)
    if kind == "unstable":
        return _unstable_polyline_at_height(1.0 / k, params)
    raise BadParameter(f"kind must be stable or unstable, got {kind!r}")


def stable_x_at(k: float, y: float, params: Example2Params = DEFAULT_PARAMS) -> float:
    """x-coordinate of the stable polygonal line for k at height y >= 0."""
    h = stable_break_height(k)
    if y <= h:
        return k
    return k + (y - h) * k


def unstable_y_at(k: float, x: float, params: Example2Params = DEFAULT_PARAMS) -> float:
    """y-coordinate of the unstable polygonal line for k at abscissa x >= 0."""
    bx = unstable_break_x(k, params)
    if x <= bx:
        return 1.0 / k
    return 1.0 / k + (x - bx) / k


def _unstable_height_at(h: float, x: float, params: Example2Params) -> float:
    # Same sweep as unstable_y_at but parameterized by the exact curve
    # height h = 1/k; the inverse chart bisects in h to avoid the 1/k'
    # error amplification at large heights.
    bx = unstable_break_x(1.0 / h, params)
    if x <= bx:
        return h
    return h * (1.0 + (x - bx))


def identity_zone(p: Point, params: Example2Params = DEFAULT_PARAMS) -> bool:
    """True when the two polygonal pieces through the image of p are still
    axis-parallel, i.e. the polygonal chart acts as the identity at p."""
    if not OMEGA.contains(p):
        raise OutOfDomain(f"{p.as_tuple()} not in the omega region", point=p)
    if p.x == 0.0 or p.y == 0.0:
        return True
    return p.y <= stable_break_height(p.x) and p.x <= unstable_break_x(1.0 / p.y, params)


def example2_chart(p: Point, direction: str = "forward",
                   params: Example2Params = DEFAULT_PARAMS) -> Point:
    """Polygonal chart between omega and the closed first quadrant.

    forward intersects the stable polygonal line for k = x with the unstable
    one at height y; inverse recovers the curve parameters by bisection over
    the nested families.
    """
    if direction == "forward":
        if not OMEGA.contains(p):
            raise OutOfDomain(f"{p.as_tuple()} not in the omega region", point=p)
        if p.x == 0.0 or p.y == 0.0:
            return p
        stable = example2_polyline("stable", p.x, params)
        unstable = _unstable_polyline_at_height(p.y, params)
        hit = intersect(stable, unstable)
        if hit is None:
            raise NoIntersection(
                f"polygonal curves for {p.as_tuple()} do not meet (construction bug)"
            )
        return hit
    if direction == "inverse":
        if not QUADRANT.contains(p):
            raise OutOfDomain(f"{p.as_tuple()} not in the closed first quadrant", point=p)
        if p.x == 0.0 or p.y == 0.0:
            return p
        if p.x * p.y < 1.0 and identity_zone(p, params):
            return p
        # Exact brackets from the sweep bounds k <= x(k,Y) <= k(1+Y) and
        # h <= y(h,X) <= h(1+X); they hold at any scale, so no generic
        # clamping is needed (orbit iterates reach 2^50 and beyond).  The
        # brackets span many decades, so bisect geometrically for uniform
        # relative precision wherever the root lands.
        k = bisect_root_log(lambda t: stable_x_at(t, p.y, params) - p.x,
                            p.x / (1.0 + p.y) * (1.0 - 1e-12),
                            p.x * (1.0 + 1e-12),
                            rtol=params.bisection_tol)
        h = bisect_root_log(lambda t: _unstable_height_at(t, p.x, params) - p.y,
                            p.y / (1.0 + p.x) * (1.0 - 1e-12),
                            p.y * (1.0 + 1e-12),
                            rtol=params.bisection_tol)
        return Point(k, h)
    raise BadParameter(f"direction must be forward or inverse, got {direction!r}")


def unstable_family_seam(k_lo: float = 2.5, k_hi: float = 6.0, n: int = 2000,
                         params: Example2Params = DEFAULT_PARAMS) -> tuple[float, float]:
    """Largest jump of the unstable break abscissa over a k-grid.

    The break equation has multiple roots for part of the k range, so the
    bisected family has a measurable seam; this reports (gap, k_at_gap)
    instead of pretending the family is globally continuous.
    """
    ks = [k_lo + (k_hi - k_lo) * i / (n - 1) for i in range(n)]
    vals = [unstable_break_x(k, params) for k in ks]
    gap, at = 0.0, ks[0]
    for k, a, b in zip(ks[1:], vals, vals[1:]):
        if abs(b - a) > gap:
            gap, at = abs(b - a), k
    return gap, at


# ---------------------------------------------------------------------------
# System construction
# ---------------------------------------------------------------------------

def _linear_map(lam: float) -> PlanarMap:
    return PlanarMap(
        forward=lambda p: Point(lam * p.x, p.y / lam),
        inverse=lambda p: Point(p.x / lam, lam * p.y),
        domain=PLANE,
    )


def _identity_chart() -> Chart:
    ident = lambda p: p
    return Chart(forward=ident, inverse=ident, source=PLANE, target=PLANE)


def _conjugated_map(to_model, from_model, lam: float, domain: Region) -> PlanarMap:
    # Inverse runs chart -> linear inverse -> chart back, avoiding a second
    # numeric inversion.
    def forward(p: Point) -> Point:
        m = to_model(p)
        return from_model(Point(lam * m.x, m.y / lam))

    def inverse(p: Point) -> Point:
        m = to_model(p)
        return from_model(Point(m.x / lam, lam * m.y))

    return PlanarMap(forward=forward, inverse=inverse, domain=domain)


def _charted_system(name: str, to_model, from_model, target: Region, lam: float = 2.0,
                    domain: Region = QUADRANT) -> PlanarSystem:
    chart = Chart(forward=to_model, inverse=from_model, source=domain, target=target)
    metric = PullbackLyapunov(SplitLyapunov(lam), chart)
    return PlanarSystem(
        name=name,
        map=_conjugated_map(to_model, from_model, lam, domain),
        metric=metric,
        fixed_point=Point(0.0, 0.0),
        chart=chart,
        lam=lam,
    )


def _quadrant_pieces(choice: str):
    """(to_model, from_model, target_kind) for one quadrant choice."""
    if choice == "linear":
        ident = lambda p: p
        return ident, ident, "quadrant"
    if choice == "example1":
        return (lambda p: example1_chart(p, "inverse"),
                lambda p: example1_chart(p, "forward"),
                "omega")
    if choice == "example2":
        return (lambda p: example2_chart(p, "inverse"),
                lambda p: example2_chart(p, "forward"),
                "omega")
    raise BadParameter(f"unknown quadrant choice {choice!r}")


_SIGNS = ((1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))


def _composite_chart(quadrants: tuple[str, str, str, str]) -> Chart:
    pieces = [_quadrant_pieces(c) for c in quadrants]
    target = Region("composite", quadrant_kinds=tuple(p[2] for p in pieces))

    def to_model(p: Point) -> Point:
        qi = quadrant_index(p)
        sx, sy = _SIGNS[qi]
        m = pieces[qi][0](Point(abs(p.x), abs(p.y)))
        return Point(sx * m.x, sy * m.y)

    def from_model(p: Point) -> Point:
        qi = quadrant_index(p)
        sx, sy = _SIGNS[qi]
        s = pieces[qi][1](Point(abs(p.x), abs(p.y)))
        return Point(sx * s.x, sy * s.y)

    return Chart(forward=to_model, inverse=from_model, source=PLANE, target=target)


def make_system(spec) -> PlanarSystem:
    """Build a PlanarSystem from a spec dict (or a shorthand string).

    Accepted specs: {"type": "linear", "lambda": l}, {"type": "example1"},
    {"type": "example2"}, {"type": "composite", "quadrants": [...4 choices]},
    and {"type": "dsl", ...} (delegated to the expression compiler).
    """
    if isinstance(spec, str):
        spec = parse_system_shorthand(spec)
    kind = spec.get("type")
    if kind == "linear":
        lam = float(spec.get("lambda", 2.0))
        return PlanarSystem(
            name=f"linear:{lam:g}",
            map=_linear_map(lam),
            metric=SplitLyapunov(lam),
            fixed_point=Point(0.0, 0.0),
            chart=_identity_chart(),
            lam=lam,
        )
    if kind == "example1":
        return _charted_system(
            "example1",
            to_model=lambda p: example1_chart(p, "inverse"),
            from_model=lambda p: example1_chart(p, "forward"),
            target=OMEGA,
        )
    if kind == "example2":
        return _charted_system(
            "example2",
            to_model=lambda p: example2_chart(p, "inverse"),
            from_model=lambda p: example2_chart(p, "forward"),
            target=OMEGA,
        )
    if kind == "composite":
        quadrants = tuple(spec.get("quadrants", ("example1", "linear", "linear", "linear")))
        if len(quadrants) != 4:
            raise BadParameter("composite spec needs exactly 4 quadrant choices")
        chart = _composite_chart(quadrants)
        lam = 2.0
        metric = PullbackLyapunov(SplitLyapunov(lam), chart)
        return PlanarSystem(
            name="composite:" + ",".join(quadrants),
            map=_conjugated_map(chart.forward, chart.inverse, lam, PLANE),
            metric=metric,
            fixed_point=Point(0.0, 0.0),
            chart=chart,
            lam=lam,
        )
    if kind == "dsl":
        from .dsl import SystemConfig, compile_system

        return compile_system(SystemConfig.from_dict(spec))
    raise BadParameter(f"unknown system type {kind!r}")


def parse_system_shorthand(text: str) -> dict:
    """Shorthand system names used on the command line."""
    if text.startswith("linear"):
        lam = 2.0
        if ":" in text:
            lam = float(text.split(":", 1)[1])
        return {"type": "linear", "lambda": lam}
    if text in ("example1", "example2"):
        return {"type": text}
    if text == "composite":
        return {"type": "composite", "quadrants": ["example1", "linear", "linear", "linear"]}
    raise BadParameter(f"unknown system shorthand {text!r}")


BUILTIN_SPECS = (
    {"type": "linear", "lambda": 2},
    {"type": "example1"},
    {"type": "example2"},
    {"type": "composite", "quadrants": ["example1", "linear", "linear", "linear"]},
)
