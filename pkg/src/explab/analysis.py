"""Numeric checkers for the behavior of the first and second orbit
differences: sign availability on metric spheres, the at-infinity ratio test,
the uniform local bounds, orbit-gap divergence, usual-metric comparability,
expansiveness witnesses, orbit-distance convexity, and sector counting.

Every checker is deterministic given its parameter record; stochastic
sampling always runs off an explicit seed that is stored in the report.
Verdicts are "holds-numerically", "fails-numerically" or "inconclusive" and
are pure functions of the recorded samples and thresholds.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .dynamics import PlanarSystem, apply, orbit
from .errors import (
    BadDelta,
    BadK,
    BadParameter,
    BisectionFailure,
    Degenerate,
    EmptyRadii,
    IdenticalPoints,
    InvalidRadius,
    OutOfDomain,
    WitnessNotFound,
)
from .geom import Point, dist
from .lyapunov import differences

SIGN_DEADBAND = 1e-12
LEVEL_TOL = 1e-10

HOLDS = "holds-numerically"
FAILS = "fails-numerically"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConditionReport:
    condition_id: str
    parameters: dict
    samples: tuple
    verdict: str

    def to_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "parameters": self.parameters,
            "samples": list(self.samples),
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class WitnessResult:
    n: int
    value: float
    guarantee_bound: int | None = None


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _metric(sys: PlanarSystem, p: Point, q: Point) -> float:
    return sys.metric.eval(p, q)


def _first_difference(sys: PlanarSystem, x: Point, y: Point) -> float:
    fx, fy = apply(sys.map, x), apply(sys.map, y)
    return _metric(sys, fx, fy) - _metric(sys, x, y)


def _quadrant_domain(sys: PlanarSystem) -> bool:
    return sys.map.domain.kind in ("quadrant", "omega")


def ray_angles(sys: PlanarSystem, n_dirs: int) -> list[float]:
    """Sampling directions toward infinity: full circle on the plane,
    strictly interior angles for invariant-quadrant systems."""
    if n_dirs < 1:
        raise BadParameter("need at least one direction")
    if _quadrant_domain(sys):
        return [(j + 0.5) * (math.pi / 2.0) / n_dirs for j in range(n_dirs)]
    return [2.0 * math.pi * j / n_dirs for j in range(n_dirs)]


def _level_point(sys: PlanarSystem, x: Point, theta: float, level: float,
                 t0: float | None = None, growth: float = 1.5,
                 t_cap: float = 1e9) -> Point | None:
    """First point along x + t*(cos,sin) with metric value `level`.

    Walks a geometric ladder until the level is exceeded, then bisects the
    last step down to LEVEL_TOL.  Returns None when the direction leaves the
    domain or the metric saturates below the level before t_cap.
    """
    c, s = math.cos(theta), math.sin(theta)

    def point_at(t: float) -> Point:
        return Point(x.x + t * c, x.y + t * s)

    def value(t: float) -> float | None:
        p = point_at(t)
        if not sys.map.domain.contains(p):
            return None
        try:
            return _metric(sys, x, p)
        except OutOfDomain:
            return None

    t_prev = 0.0
    t = t0 if t0 is not None else max(level / 4.0, 1e-12)
    while t <= t_cap:
        v = value(t)
        if v is None:
            # stepped over the domain edge: walk up to it and check whether
            # the level is still reached inside
            lo, hi = t_prev, t
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if value(mid) is None:
                    hi = mid
                else:
                    lo = mid
            v_edge = value(lo)
            if v_edge is None or v_edge < level:
                return None
            t = lo
            break
        if v >= level:
            break
        t_prev, t = t, t * growth
    else:
        return None

    lo, hi = t_prev, t
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        v = value(mid)
        if v is None:
            return None
        if abs(v - level) <= LEVEL_TOL:
            return point_at(mid)
        if v < level:
            lo = mid
        else:
            hi = mid
    p = point_at(hi)
    v = value(hi)
    if v is None or abs(v - level) > 1e-6 * max(1.0, level):
        return None
    return p


# ---------------------------------------------------------------------------
# sign availability on metric spheres
# ---------------------------------------------------------------------------

def sign_condition_check(sys: PlanarSystem, x: Point, k: float,
                         n_dirs: int = 16) -> ConditionReport:
    """Look for both strict signs of the first difference on the metric
    sphere of radius k around x."""
    if not (k > 0.0):
        raise InvalidRadius(f"need k > 0, got {k}")
    rows = []
    n_pos = n_neg = 0
    for j in range(n_dirs):
        theta = 2.0 * math.pi * j / n_dirs
        y = _level_point(sys, x, theta, k)
        if y is None:
            raise BisectionFailure(
                f"metric never reaches level {k:g} along direction {theta:.6g}"
            )
        v = _first_difference(sys, x, y)
        sign = 0
        if v > SIGN_DEADBAND:
            sign, n_pos = 1, n_pos + 1
        elif v < -SIGN_DEADBAND:
            sign, n_neg = -1, n_neg + 1
        rows.append({"theta": theta, "y_x": y.x, "y_y": y.y,
                     "U": _metric(sys, x, y), "V": v, "sign": sign})
    verdict = HOLDS if (n_pos > 0 and n_neg > 0) else FAILS
    return ConditionReport(
        condition_id="signs",
        parameters={"system": sys.name, "x": [x.x, x.y], "k": k,
                    "n_dirs": n_dirs, "deadband": SIGN_DEADBAND, "seed": 0},
        samples=tuple(rows),
        verdict=verdict,
    )


# ---------------------------------------------------------------------------
# ratio decay at infinity
# ---------------------------------------------------------------------------

def hp_estimate(sys: PlanarSystem, rect: tuple[float, float, float, float],
                step: float, radii, n_dirs: int = 16,
                angles: list[float] | None = None,
                tolerance: float = 1e-3, w_floor: float = 1e-9,
                slack: float = 0.05) -> ConditionReport:
    """Maximize |V(x,y)-V(x,z)| / W(x,y) over a compact grid of pairs while
    x recedes along rays, one ratio per radius.

    Holds numerically when the ratio ladder is nonincreasing (within slack)
    and the final ratio falls below the tolerance.
    """
    radii = list(radii)
    if not radii:
        raise EmptyRadii("need at least one radius")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise BadParameter("radii must be strictly increasing")
    if step <= 0:
        raise BadParameter("grid step must be positive")
    xmin, xmax, ymin, ymax = rect
    xs, v = [], xmin
    while v <= xmax + 1e-12:
        xs.append(v)
        v += step
    ys, v = [], ymin
    while v <= ymax + 1e-12:
        ys.append(v)
        v += step
    grid = [Point(gx, gy) for gx in xs for gy in ys]
    for c in grid:
        if not sys.map.domain.contains(c):
            raise OutOfDomain(f"compact-set node {c.as_tuple()} outside the domain", point=c)
    if angles is None:
        angles = ray_angles(sys, n_dirs)

    rows = []
    for radius in radii:
        ratio_max, arg = 0.0, None
        for theta in angles:
            x = Point(radius * math.cos(theta), radius * math.sin(theta))
            if not sys.map.domain.contains(x):
                raise OutOfDomain(f"ray sample {x.as_tuple()} exits the region", point=x)
            trips = [differences(sys, x, c) for c in grid]
            for i, ti in enumerate(trips):
                if ti.W <= w_floor:
                    continue
                for j, tj in enumerate(trips):
                    if i == j:
                        continue
                    r = abs(ti.V - tj.V) / ti.W
                    if r > ratio_max:
                        ratio_max, arg = r, x
        rows.append({"radius": radius, "ratio_max": ratio_max,
                     "x_at_max_x": arg.x if arg else 0.0,
                     "x_at_max_y": arg.y if arg else 0.0})

    nonincreasing = all(
        rows[i + 1]["ratio_max"] <= rows[i]["ratio_max"] * (1.0 + slack)
        for i in range(len(rows) - 1)
    )
    verdict = HOLDS if (nonincreasing and rows[-1]["ratio_max"] <= tolerance) else FAILS
    return ConditionReport(
        condition_id="HP",
        parameters={"system": sys.name, "rect": list(rect), "step": step,
                    "radii": radii, "angles": angles, "tolerance": tolerance,
                    "w_floor": w_floor, "slack": slack, "seed": 0},
        samples=tuple(rows),
        verdict=verdict,
    )


# ---------------------------------------------------------------------------
# uniform local bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplePlan:
    """Sampling plan for the local-bound estimates."""

    n_centers: int = 8
    n_dirs: int = 12
    window_scales: tuple = (1.0, 8.0)
    radius_factors: tuple = (1.0 + 1e-6, 1.5, 2.0, 4.0)
    n_modulus_pairs: int = 48
    margin: float = 1e-3
    seed: int = 0
    modulus_cap_per_delta: float = 4.0
    a_floor: float = 1e-12

    def to_dict(self) -> dict:
        return {"n_centers": self.n_centers, "n_dirs": self.n_dirs,
                "window_scales": list(self.window_scales),
                "radius_factors": list(self.radius_factors),
                "n_modulus_pairs": self.n_modulus_pairs, "margin": self.margin,
                "seed": self.seed,
                "modulus_cap_per_delta": self.modulus_cap_per_delta,
                "a_floor": self.a_floor}


def _random_domain_point(rng: random.Random, sys: PlanarSystem, w: float,
                         margin: float) -> Point:
    if _quadrant_domain(sys):
        return Point(rng.uniform(margin, w), rng.uniform(margin, w))
    return Point(rng.uniform(-w, w), rng.uniform(-w, w))


def _fan_angles(sys: PlanarSystem, n: int) -> list[float]:
    # Axis directions included on purpose: the smallest second difference of
    # a split metric sits on the contracting axis.
    if _quadrant_domain(sys):
        return [j * (math.pi / 2.0) / (n - 1) for j in range(n)]
    return [2.0 * math.pi * j / n for j in range(n)]


def hl_estimate(sys: PlanarSystem, deltas, plan: SamplePlan = SamplePlan()
                ) -> tuple[ConditionReport, ConditionReport]:
    """Estimate the modulus of continuity of V in its second argument and
    the positive floor of W off the delta-diagonal.

    Returns a pair of reports: (HL-V with the modulus table, HL-W with the
    floor table).  The modulus report holds when each estimated sup stays
    below cap*delta; the floor report holds when every minimum clears the
    configured positive floor.
    """
    deltas = sorted(deltas)
    if not deltas or any(d <= 0 for d in deltas):
        raise BadDelta("deltas must be positive and nonempty")
    rng = random.Random(plan.seed)
    fan = _fan_angles(sys, plan.n_dirs)

    rows_v, rows_w = [], []
    for delta in deltas:
        modulus, n_pairs = 0.0, 0
        a_min, n_eval = math.inf, 0
        for w in plan.window_scales:
            for _ in range(plan.n_centers):
                x = _random_domain_point(rng, sys, w, plan.margin)
                # modulus: pairs (z, y) with U(z,y) just under delta
                for _ in range(plan.n_modulus_pairs // plan.n_centers + 1):
                    y = _random_domain_point(rng, sys, w, plan.margin)
                    s = delta * rng.uniform(0.05, 0.999999)
                    z = _level_point(sys, y, rng.uniform(0.0, 2.0 * math.pi), s)
                    if z is None or not sys.map.domain.contains(z):
                        continue
                    try:
                        gap = abs(_first_difference(sys, x, z)
                                  - _first_difference(sys, x, y))
                    except OutOfDomain:
                        continue
                    n_pairs += 1
                    modulus = max(modulus, gap)
                # floor: W on metric spheres of radius rho*delta
                for theta in fan:
                    for rho in plan.radius_factors:
                        y = _level_point(sys, x, theta, rho * delta)
                        if y is None:
                            continue
                        try:
                            trip = differences(sys, x, y)
                        except OutOfDomain:
                            continue
                        n_eval += 1
                        a_min = min(a_min, trip.W)
        rows_v.append({"delta": delta, "modulus_sup": modulus, "n_pairs": n_pairs})
        rows_w.append({"delta": delta, "a_min": a_min if n_eval else 0.0,
                       "n_eval": n_eval})

    params = {"system": sys.name, "deltas": deltas, "plan": plan.to_dict(),
              "seed": plan.seed}
    ok_v = all(r["n_pairs"] > 0 and
               r["modulus_sup"] <= plan.modulus_cap_per_delta * r["delta"]
               for r in rows_v)
    ok_w = all(r["n_eval"] > 0 and r["a_min"] > plan.a_floor for r in rows_w)
    report_v = ConditionReport("HL-V", params, tuple(rows_v), HOLDS if ok_v else FAILS)
    report_w = ConditionReport("HL-W", params, tuple(rows_w), HOLDS if ok_w else FAILS)
    return report_v, report_w


# ---------------------------------------------------------------------------
# orbit-gap divergence
# ---------------------------------------------------------------------------

def ha_check(sys: PlanarSystem, x: Point, n_steps: int,
             threshold: float) -> ConditionReport:
    """Tabulate the metric gap between consecutive iterates of x for
    n in [-N, N]; holds when the gap exceeds the threshold at both ends."""
    if n_steps < 1:
        raise BadParameter("need at least one step")
    if threshold <= 0:
        raise BadParameter("threshold must be positive")
    pts = orbit(sys.map, x, -n_steps, n_steps + 1)
    rows = []
    for i, n in enumerate(range(-n_steps, n_steps + 1)):
        rows.append({"n": n, "value": _metric(sys, pts[i], pts[i + 1])})
    verdict = HOLDS if (rows[0]["value"] > threshold and
                        rows[-1]["value"] > threshold) else FAILS
    return ConditionReport(
        condition_id="HA",
        parameters={"system": sys.name, "x": [x.x, x.y], "N": n_steps,
                    "threshold": threshold, "seed": 0},
        samples=tuple(rows),
        verdict=verdict,
    )


# ---------------------------------------------------------------------------
# usual-metric comparability
# ---------------------------------------------------------------------------

def comparability_check(sys: PlanarSystem, ks, window: float = 1.0,
                        samples: int = 600, seed: int = 0,
                        n_windows: int = 5, window_growth: float = 4.0,
                        hold_cap: float = 1.5, fail_floor: float = 4.0
                        ) -> ConditionReport:
    """Estimate k'(k) = sup Euclidean distance among pairs with metric value
    below k, across geometrically growing windows.

    Holds when the estimate stabilizes as windows grow; fails when it keeps
    scaling with the window.
    """
    ks = list(ks)
    if not ks or any(k <= 0 for k in ks) or samples <= 0:
        raise BadK("need positive ks and a positive sample count")
    rng = random.Random(seed)
    rows = []
    per_k_growth = {}
    for k in ks:
        kprimes = []
        for wi in range(n_windows):
            w = window * window_growth ** wi
            best, hits = 0.0, 0
            for i in range(samples):
                x = _random_domain_point(rng, sys, w, 1e-6)
                r = math.exp(rng.uniform(math.log(1e-3 * k), math.log(2.0 * w)))
                if i % 2 == 0:
                    theta = rng.uniform(0.0, 2.0 * math.pi)
                else:
                    # radial jitter: far same-direction pairs are where a
                    # non-comparable metric shows its growth
                    theta = math.atan2(x.y, x.x) + rng.gauss(0.0, 0.05)
                y = Point(x.x + r * math.cos(theta), x.y + r * math.sin(theta))
                if not sys.map.domain.contains(y):
                    continue
                try:
                    u = _metric(sys, x, y)
                except OutOfDomain:
                    continue
                if u < k:
                    hits += 1
                    best = max(best, dist(x, y))
            kprimes.append({"k": k, "window": w, "kprime": best, "hits": hits})
        rows.extend(kprimes)
        first, last = kprimes[0], kprimes[-1]
        if first["hits"] == 0 or last["hits"] == 0 or first["kprime"] == 0.0:
            per_k_growth[k] = None
        else:
            per_k_growth[k] = last["kprime"] / first["kprime"]

    if any(g is None for g in per_k_growth.values()):
        verdict = INCONCLUSIVE
    elif all(g <= hold_cap for g in per_k_growth.values()):
        verdict = HOLDS
    elif any(g >= fail_floor for g in per_k_growth.values()):
        verdict = FAILS
    else:
        verdict = INCONCLUSIVE
    return ConditionReport(
        condition_id="comparability",
        parameters={
            "system": sys.name, "ks": ks, "window": window, "samples": samples,
            "n_windows": n_windows, "window_growth": window_growth,
            "hold_cap": hold_cap, "fail_floor": fail_floor, "seed": seed,
        },
        samples=tuple(rows),
        verdict=verdict,
    )


# ---------------------------------------------------------------------------
# expansiveness witness
# ---------------------------------------------------------------------------

def expansive_witness(sys: PlanarSystem, x: Point, y: Point, k: float,
                      n_max: int = 64) -> WitnessResult:
    """First iterate (scan order 0, 1, -1, 2, -2, ...) separating x and y
    beyond k in the metric.

    When the first difference at (x, y) is positive the analytic growth bound
    ceil((k - U)/V) caps the forward search and is returned alongside.
    """
    if x.x == y.x and x.y == y.y:
        raise IdenticalPoints("witness needs two distinct points")
    if not (k > 0.0):
        raise BadParameter(f"need k > 0, got {k}")

    u0 = _metric(sys, x, y)
    v0 = _first_difference(sys, x, y)
    bound = None
    if v0 > 0.0:
        bound = max(0, math.ceil((k - u0) / v0)) if u0 <= k else 0

    fwd = [(x, y)]
    bwd = [(x, y)]

    def value_at(n: int) -> float:
        if n >= 0:
            while len(fwd) <= n:
                a, b = fwd[-1]
                fwd.append((apply(sys.map, a), apply(sys.map, b)))
            a, b = fwd[n]
        else:
            while len(bwd) <= -n:
                a, b = bwd[-1]
                bwd.append((apply(sys.map, a, "inverse"), apply(sys.map, b, "inverse")))
            a, b = bwd[-n]
        return _metric(sys, a, b)

    for m in range(0, n_max + 1):
        for n in ((0,) if m == 0 else (m, -m)):
            val = value_at(n)
            if val > k:
                return WitnessResult(n=n, value=val, guarantee_bound=bound)
    raise WitnessNotFound(n_max)


# ---------------------------------------------------------------------------
# orbit-distance convexity scan
# ---------------------------------------------------------------------------

def convexity_scan(sys: PlanarSystem, pairs, n_steps: int,
                   tol: float = 1e-12) -> list[tuple[int, int]]:
    """Scan orbit pairs for an interior local maximum of n -> U(f^n x, f^n y).

    Returns every (pair_index, n) with U_{n+1} > U_n + tol and
    U_{n+1} > U_{n+2} + tol; empty for any system whose second difference
    stays positive.
    """
    if n_steps < 1:
        raise BadParameter("need at least one step")
    violations = []
    for idx, (x, y) in enumerate(pairs):
        xs = orbit(sys.map, x, 0, n_steps + 2)
        ys = orbit(sys.map, y, 0, n_steps + 2)
        us = [_metric(sys, a, b) for a, b in zip(xs, ys)]
        for n in range(0, n_steps + 1):
            if us[n + 1] > us[n] + tol and us[n + 1] > us[n + 2] + tol:
                violations.append((idx, n))
    return violations


# ---------------------------------------------------------------------------
# sector counter
# ---------------------------------------------------------------------------

def sector_count(sys: PlanarSystem, x: Point, r: float,
                 n_samples: int = 360) -> int:
    """Count maximal sign blocks of theta -> V(x, x + r e_theta) around the
    circle, wrap-around merged.  Four blocks mark a regular point; 2r blocks
    with r >= 3 mark a singularity candidate."""
    if not (r > 0.0):
        raise BadParameter(f"need r > 0, got {r}")
    if n_samples < 4:
        raise BadParameter("need at least 4 angular samples")
    signs = []
    for j in range(n_samples):
        theta = 2.0 * math.pi * j / n_samples
        y = Point(x.x + r * math.cos(theta), x.y + r * math.sin(theta))
        v = _first_difference(sys, x, y)
        if v > SIGN_DEADBAND:
            signs.append(1)
        elif v < -SIGN_DEADBAND:
            signs.append(-1)
    if not signs:
        raise Degenerate("first difference inside the deadband at every angle")
    changes = sum(1 for a, b in zip(signs, signs[1:] + signs[:1]) if a != b)
    return changes if changes > 0 else 1
