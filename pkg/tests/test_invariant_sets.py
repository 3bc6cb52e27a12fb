import math
import random

import pytest

from explab.dynamics import apply, orbit
from explab.errors import ChartMismatch, MissingChart, NonPositiveK, NotOnAxis
from explab.gallery import Example2Params, make_system
from explab.geom import Point, PolyLine, dist, intersect
from explab.invariant_sets import (
    LABEL_COMPONENT,
    LABEL_ESCAPES,
    SetVerdict,
    build_conjugacy,
    component_grid,
    curve_intersection,
    membership,
    trace_curve,
)

LIN = make_system("linear:2")
EX1 = make_system("example1")
EX2 = make_system("example2")


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def test_membership_examples():
    assert membership(LIN, Point(0, 0), Point(0, 0.5), 1.0).is_member
    v = membership(LIN, Point(0, 0), Point(0.1, 0), 1.0)
    assert v.kind == "escapes" and v.n == 4  # 0.1 * 2^4 = 1.6 > 1
    v = membership(LIN, Point(0, 0), Point(0, 1.5), 1.0)
    assert v.kind == "escapes" and v.n == 0
    assert membership(LIN, Point(2, 3), Point(2, 3), 1.0).is_member


def test_membership_unstable_direction():
    assert membership(LIN, Point(0, 0), Point(0.5, 0), 1.0, "unstable").is_member
    v = membership(LIN, Point(0, 0), Point(0, 0.1), 1.0, "unstable")
    assert v.kind == "escapes" and v.n == 4


def test_membership_rejects_bad_k():
    with pytest.raises(NonPositiveK):
        membership(LIN, Point(0, 0), Point(1, 0), 0.0)


def test_membership_analytic_stable_set():
    # for the split metric, the k-stable set of the origin is {0} x [-k, k]
    rng = random.Random(0)
    for _ in range(200):
        y = Point(rng.uniform(-2, 2), rng.uniform(-2, 2))
        v = membership(LIN, Point(0, 0), y, 1.0)
        in_set = y.x == 0.0 and abs(y.y) <= 1.0
        assert v.is_member == in_set


# ---------------------------------------------------------------------------
# component grids
# ---------------------------------------------------------------------------

def test_component_grid_is_the_axis_segment():
    grid = component_grid(LIN, Point(0, 0), 1.0, (-2, 2, -2, 2), 0.02)
    ci, cj = grid.center_index
    comp = grid.component_nodes()
    assert (ci, cj) in comp
    for (i, j) in comp:
        assert i == ci
        assert abs(grid.ys[j]) <= 1.0 + grid.resolution
    on_axis_inside = [j for j in range(len(grid.ys)) if abs(grid.ys[j]) <= 1.0 - grid.resolution]
    for j in on_axis_inside:
        assert grid.labels[ci, j] == LABEL_COMPONENT
    # everything off the axis escapes
    for i in range(len(grid.xs)):
        if i == ci:
            continue
        assert (grid.labels[i, :] == LABEL_ESCAPES).all()


def test_component_grid_tiny_radius_is_center_only():
    grid = component_grid(LIN, Point(0, 0), 1e-9, (-0.1, 0.1, -0.1, 0.1), 0.02)
    assert grid.component_nodes() == [grid.center_index]


def test_component_grid_on_the_charted_system():
    # The stable set of (1,1) is an exact slanted curve (y = 2x - 1 in system
    # coordinates) of zero thickness, so on a uniform grid only the center
    # node itself is a confirmed member; chart-exact points on the curve are
    # the oracle and do classify as members.
    grid = component_grid(EX1, Point(1, 1), 0.5, (0.5, 1.5, 0.0, 2.0), 0.05,
                          horizon=60)
    comp = grid.component_nodes()
    assert grid.center_index in comp
    for (i, j) in comp:
        x, y = grid.xs[i], grid.ys[j]
        assert abs(y - (2 * x - 1)) <= 0.1 + 1e-9
    # oracle: chart images of the model stable segment through (0.5, 0.5)
    for t in (0.1, 0.4, 0.9):
        on_curve = EX1.chart.inverse(Point(0.5, t))
        assert membership(EX1, Point(1, 1), on_curve, 0.5, horizon=40).is_member
    off_curve = Point(1.2, 1.2)  # not on y = 2x - 1
    assert membership(EX1, Point(1, 1), off_curve, 0.5).kind == "escapes"


def test_membership_consistency_on_component_nodes():
    grid = component_grid(LIN, Point(0, 0), 1.0, (-2, 2, -2, 2), 0.02)
    rng = random.Random(1)
    comp = grid.component_nodes()
    for (i, j) in rng.sample(comp, min(100, len(comp))):
        y = Point(float(grid.xs[i]), float(grid.ys[j]))
        pts_x = orbit(LIN.map, Point(0, 0), 0, 50)
        pts_y = orbit(LIN.map, y, 0, 50)
        for a, b in zip(pts_x, pts_y):
            assert LIN.metric.eval(a, b) <= 1.0 + 1e-12


# ---------------------------------------------------------------------------
# curve tracing
# ---------------------------------------------------------------------------

def test_trace_curve_linear_vertical():
    pl = trace_curve(LIN, Point(3, 2), "stable", n_samples=40)
    assert all(v.x == 3.0 for v in pl.vertices)
    assert len(pl.vertices) >= 20


def test_trace_curve_example1_lines():
    pl = trace_curve(EX1, Point(1, 1), "stable", n_samples=60)
    for v in pl.vertices:
        assert abs(v.y - (2 * v.x - 1)) <= 1e-9 * (1 + abs(v.x) + abs(v.y))
    pl = trace_curve(EX1, Point(0, 1), "stable", n_samples=30)
    assert all(v.x == 0.0 for v in pl.vertices)  # the axis is fixed


def test_trace_curve_requires_chart():
    from explab.dsl import SystemConfig, compile_system

    sys = compile_system(SystemConfig(fx="2*x", fy="y/2"))
    with pytest.raises(MissingChart):
        trace_curve(sys, Point(1, 1), "stable")


def test_traced_curves_are_monotone_graphs():
    # chart parameters increase strictly along the trace: simple curves
    for sys, p in ((EX1, Point(1, 1)), (EX2, Point(0.7, 2.0))):
        pl = trace_curve(sys, p, "stable", n_samples=50)
        ys = [sys.chart.forward(v).y for v in pl.vertices]
        assert all(b > a for a, b in zip(ys, ys[1:]))


def test_stable_and_unstable_traces_cross_at_most_once():
    rng = random.Random(2)
    for _ in range(10):
        a = rng.uniform(0.2, 2.0)
        p = EX1.chart.inverse(Point(a, rng.uniform(0.05, 0.8 / a)))
        b = rng.uniform(0.2, 2.0)
        q = EX1.chart.inverse(Point(b, rng.uniform(0.05, 0.8 / b)))
        stable = trace_curve(EX1, p, "stable", n_samples=120)
        unstable = trace_curve(EX1, q, "unstable", n_samples=120)
        hits = []
        first = intersect(stable, unstable)
        if first is not None:
            hits.append(first)
            # scan remaining pieces for a second crossing
            seen = 0
            for i in range(len(stable.vertices) - 1):
                piece = PolyLine(stable.vertices[i:i + 2])
                if intersect(piece, unstable) is not None:
                    seen += 1
            assert seen <= 2  # the crossing can touch two adjacent pieces


# ---------------------------------------------------------------------------
# curve intersection through charts
# ---------------------------------------------------------------------------

def test_curve_intersection_linear_product_structure():
    assert curve_intersection(LIN, Point(3, 0), Point(0, 2)) == Point(3, 2)


def test_curve_intersection_example1():
    got = curve_intersection(EX1, Point(0.5, 0), Point(0, 0.5))
    assert dist(got, Point(1, 1)) <= 1e-10


def test_curve_intersection_misses_outside_the_region():
    assert curve_intersection(EX1, Point(1, 0), Point(0, 1)) is None
    assert curve_intersection(EX1, Point(2, 0), Point(0, 3)) is None


def test_curve_intersection_validates_axis_membership():
    with pytest.raises(NotOnAxis):
        curve_intersection(EX1, Point(0.5, 0.2), Point(0, 0.5))


# ---------------------------------------------------------------------------
# conjugacy composition
# ---------------------------------------------------------------------------

def test_conjugacy_identity_between_equal_systems():
    conj = build_conjugacy(LIN, make_system("linear:2"), (-2, 2, -2, 2), 20, 20)
    assert conj.residual_stats["max"] == 0.0
    assert conj.residual_stats["roundtrip_max"] == 0.0


def test_conjugacy_linear_to_example1():
    conj = build_conjugacy(LIN, EX1, (0, 1, 0, 1), 50, 50)
    assert conj.residual_stats["max"] <= 1e-9
    assert conj.residual_stats["n_unverifiable"] >= 1  # the xy >= 1 corner


def test_conjugacy_example1_to_example2():
    conj = build_conjugacy(EX1, EX2, (0, 4, 0, 4), 50, 50)
    assert conj.residual_stats["max"] <= 1e-6
    assert conj.residual_stats["roundtrip_max"] <= 1e-8
    assert conj.residual_stats["n_verified"] == 2500


def test_conjugacy_residual_does_not_grow_with_finer_bisection():
    finer = Example2Params(bisection_tol=0.5e-12)
    from explab.gallery import example2_chart
    from explab.dynamics import QUADRANT, OMEGA
    from explab.gallery import Chart, _charted_system

    fine_sys = _charted_system(
        "example2-fine",
        to_model=lambda p: example2_chart(p, "inverse", finer),
        from_model=lambda p: example2_chart(p, "forward", finer),
        target=OMEGA,
    )
    base = build_conjugacy(EX1, EX2, (0, 3, 0, 3), 20, 20)
    fine = build_conjugacy(EX1, fine_sys, (0, 3, 0, 3), 20, 20)
    assert fine.residual_stats["max"] <= base.residual_stats["max"] * 1.5 + 1e-15


def test_conjugacy_rejects_mismatched_expansion():
    with pytest.raises(ChartMismatch):
        build_conjugacy(LIN, make_system("linear:3"), (-1, 1, -1, 1), 5, 5)


def test_verdict_helpers():
    v = SetVerdict.escapes(7)
    assert v.witness_n == 7 and not v.is_member
    assert SetVerdict.member().is_member
    u = SetVerdict.undecided(10, 0.5, -1e-12)
    assert u.kind == "undecided" and u.U == 0.5
