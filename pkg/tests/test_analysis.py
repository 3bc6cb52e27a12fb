import math

import pytest

from explab.analysis import (
    FAILS,
    HOLDS,
    SamplePlan,
    comparability_check,
    convexity_scan,
    expansive_witness,
    ha_check,
    hl_estimate,
    hp_estimate,
    sector_count,
    sign_condition_check,
)
from explab.dsl import SystemConfig, compile_system
from explab.errors import (
    BadK,
    Degenerate,
    EmptyRadii,
    IdenticalPoints,
    InvalidRadius,
    WitnessNotFound,
)
from explab.gallery import make_system
from explab.geom import Point
from explab.reports import json_text

LIN = make_system("linear:2")
EX1 = make_system("example1")
EX2 = make_system("example2")

ROTATION = compile_system(SystemConfig(
    fx="c*x - s*y", fy="s*x + c*y",
    inv_fx="c*x + s*y", inv_fy="-s*x + c*y",
    constants={"c": math.cos(1.0), "s": math.sin(1.0)},
))


# ---------------------------------------------------------------------------
# sign availability
# ---------------------------------------------------------------------------

def test_signs_found_at_origin_and_off_origin():
    for x in (Point(0, 0), Point(5, 7)):
        rep = sign_condition_check(LIN, x, k=1.0 if x.x == 0 else 2.0)
        assert rep.verdict == HOLDS
        # metric sphere points sit at level k within the bisection tolerance
        for row in rep.samples:
            assert abs(row["U"] - (1.0 if x.x == 0 else 2.0)) <= 1e-9


def test_signs_bad_radius():
    with pytest.raises(InvalidRadius):
        sign_condition_check(LIN, Point(0, 0), k=0.0)


# ---------------------------------------------------------------------------
# ratio decay at infinity
# ---------------------------------------------------------------------------

def test_hp_linear_along_unstable_axis_decays_like_the_bound():
    rep = hp_estimate(LIN, (0, 1, 0, 1), 0.25, [10, 100, 1000, 10000],
                      angles=[0.0, math.pi])
    assert rep.verdict == HOLDS
    ratios = [s["ratio_max"] for s in rep.samples]
    for r, radius in zip(ratios, [10, 100, 1000, 10000]):
        assert r <= 1.5 / (radius - 2)
    assert ratios[-1] <= 3e-4


def test_hp_linear_full_circle_still_holds_with_default_tolerance():
    rep = hp_estimate(LIN, (0, 1, 0, 1), 0.25, [10, 100, 1000, 10000])
    assert rep.verdict == HOLDS
    ratios = [s["ratio_max"] for s in rep.samples]
    assert all(b <= a * 1.05 for a, b in zip(ratios, ratios[1:]))


def test_hp_fails_for_the_invariant_region_extension():
    rep = hp_estimate(EX1, (0, 1, 0, 1), 0.25, [10, 100, 1000, 10000])
    assert rep.verdict == FAILS
    assert all(s["ratio_max"] >= 1.0 for s in rep.samples)


def test_hp_empty_radii():
    with pytest.raises(EmptyRadii):
        hp_estimate(LIN, (0, 1, 0, 1), 0.25, [])


# ---------------------------------------------------------------------------
# uniform local bounds
# ---------------------------------------------------------------------------

def test_hl_linear_floor_and_modulus():
    rep_v, rep_w = hl_estimate(LIN, [0.1, 1.0, 10.0])
    assert rep_v.verdict == HOLDS and rep_w.verdict == HOLDS
    for row in rep_w.samples:
        # min of W on U = delta is (1 - 1/lam)^2 * delta = 0.25 delta
        assert 0.249 * row["delta"] <= row["a_min"] <= 0.251 * row["delta"]
    for row in rep_v.samples:
        # |V(x,z) - V(x,y)| <= (lam-1) U(z,y) < delta
        assert row["modulus_sup"] <= row["delta"] * (1 + 1e-9)


def test_hl_pullback_floor_stays_positive():
    rep_v, rep_w = hl_estimate(EX1, [0.1, 1.0])
    assert rep_w.verdict == HOLDS
    for row in rep_w.samples:
        # W >= 0.25 U pointwise, so the floor is at least 0.25 delta
        assert row["a_min"] >= 0.2499 * row["delta"]


def test_hl_determinism():
    a = hl_estimate(LIN, [0.5], SamplePlan(seed=42))
    b = hl_estimate(LIN, [0.5], SamplePlan(seed=42))
    assert json_text(a[0].to_dict()) == json_text(b[0].to_dict())
    assert json_text(a[1].to_dict()) == json_text(b[1].to_dict())


# ---------------------------------------------------------------------------
# orbit-gap divergence
# ---------------------------------------------------------------------------

def test_ha_diverges_off_the_axes():
    rep = ha_check(LIN, Point(1, 1), 12, 1000.0)
    assert rep.verdict == HOLDS
    # gap at step n is 2^n + 2^(-n-1)
    for row in rep.samples:
        n = row["n"]
        assert math.isclose(row["value"], 2.0 ** n + 2.0 ** (-n - 1), rel_tol=1e-12)


def test_ha_fails_on_the_stable_curve():
    rep = ha_check(LIN, Point(0, 1), 12, 1000.0)
    assert rep.verdict == FAILS
    assert rep.samples[-1]["value"] < 1.0  # forward gaps shrink to zero


def test_ha_zero_at_the_fixed_point():
    rep = ha_check(LIN, Point(0, 0), 5, 1.0)
    assert all(row["value"] == 0.0 for row in rep.samples)
    assert rep.verdict == FAILS


# ---------------------------------------------------------------------------
# comparability
# ---------------------------------------------------------------------------

def test_comparability_linear_stabilizes_near_k():
    rep = comparability_check(LIN, [1.0], samples=400, seed=0)
    assert rep.verdict == HOLDS
    for row in rep.samples:
        assert row["kprime"] <= 1.0  # Euclidean <= taxicab
        assert row["kprime"] >= 0.5


def test_comparability_fails_for_the_invariant_region_extension():
    rep = comparability_check(EX1, [1.0], samples=400, seed=0)
    assert rep.verdict == FAILS
    first, last = rep.samples[0], rep.samples[-1]
    assert last["kprime"] > 50 * first["kprime"]


def test_comparability_rejects_bad_input():
    with pytest.raises(BadK):
        comparability_check(LIN, [1.0], samples=0)
    with pytest.raises(BadK):
        comparability_check(LIN, [])


# ---------------------------------------------------------------------------
# witness
# ---------------------------------------------------------------------------

def test_witness_forward_with_guarantee():
    res = expansive_witness(LIN, Point(0, 0), Point(1, 0), 100.0)
    assert res.n == 7 and res.value == 128.0
    assert res.guarantee_bound == 99
    assert res.n <= res.guarantee_bound


def test_witness_backward():
    res = expansive_witness(LIN, Point(0, 0), Point(0, 1), 100.0)
    assert res.n == -7
    assert res.guarantee_bound is None


def test_witness_errors():
    with pytest.raises(IdenticalPoints):
        expansive_witness(LIN, Point(1, 1), Point(1, 1), 10.0)
    with pytest.raises(WitnessNotFound):
        expansive_witness(ROTATION, Point(0, 0), Point(1, 0), 100.0, n_max=16)


# ---------------------------------------------------------------------------
# convexity scan
# ---------------------------------------------------------------------------

def test_convexity_clean_on_linear_pairs():
    import random
    rng = random.Random(0)
    pairs = [(Point(rng.uniform(-2, 2), rng.uniform(-2, 2)),
              Point(rng.uniform(-2, 2), rng.uniform(-2, 2))) for _ in range(100)]
    assert convexity_scan(LIN, pairs, 50) == []


def test_convexity_violated_by_a_rotation():
    violations = convexity_scan(ROTATION, [(Point(0, 0), Point(1, 0))], 30)
    assert violations  # taxicab length of a rotating vector oscillates


# ---------------------------------------------------------------------------
# sector counter
# ---------------------------------------------------------------------------

def test_sector_count_regular_points():
    assert sector_count(LIN, Point(0, 0), 1e-3) == 4
    assert sector_count(LIN, Point(3, -2), 1e-3) == 4
    assert sector_count(EX1, Point(1, 1), 1e-3) == 4


def test_sector_count_degenerate_metric():
    # compile_system would reject an all-zero metric, so assemble one by hand
    from explab.dsl import DslMetric, parse
    from explab.dynamics import PlanarSystem

    frozen = PlanarSystem(name="frozen", map=LIN.map,
                          metric=DslMetric(parse("0*px"), {}),
                          fixed_point=Point(0, 0))
    with pytest.raises(Degenerate):
        sector_count(frozen, Point(0, 0), 1e-3)


# ---------------------------------------------------------------------------
# report structure
# ---------------------------------------------------------------------------

def test_reports_carry_parameters_and_seed():
    rep = sign_condition_check(LIN, Point(0, 0), 1.0)
    assert rep.condition_id == "signs"
    assert "seed" in rep.parameters
    assert rep.verdict in (HOLDS, FAILS, "inconclusive")
    doc = rep.to_dict()
    assert set(doc) == {"condition_id", "parameters", "samples", "verdict"}
