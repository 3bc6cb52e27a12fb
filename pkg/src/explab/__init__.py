"""Desk-scale lab for expansive plane homeomorphisms."""

from .analysis import (
    ConditionReport,
    SamplePlan,
    WitnessResult,
    comparability_check,
    convexity_scan,
    expansive_witness,
    ha_check,
    hl_estimate,
    hp_estimate,
    sector_count,
    sign_condition_check,
)
from .dsl import SystemConfig, compile_system, evaluate, parse, pprint
from .dynamics import (
    OMEGA,
    PLANE,
    QUADRANT,
    PlanarMap,
    PlanarSystem,
    Region,
    apply,
    flow_time,
    orbit,
    rect,
)
from .gallery import (
    Chart,
    Example2Params,
    example1_chart,
    example2_chart,
    example2_polyline,
    make_system,
)
from .geom import Point, PolyLine, intersect
from .invariant_sets import (
    ConjugacyMap,
    GridClassification,
    SetVerdict,
    build_conjugacy,
    component_grid,
    curve_intersection,
    membership,
    trace_curve,
)
from .lyapunov import (
    DifferenceTriple,
    PullbackLyapunov,
    SplitLyapunov,
    differences,
    metric_axioms_check,
    split_eval,
)

__version__ = "0.1.0"
