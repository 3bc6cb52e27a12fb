"""Command-line front end.

Exit codes: 0 = analysis completed (the verdict, pass or fail, lives in the
output), 1 = runtime error (domain violation, bisection failure, bad config),
2 = usage error.  A checker that correctly detects a failing condition has
succeeded, so verdicts never change the exit code.

The sampling seed resolves as: --seed flag, then the EXPLAB_SEED environment
variable, then 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import analysis, gallery, invariant_sets, reports
from .dsl import SystemConfig, compile_system, evaluate, parse as parse_expr
from .dynamics import PlanarSystem, orbit
from .errors import ExplabError
from .geom import Point


@dataclass(frozen=True)
class Invocation:
    """Full parameter record of one run, embedded in JSON reports."""

    subcommand: str
    args: dict
    seed: int

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, "args": self.args, "seed": self.seed}


def _parse_point(text: str) -> Point:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}")
    return Point(float(parts[0]), float(parts[1]))


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _parse_rect(text: str) -> tuple[float, float, float, float]:
    vals = _parse_floats(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"expected 'xmin,xmax,ymin,ymax', got {text!r}")
    return tuple(vals)


def _load_system(args) -> PlanarSystem:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = json.load(fh)
        spec = cfg.get("system", cfg)
        if spec.get("type") == "dsl":
            return compile_system(SystemConfig.from_dict(spec))
        return gallery.make_system(spec)
    if getattr(args, "system", None):
        return gallery.make_system(gallery.parse_system_shorthand(args.system))
    raise ExplabError("need --system or --config")


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("EXPLAB_SEED")
    if env is not None:
        return int(env)
    return 0


def _invocation(subcommand: str, args, seed: int) -> Invocation:
    """Effective analysis parameters; output destinations are not analysis
    inputs and the seed is recorded in resolved form."""
    record = {}
    for key, value in vars(args).items():
        if key in ("cmd", "condition", "out", "json", "svg", "seed") or value is None:
            continue
        if isinstance(value, Point):
            value = [value.x, value.y]
        record[key] = value
    return Invocation(subcommand, record, seed)


def _emit_report(args, report: analysis.ConditionReport, invocation: Invocation,
                 csv_header=None, csv_rows=None) -> None:
    if getattr(args, "out", None) and csv_header is not None:
        reports.write_csv(args.out, csv_header, csv_rows)
    if getattr(args, "json", None):
        doc = report.to_dict()
        doc["parameters"] = dict(doc["parameters"])
        doc["parameters"]["invocation"] = invocation.to_dict()
        reports.write_json(args.json, doc)


def _print_verdict(report: analysis.ConditionReport) -> None:
    print(f"{report.condition_id}: {report.verdict}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="explab", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add_system(p):
        p.add_argument("--system", help="builtin shorthand: linear:LAM, example1, example2, composite")
        p.add_argument("--config", help="JSON config file with a {'system': ...} record")
        p.add_argument("--seed", type=int, default=None)

    g = sub.add_parser("gallery", help="built-in systems")
    g.add_argument("action", choices=["list"])

    o = sub.add_parser("orbit", help="iterate a point and emit n,x,y")
    add_system(o)
    o.add_argument("--point", type=_parse_point, required=True)
    o.add_argument("--n-min", type=int, default=0)
    o.add_argument("--n-max", type=int, default=10)
    o.add_argument("--out")

    c = sub.add_parser("check", help="run a condition checker")
    c.add_argument("condition", choices=["signs", "hp", "hl", "ha", "comparability"])
    add_system(c)
    c.add_argument("--point", type=_parse_point)
    c.add_argument("--k", type=float, default=1.0)
    c.add_argument("--n-dirs", type=int, default=16)
    c.add_argument("--rect", type=_parse_rect, default=(0.0, 1.0, 0.0, 1.0))
    c.add_argument("--step", type=float, default=0.25)
    c.add_argument("--radii", type=_parse_floats, default=[10.0, 100.0, 1000.0, 10000.0])
    c.add_argument("--angles", type=_parse_floats, default=None)
    c.add_argument("--tolerance", type=float, default=1e-3)
    c.add_argument("--deltas", type=_parse_floats, default=[0.1, 1.0])
    c.add_argument("--N", type=int, default=12)
    c.add_argument("--threshold", type=float, default=1000.0)
    c.add_argument("--ks", type=_parse_floats, default=[1.0])
    c.add_argument("--samples", type=int, default=600)
    c.add_argument("--window", type=float, default=1.0)
    c.add_argument("--out", help="CSV output path")
    c.add_argument("--json", help="JSON report path")

    w = sub.add_parser("witness", help="first iterate separating two points beyond k")
    add_system(w)
    w.add_argument("--x", type=_parse_point, required=True)
    w.add_argument("--y", type=_parse_point, required=True)
    w.add_argument("--k", type=float, required=True)
    w.add_argument("--n-max", type=int, default=64)
    w.add_argument("--json")

    s = sub.add_parser("stable-set", help="classify a grid by k-stable membership")
    add_system(s)
    s.add_argument("--point", type=_parse_point, required=True)
    s.add_argument("--k", type=float, required=True)
    s.add_argument("--window", type=_parse_rect, required=True)
    s.add_argument("--resolution", type=float, required=True)
    s.add_argument("--direction", choices=["stable", "unstable"], default="stable")
    s.add_argument("--horizon", type=int, default=200)
    s.add_argument("--out")
    s.add_argument("--svg")

    cv = sub.add_parser("curve", help="trace a stable/unstable curve through a chart")
    add_system(cv)
    cv.add_argument("--point", type=_parse_point, required=True)
    cv.add_argument("--kind", choices=["stable", "unstable"], default="stable")
    cv.add_argument("--span", type=_parse_floats, default=None)
    cv.add_argument("--n-samples", type=int, default=100)
    cv.add_argument("--out")
    cv.add_argument("--svg")

    ix = sub.add_parser("intersect", help="stable-curve x unstable-curve meeting point")
    add_system(ix)
    ix.add_argument("--a", type=_parse_point, required=True,
                    help="point on the fixed point's unstable curve")
    ix.add_argument("--b", type=_parse_point, required=True,
                    help="point on the fixed point's stable curve")

    cj = sub.add_parser("conjugacy", help="compose charts of two systems and verify")
    cj.add_argument("--from", dest="sys_from", required=True)
    cj.add_argument("--to", dest="sys_to", required=True)
    cj.add_argument("--window", type=_parse_rect, default=(0.0, 4.0, 0.0, 4.0))
    cj.add_argument("--nx", type=int, default=50)
    cj.add_argument("--ny", type=int, default=50)
    cj.add_argument("--seed", type=int, default=None)
    cj.add_argument("--json")

    sc = sub.add_parser("sectors", help="sign-sector count on a small circle")
    add_system(sc)
    sc.add_argument("--point", type=_parse_point, required=True)
    sc.add_argument("--r", type=float, default=1e-3)
    sc.add_argument("--n-samples", type=int, default=360)

    ev = sub.add_parser("eval-dsl", help="evaluate one expression")
    ev.add_argument("--expr", required=True)
    ev.add_argument("--bind", action="append", default=[],
                    help="variable binding NAME=VALUE (repeatable)")
    return ap


def _cmd_gallery(args) -> int:
    for spec in gallery.BUILTIN_SPECS:
        sys_obj = gallery.make_system(dict(spec))
        print(f"{sys_obj.name}  {reports.json_text(spec)}")
    return 0


def _cmd_orbit(args) -> int:
    system = _load_system(args)
    pts = orbit(system.map, args.point, args.n_min, args.n_max)
    rows = [(n, p.x, p.y) for n, p in zip(range(args.n_min, args.n_max + 1), pts)]
    if args.out:
        reports.write_csv(args.out, ["n", "x", "y"], rows)
    else:
        for row in rows:
            print(f"{row[0]},{reports.fmt_float(row[1])},{reports.fmt_float(row[2])}")
    return 0


def _cmd_check(args) -> int:
    system = _load_system(args)
    seed = _resolve_seed(args)
    inv = _invocation("check " + args.condition, args, seed)
    if args.condition == "signs":
        if args.point is None:
            raise ExplabError("check signs needs --point")
        rep = analysis.sign_condition_check(system, args.point, args.k, args.n_dirs)
        _emit_report(args, rep, inv,
                     ["theta", "y_x", "y_y", "U", "V", "sign"],
                     [(s["theta"], s["y_x"], s["y_y"], s["U"], s["V"], s["sign"])
                      for s in rep.samples])
        _print_verdict(rep)
    elif args.condition == "hp":
        rep = analysis.hp_estimate(system, args.rect, args.step, args.radii,
                                   n_dirs=args.n_dirs, angles=args.angles,
                                   tolerance=args.tolerance)
        _emit_report(args, rep, inv,
                     ["radius", "ratio_max", "x_at_max_x", "x_at_max_y"],
                     [(s["radius"], s["ratio_max"], s["x_at_max_x"], s["x_at_max_y"])
                      for s in rep.samples])
        _print_verdict(rep)
    elif args.condition == "hl":
        plan = analysis.SamplePlan(seed=seed)
        rep_v, rep_w = analysis.hl_estimate(system, args.deltas, plan)
        by_delta = {s["delta"]: [s["modulus_sup"], None] for s in rep_v.samples}
        for s in rep_w.samples:
            by_delta[s["delta"]][1] = s["a_min"]
        rows = [(d, m, a) for d, (m, a) in sorted(by_delta.items())]
        if args.out:
            reports.write_csv(args.out, ["delta", "modulus_sup", "a_min"], rows)
        if args.json:
            doc = {"reports": [rep_v.to_dict(), rep_w.to_dict()],
                   "invocation": inv.to_dict()}
            reports.write_json(args.json, doc)
        _print_verdict(rep_v)
        _print_verdict(rep_w)
    elif args.condition == "ha":
        if args.point is None:
            raise ExplabError("check ha needs --point")
        rep = analysis.ha_check(system, args.point, args.N, args.threshold)
        _emit_report(args, rep, inv, ["n", "value"],
                     [(s["n"], s["value"]) for s in rep.samples])
        _print_verdict(rep)
    else:  # comparability
        rep = analysis.comparability_check(system, args.ks, window=args.window,
                                           samples=args.samples, seed=seed)
        _emit_report(args, rep, inv, ["k", "window", "kprime", "hits"],
                     [(s["k"], s["window"], s["kprime"], s["hits"])
                      for s in rep.samples])
        _print_verdict(rep)
    return 0


def _cmd_witness(args) -> int:
    system = _load_system(args)
    res = analysis.expansive_witness(system, args.x, args.y, args.k, args.n_max)
    print(f"n={res.n} value={reports.fmt_float(res.value)} "
          f"guarantee_bound={res.guarantee_bound}")
    if args.json:
        reports.write_json(args.json, {
            "n": res.n, "value": res.value, "guarantee_bound": res.guarantee_bound,
        })
    return 0


def _cmd_stable_set(args) -> int:
    system = _load_system(args)
    grid = invariant_sets.component_grid(system, args.point, args.k, args.window,
                                         args.resolution, horizon=args.horizon,
                                         direction=args.direction)
    if args.out:
        reports.write_csv(args.out, ["ix", "iy", "x", "y", "label"],
                          reports.grid_csv_rows(grid))
    if args.svg:
        from pathlib import Path
        Path(args.svg).write_text(reports.svg_grid(grid))
    n_comp = len(grid.component_nodes())
    print(f"component nodes: {n_comp}")
    return 0


def _cmd_curve(args) -> int:
    system = _load_system(args)
    span = tuple(args.span) if args.span else None
    pl = invariant_sets.trace_curve(system, args.point, args.kind,
                                    span=span, n_samples=args.n_samples)
    if args.out:
        reports.write_csv(args.out, ["x", "y"], [(v.x, v.y) for v in pl.vertices])
    if args.svg:
        from pathlib import Path
        Path(args.svg).write_text(reports.svg_curves([pl]))
    print(f"curve samples: {len(pl.vertices)}")
    return 0


def _cmd_intersect(args) -> int:
    system = _load_system(args)
    pt = invariant_sets.curve_intersection(system, args.a, args.b)
    if pt is None:
        print("none")
    else:
        print(f"{reports.fmt_float(pt.x)},{reports.fmt_float(pt.y)}")
    return 0


def _cmd_conjugacy(args) -> int:
    sys_a = gallery.make_system(gallery.parse_system_shorthand(args.sys_from))
    sys_b = gallery.make_system(gallery.parse_system_shorthand(args.sys_to))
    conj = invariant_sets.build_conjugacy(sys_a, sys_b, args.window, args.nx, args.ny)
    stats = conj.residual_stats
    if args.json:
        reports.write_json(args.json, {
            "from": sys_a.name, "to": sys_b.name,
            "window": list(args.window), "nx": args.nx, "ny": args.ny,
            "residual_stats": stats,
        })
    print(f"max residual {reports.fmt_float(stats['max'])} over "
          f"{stats['n_verified']} nodes ({stats['n_unverifiable']} unverifiable)")
    return 0


def _cmd_sectors(args) -> int:
    system = _load_system(args)
    n = analysis.sector_count(system, args.point, args.r, args.n_samples)
    print(n)
    return 0


def _cmd_eval_dsl(args) -> int:
    env = {}
    for binding in args.bind:
        name, _, value = binding.partition("=")
        env[name.strip()] = float(value)
    print(reports.fmt_float(evaluate(parse_expr(args.expr), env)))
    return 0


_DISPATCH = {
    "gallery": _cmd_gallery,
    "orbit": _cmd_orbit,
    "check": _cmd_check,
    "witness": _cmd_witness,
    "stable-set": _cmd_stable_set,
    "curve": _cmd_curve,
    "intersect": _cmd_intersect,
    "conjugacy": _cmd_conjugacy,
    "sectors": _cmd_sectors,
    "eval-dsl": _cmd_eval_dsl,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _DISPATCH[args.cmd](args)
    except ExplabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
