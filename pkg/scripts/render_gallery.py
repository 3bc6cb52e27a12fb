#!/usr/bin/env python3
"""Render SVG pictures of the built-in constructions.

Usage: python scripts/render_gallery.py [outdir]

Emits: the polygonal stable/unstable curve families, traced stable and
unstable curves of both chart extensions, and the k-stable component grid of
the linear model.
"""

import sys
from pathlib import Path

from explab.gallery import example2_polyline, make_system
from explab.geom import Point
from explab.invariant_sets import component_grid, trace_curve
from explab.reports import svg_curves, svg_grid


def main() -> int:
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
    outdir.mkdir(parents=True, exist_ok=True)

    ks = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0]
    family = [example2_polyline("stable", k) for k in ks]
    family += [example2_polyline("unstable", k) for k in ks]
    (outdir / "polygonal-families.svg").write_text(svg_curves(family, ray_extent=4.0))

    ex1 = make_system("example1")
    curves = [trace_curve(ex1, ex1.chart.inverse(Point(k, 0.4 / k)), "stable",
                          n_samples=80) for k in (0.25, 0.5, 1.0, 2.0)]
    curves += [trace_curve(ex1, ex1.chart.inverse(Point(0.4 * k, 1.0 / k)), "unstable",
                           n_samples=80) for k in (0.5, 1.0, 2.0)]
    (outdir / "rational-curves.svg").write_text(svg_curves(curves))

    ex2 = make_system("example2")
    curves = [trace_curve(ex2, ex2.chart.inverse(Point(k, 0.4 / k)), "stable",
                          n_samples=80) for k in (0.25, 0.5, 1.0, 2.0)]
    (outdir / "polygonal-traced.svg").write_text(svg_curves(curves))

    lin = make_system("linear:2")
    grid = component_grid(lin, Point(0, 0), 1.0, (-2, 2, -2, 2), 0.05)
    (outdir / "linear-stable-set.svg").write_text(svg_grid(grid))

    for name in ("polygonal-families", "rational-curves", "polygonal-traced",
                 "linear-stable-set"):
        print(f"wrote {outdir / name}.svg")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
