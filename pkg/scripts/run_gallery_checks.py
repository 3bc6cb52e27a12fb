#!/usr/bin/env python3
"""Run the full checker battery on the built-in systems and write reports.

Usage: python scripts/run_gallery_checks.py [outdir]

Writes one CSV/JSON per (system, check) into outdir (default ./out) and
prints a verdict table.  Seeded and deterministic: rerunning produces
byte-identical files.
"""

import sys
from pathlib import Path

from explab.analysis import (
    SamplePlan,
    comparability_check,
    ha_check,
    hl_estimate,
    hp_estimate,
    sector_count,
    sign_condition_check,
)
from explab.gallery import make_system
from explab.geom import Point
from explab.reports import write_csv, write_json

SEED = 0


def main() -> int:
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
    outdir.mkdir(parents=True, exist_ok=True)
    systems = [make_system(n) for n in ("linear:2", "example1", "example2", "composite")]
    table = []

    for sys_obj in systems:
        tag = sys_obj.name.split(":")[0] if sys_obj.name.startswith("composite") else sys_obj.name
        tag = tag.replace(":", "")

        probe = Point(1.0, 1.0)
        rep = sign_condition_check(sys_obj, probe, k=0.5)
        write_json(outdir / f"{tag}-signs.json", rep.to_dict())
        table.append((sys_obj.name, "signs", rep.verdict))

        rep = hp_estimate(sys_obj, (0, 1, 0, 1), 0.25, [10, 100, 1000, 10000])
        write_csv(outdir / f"{tag}-hp.csv",
                  ["radius", "ratio_max", "x_at_max_x", "x_at_max_y"],
                  [(s["radius"], s["ratio_max"], s["x_at_max_x"], s["x_at_max_y"])
                   for s in rep.samples])
        table.append((sys_obj.name, "hp", rep.verdict))

        rep_v, rep_w = hl_estimate(sys_obj, [0.1, 1.0], SamplePlan(seed=SEED))
        rows = [(v["delta"], v["modulus_sup"], w["a_min"])
                for v, w in zip(rep_v.samples, rep_w.samples)]
        write_csv(outdir / f"{tag}-hl.csv", ["delta", "modulus_sup", "a_min"], rows)
        table.append((sys_obj.name, "hl-V", rep_v.verdict))
        table.append((sys_obj.name, "hl-W", rep_w.verdict))

        rep = ha_check(sys_obj, probe, 12, 1000.0)
        write_csv(outdir / f"{tag}-ha.csv", ["n", "value"],
                  [(s["n"], s["value"]) for s in rep.samples])
        table.append((sys_obj.name, "ha", rep.verdict))

        rep = comparability_check(sys_obj, [1.0], samples=400, seed=SEED)
        write_json(outdir / f"{tag}-comparability.json", rep.to_dict())
        table.append((sys_obj.name, "comparability", rep.verdict))

        n = sector_count(sys_obj, probe, 1e-3)
        table.append((sys_obj.name, "sectors@(1,1)", str(n)))

    width = max(len(r[0]) for r in table) + 2
    for name, check, verdict in table:
        print(f"{name:<{width}} {check:<16} {verdict}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
