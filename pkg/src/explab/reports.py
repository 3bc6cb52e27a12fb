"""Deterministic CSV / JSON / SVG emission.

Floats are serialized with 17 significant digits so report files round-trip
exactly and can double as regression oracles; identical inputs therefore
produce byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

from .geom import PolyLine
from .invariant_sets import GridClassification, LABEL_NAMES


def fmt_float(x: float) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def _cell(v) -> str:
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def json_text(obj) -> str:
    """JSON with explicit float formatting (17 significant digits)."""
    out: list[str] = []
    _json_write(obj, out)
    return "".join(out)


def _json_write(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            out.append(f'"{fmt_float(obj)}"')
        else:
            out.append(fmt_float(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        out.append(f'"{escaped}"')
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            _json_write(str(k), out)
            out.append(":")
            _json_write(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _json_write(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, obj) -> None:
    Path(path).write_text(json_text(obj) + "\n")


# ---------------------------------------------------------------------------
# SVG (pure geometry, no scripting)
# ---------------------------------------------------------------------------

def _f(x: float) -> str:
    return format(x, ".8g")

GRID_COLORS = {
    "escapes": "#e8e8e8",
    "member-in-component": "#1f5fa8",
    "member-off-component": "#8fb8de",
    "undecided": "#e8a13d",
}

CURVE_COLORS = ("#1f5fa8", "#c23b22", "#3d8c40", "#7b4fa6", "#c78f2d")


def svg_document(body: list[str], viewbox: tuple[float, float, float, float]) -> str:
    x, y, w, h = viewbox
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="{_f(x)} {_f(y)} {_f(w)} {_f(h)}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def svg_grid(grid: GridClassification) -> str:
    res = grid.resolution
    body = []
    for i, gx in enumerate(grid.xs):
        for j, gy in enumerate(grid.ys):
            name = LABEL_NAMES[int(grid.labels[i, j])]
            color = GRID_COLORS[name]
            # flip y so the picture is in the usual orientation
            body.append(
                f'<rect x="{_f(gx - res / 2)}" y="{_f(-gy - res / 2)}" '
                f'width="{_f(res)}" height="{_f(res)}" fill="{color}"/>'
            )
    xmin, xmax, ymin, ymax = grid.window
    return svg_document(body, (xmin - res, -ymax - res,
                               xmax - xmin + 2 * res, ymax - ymin + 2 * res))


def svg_curves(polylines: list[PolyLine], ray_extent: float = 10.0) -> str:
    """One path per curve; terminal rays are drawn out to ray_extent."""
    body = []
    xs, ys = [], []
    for idx, pl in enumerate(polylines):
        pts = [(v.x, v.y) for v in pl.vertices]
        if pl.terminal_ray_slope is not None:
            lx, ly = pts[-1]
            pts.append((lx + ray_extent, ly + ray_extent * pl.terminal_ray_slope))
        xs.extend(p[0] for p in pts)
        ys.extend(p[1] for p in pts)
        d = "M " + " L ".join(f"{_f(px)} {_f(-py)}" for px, py in pts)
        color = CURVE_COLORS[idx % len(CURVE_COLORS)]
        body.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="0.01"/>')
    if not xs:
        return svg_document(body, (0, 0, 1, 1))
    pad = 0.05 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    return svg_document(body, (min(xs) - pad, -max(ys) - pad,
                               max(xs) - min(xs) + 2 * pad,
                               max(ys) - min(ys) + 2 * pad))


def grid_csv_rows(grid: GridClassification):
    for i, gx in enumerate(grid.xs):
        for j, gy in enumerate(grid.ys):
            yield (i, j, float(gx), float(gy), LABEL_NAMES[int(grid.labels[i, j])])
