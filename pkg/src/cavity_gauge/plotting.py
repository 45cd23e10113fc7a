"""
Dependency-free SVG line charts from sweep CSV files.

A plot spec is a small JSON object::

    {"x": "eta", "y": "entanglement_entropy", "series": [0.0, 1.0],
     "overlay": "pert_entanglement_entropy", "output": "f2a.svg",
     "title": "...", "x_label": "...", "y_label": "...",
     "x_range": [0, 0.3], "width": 640, "height": 420}

One series is drawn per distinct value of the other grid axis (``alpha`` when
``x`` is ``eta`` and vice versa); ``series`` restricts which values are drawn.
The optional overlay column is drawn dotted in black for each series.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from .sweeps import read_csv

PALETTE = ("#1f77b4", "#2ca02c", "#d62728", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
DASHES = ("", "6,4", "2,3", "8,3,2,3")
_SPEC_KEYS = {"x", "y", "series", "overlay", "output", "title", "x_label", "y_label",
              "x_range", "y_range", "width", "height"}


class PlotError(ValueError):
    pass


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def nice_ticks(lo: float, hi: float, target: int = 6) -> List[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e-3 and abs(v) < 1e4:
        return f"{v:.6g}"
    return f"{v:.1e}"


def load_plot_spec(path) -> dict:
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PlotError(f"{path}: invalid JSON ({exc})") from exc
    return spec


def _validate_spec(spec: dict) -> dict:
    if not isinstance(spec, dict):
        raise PlotError("plot spec must be a JSON object")
    unknown = sorted(set(spec) - _SPEC_KEYS)
    if unknown:
        raise PlotError(f"unknown plot spec key(s): {', '.join(unknown)}")
    for key in ("x", "y", "output"):
        if key not in spec:
            raise PlotError(f"plot spec needs {key!r}")
    if spec["x"] not in ("eta", "alpha"):
        raise PlotError("x must be 'eta' or 'alpha'")
    return spec


def collect_series(rows: Sequence[Dict], spec: dict) -> Tuple[Dict[float, List[Tuple[float, float]]],
                                                              Dict[float, List[Tuple[float, float]]]]:
    x = spec["x"]
    group = "alpha" if x == "eta" else "eta"
    wanted = spec.get("series")
    xr = spec.get("x_range")
    series: Dict[float, List[Tuple[float, float]]] = {}
    overlay: Dict[float, List[Tuple[float, float]]] = {}
    for row in rows:
        g = row[group]
        if wanted is not None and not any(abs(g - w) < 1e-9 for w in wanted):
            continue
        xv = row[x]
        if xr is not None and not (xr[0] - 1e-12 <= xv <= xr[1] + 1e-12):
            continue
        y = row[spec["y"]]
        if y is not None and math.isfinite(y):
            series.setdefault(g, []).append((xv, y))
        if spec.get("overlay"):
            o = row[spec["overlay"]]
            if o is not None and math.isfinite(o):
                overlay.setdefault(g, []).append((xv, o))
    for d in (series, overlay):
        for pts in d.values():
            pts.sort()
    return series, overlay


def svg_line_chart(
    series: Dict[float, List[Tuple[float, float]]],
    overlay: Optional[Dict[float, List[Tuple[float, float]]]] = None,
    *,
    group_name: str = "alpha",
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    x_range: Optional[Sequence[float]] = None,
    y_range: Optional[Sequence[float]] = None,
    width: int = 640,
    height: int = 420,
) -> str:
    overlay = overlay or {}
    pts = [p for s in list(series.values()) + list(overlay.values()) for p in s]
    if not pts:
        raise PlotError("nothing to plot: every series is empty")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = (min(xs), max(xs)) if x_range is None else tuple(x_range)
    y0, y1 = (min(ys), max(ys)) if y_range is None else tuple(y_range)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        pad = abs(y0) * 0.1 or 0.5
        y0, y1 = y0 - pad, y1 + pad
    else:
        pad = 0.05 * (y1 - y0)
        if y_range is None:
            y0, y1 = y0 - pad, y1 + pad

    left, right, top, bottom = 72, 150, 40, 56
    pw, ph = width - left - right, height - top - bottom

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<clipPath id="plot-area"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/></clipPath>',
    ]
    if title:
        out.append(f'<text x="{_fmt(left + pw / 2)}" y="24" font-family="sans-serif" font-size="15" '
                   f'text-anchor="middle">{escape(title)}</text>')

    for t in nice_ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{_fmt(X)}" y1="{top}" x2="{_fmt(X)}" y2="{top + ph}" stroke="#e6e6e6"/>')
        out.append(f'<text x="{_fmt(X)}" y="{top + ph + 18}" font-family="sans-serif" font-size="11" '
                   f'text-anchor="middle">{_tick_label(t)}</text>')
    for t in nice_ticks(y0, y1):
        Y = sy(t)
        out.append(f'<line x1="{left}" y1="{_fmt(Y)}" x2="{left + pw}" y2="{_fmt(Y)}" stroke="#e6e6e6"/>')
        out.append(f'<text x="{left - 8}" y="{_fmt(Y + 4)}" font-family="sans-serif" font-size="11" '
                   f'text-anchor="end">{_tick_label(t)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    if x_label:
        out.append(f'<text x="{_fmt(left + pw / 2)}" y="{height - 14}" font-family="sans-serif" '
                   f'font-size="13" text-anchor="middle">{escape(x_label)}</text>')
    if y_label:
        out.append(f'<text x="18" y="{_fmt(top + ph / 2)}" font-family="sans-serif" font-size="13" '
                   f'text-anchor="middle" transform="rotate(-90 18 {_fmt(top + ph / 2)})">'
                   f'{escape(y_label)}</text>')

    def polyline(points, color, dash, sw):
        coords = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in points)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        return (f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{sw}"'
                f'{dash_attr} clip-path="url(#plot-area)"/>')

    legend_y = top + 10
    for k, g in enumerate(sorted(series)):
        color = PALETTE[k % len(PALETTE)]
        dash = DASHES[k % len(DASHES)]
        out.append(polyline(series[g], color, dash, 2))
        lx = left + pw + 14
        out.append(f'<line x1="{lx}" y1="{legend_y}" x2="{lx + 24}" y2="{legend_y}" stroke="{color}" '
                   f'stroke-width="2"' + (f' stroke-dasharray="{dash}"' if dash else "") + "/>")
        out.append(f'<text x="{lx + 30}" y="{legend_y + 4}" font-family="sans-serif" font-size="11">'
                   f'{escape(group_name)} = {_tick_label(g)}</text>')
        legend_y += 18
    if overlay:
        for g in sorted(overlay):
            out.append(polyline(overlay[g], "black", "1.5,3", 1.5))
        lx = left + pw + 14
        out.append(f'<line x1="{lx}" y1="{legend_y}" x2="{lx + 24}" y2="{legend_y}" stroke="black" '
                   f'stroke-width="1.5" stroke-dasharray="1.5,3"/>')
        out.append(f'<text x="{lx + 30}" y="{legend_y + 4}" font-family="sans-serif" font-size="11">'
                   f'weak coupling</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_plot(csv_path, plot_spec) -> Path:
    """
    Render one chart from a sweep CSV. ``plot_spec`` is a dict or a JSON path.

    Raises :class:`PlotError` for missing columns or empty data; no file is
    written in that case.
    """
    spec = plot_spec if isinstance(plot_spec, dict) else load_plot_spec(plot_spec)
    spec = _validate_spec(spec)
    _, columns, rows = read_csv(csv_path)
    needed = ["eta", "alpha", spec["y"]] + ([spec["overlay"]] if spec.get("overlay") else [])
    missing = [c for c in needed if c not in columns]
    if missing:
        raise PlotError(f"{csv_path} lacks column(s): {', '.join(missing)}")
    series, overlay = collect_series(rows, spec)
    if not series:
        raise PlotError(f"no finite values of {spec['y']!r} to plot")
    svg = svg_line_chart(
        series, overlay,
        group_name="alpha" if spec["x"] == "eta" else "eta",
        title=spec.get("title", ""),
        x_label=spec.get("x_label", spec["x"]),
        y_label=spec.get("y_label", spec["y"]),
        x_range=spec.get("x_range"),
        y_range=spec.get("y_range"),
        width=int(spec.get("width", 640)),
        height=int(spec.get("height", 420)),
    )
    out = Path(spec["output"])
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(svg.encode("utf-8"))
    return out
