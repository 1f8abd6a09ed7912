"""Dependency-free SVG polyline charts.

Plots are a convenience, not a contract: plain hand-written markup, one
polyline per series, labeled axes, min/max ticks.
"""

from __future__ import annotations

import math

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 80, 160, 40, 60


def _fmt(x):
    return f"{x:.6g}"


def polyline_chart(series, *, title="", xlabel="", ylabel=""):
    """series: iterable of (label, xs, ys) with equal-length sequences."""
    pts = [(x, y) for _, xs, ys in series for x, y in zip(xs, ys)
           if math.isfinite(x) and math.isfinite(y)]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    x0, y0 = _ML, _H - _MB
    x1, y1 = _W - _MR, _MT
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    if title:
        out.append(f'<text x="{_W // 2}" y="24" text-anchor="middle" '
                   f'font-size="16">{title}</text>')
    if xlabel:
        out.append(f'<text x="{(x0 + x1) // 2}" y="{_H - 16}" text-anchor="middle" '
                   f'font-size="13">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="20" y="{(y0 + y1) // 2}" text-anchor="middle" '
                   f'font-size="13" transform="rotate(-90 20 {(y0 + y1) // 2})">'
                   f'{ylabel}</text>')

    if pts:
        xmin = min(p[0] for p in pts)
        xmax = max(p[0] for p in pts)
        ymin = min(p[1] for p in pts)
        ymax = max(p[1] for p in pts)
        if xmax == xmin:
            xmax = xmin + 1.0
        if ymax == ymin:
            ymax = ymin + 1.0
        sx = (x1 - x0) / (xmax - xmin)
        sy = (y0 - y1) / (ymax - ymin)

        def px(x):
            return x0 + (x - xmin) * sx

        def py(y):
            return y0 - (y - ymin) * sy

        for (val, anchor, xx, yy) in (
                (xmin, "middle", px(xmin), y0 + 18), (xmax, "middle", px(xmax), y0 + 18),
                (ymin, "end", x0 - 6, py(ymin) + 4), (ymax, "end", x0 - 6, py(ymax) + 4)):
            out.append(f'<text x="{xx:.1f}" y="{yy:.1f}" text-anchor="{anchor}" '
                       f'font-size="11">{_fmt(val)}</text>')
        if ymin < 0.0 < ymax:
            out.append(f'<line x1="{x0}" y1="{py(0):.1f}" x2="{x1}" y2="{py(0):.1f}" '
                       f'stroke="#bbbbbb" stroke-dasharray="4 3"/>')
        for i, (label, xs, ys) in enumerate(series):
            color = _COLORS[i % len(_COLORS)]
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys)
                              if math.isfinite(x) and math.isfinite(y))
            if coords:
                out.append(f'<polyline points="{coords}" fill="none" '
                           f'stroke="{color}" stroke-width="1.6"/>')
            ly = _MT + 16 + 18 * i
            out.append(f'<line x1="{x1 + 12}" y1="{ly - 4}" x2="{x1 + 34}" '
                       f'y2="{ly - 4}" stroke="{color}" stroke-width="1.6"/>')
            out.append(f'<text x="{x1 + 40}" y="{ly}" font-size="12">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
