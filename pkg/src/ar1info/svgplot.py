"""Tiny dependency-free SVG 1.1 line-chart writer.

Each series is split into contiguous runs by a boolean mask: runs where the
mask holds are drawn solid, the rest dashed. Runs share their boundary point
so the curve stays connected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    solid: Optional[Sequence[bool]] = None


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    series: list = field(default_factory=list)


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.2e}"
    return f"{v:.4g}"


def _runs(solid: Sequence[bool]):
    """Yield ``(start, stop_inclusive, is_solid)`` covering every segment."""
    n = len(solid)
    if n == 0:
        return
    start = 0
    for i in range(1, n):
        if solid[i] != solid[start]:
            # the segment (i-1, i) takes the style of the earlier point
            yield start, i, bool(solid[start])
            start = i
    if start < n - 1 or n == 1:
        yield start, n - 1, bool(solid[start])


def _range(values):
    """Return ``(data_lo, data_hi, plot_lo, plot_hi)``; the plot range is padded."""
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0, 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad, lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo, hi, lo - pad, hi + pad


def render_panel(panel: Panel, x0: float, y0: float, width: float, height: float, n_ticks: int = 5) -> list[str]:
    left, right, top, bottom = 70.0, 20.0, 30.0, 45.0
    pw, ph = width - left - right, height - top - bottom
    xs = [v for s in panel.series for v in s.x]
    ys = [v for s in panel.series for v in s.y]
    xd0, xd1, xlo, xhi = _range(xs)
    yd0, yd1, ylo, yhi = _range(ys)

    def sx(v):
        return x0 + left + (v - xlo) / (xhi - xlo) * pw

    def sy(v):
        return y0 + top + ph - (v - ylo) / (yhi - ylo) * ph

    out = [
        f'<g>',
        f'<rect x="{x0 + left:.2f}" y="{y0 + top:.2f}" width="{pw:.2f}" height="{ph:.2f}" '
        f'fill="none" stroke="#000" stroke-width="1"/>',
        f'<text x="{x0 + left + pw / 2:.2f}" y="{y0 + 18:.2f}" text-anchor="middle" '
        f'font-size="14">{escape(panel.title)}</text>',
        f'<text x="{x0 + left + pw / 2:.2f}" y="{y0 + height - 8:.2f}" text-anchor="middle" '
        f'font-size="12">{escape(panel.xlabel)}</text>',
        f'<text x="{x0 + 14:.2f}" y="{y0 + top + ph / 2:.2f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 {x0 + 14:.2f} {y0 + top + ph / 2:.2f})">{escape(panel.ylabel)}</text>',
    ]
    for k in range(n_ticks):
        xv = xd0 + (xd1 - xd0) * k / (n_ticks - 1)
        yv = yd0 + (yd1 - yd0) * k / (n_ticks - 1)
        px, py = sx(xv), sy(yv)
        ybase = y0 + top + ph
        out.append(f'<line x1="{px:.2f}" y1="{ybase:.2f}" x2="{px:.2f}" y2="{ybase + 5:.2f}" stroke="#000"/>')
        out.append(f'<text x="{px:.2f}" y="{ybase + 18:.2f}" text-anchor="middle" font-size="10">{_fmt(xv)}</text>')
        xbase = x0 + left
        out.append(f'<line x1="{xbase - 5:.2f}" y1="{py:.2f}" x2="{xbase:.2f}" y2="{py:.2f}" stroke="#000"/>')
        out.append(f'<text x="{xbase - 8:.2f}" y="{py + 3:.2f}" text-anchor="end" font-size="10">{_fmt(yv)}</text>')

    for i, s in enumerate(panel.series):
        color = PALETTE[i % len(PALETTE)]
        solid = list(s.solid) if s.solid is not None else [True] * len(s.x)
        for a, b, is_solid in _runs(solid):
            pts = " ".join(
                f"{sx(s.x[j]):.2f},{sy(s.y[j]):.2f}"
                for j in range(a, b + 1)
                if math.isfinite(s.x[j]) and math.isfinite(s.y[j])
            )
            if not pts:
                continue
            dash = "" if is_solid else ' stroke-dasharray="6,4"'
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')
        if len(panel.series) > 1:
            ly = y0 + top + 14 + 14 * i
            lx = x0 + left + pw - 130
            out.append(f'<line x1="{lx:.2f}" y1="{ly - 4:.2f}" x2="{lx + 20:.2f}" y2="{ly - 4:.2f}" stroke="{color}" stroke-width="1.5"/>')
            out.append(f'<text x="{lx + 25:.2f}" y="{ly:.2f}" font-size="10">{escape(s.label)}</text>')
    out.append("</g>")
    return out


def render_svg(panels: Sequence[Panel], cols: int = 1, panel_width: float = 480.0, panel_height: float = 300.0, title: Optional[str] = None) -> str:
    rows = max(1, math.ceil(len(panels) / cols))
    head = 30.0 if title else 0.0
    width, height = cols * panel_width, rows * panel_height + head
    parts = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{width:.0f}" height="{height:.0f}" fill="#fff"/>',
    ]
    if title:
        parts.append(f'<text x="{width / 2:.2f}" y="20" text-anchor="middle" font-size="15">{escape(title)}</text>')
    for k, panel in enumerate(panels):
        r, c = divmod(k, cols)
        parts.extend(render_panel(panel, c * panel_width, head + r * panel_height, panel_width, panel_height))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
