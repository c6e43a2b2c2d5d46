"""Minimal log-log scatter plots as SVG 1.1 text. Output is byte-deterministic."""

from __future__ import annotations

import math
from typing import Dict, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 480
MARGIN = 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def emit_svg(
    series: Dict[str, Sequence[Tuple[float, float]]],
    labels: Optional[Dict[str, str]] = None,
    reference_slopes: Sequence[float] = (),
    title: str = "",
) -> str:
    """Log-log scatter of each series with its least-squares line.

    ``reference_slopes`` adds dashed guide lines through the first point of
    the first series. ``labels`` may carry ``"x"``/``"y"`` axis captions;
    when absent no captions are drawn.
    """
    if not series or not any(len(p) for p in series.values()):
        raise ValueError("need at least one nonempty series")
    labels = labels or {}
    logs = {}
    for name, pts in series.items():
        arr = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
        if np.any(arr <= 0):
            raise ValueError(f"series {name!r} has non-positive values; log axes need positive data")
        logs[name] = np.log10(arr)
    allpts = np.concatenate(list(logs.values()))
    x0, y0 = allpts.min(axis=0)
    x1, y1 = allpts.max(axis=0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(lx):
        return MARGIN + (lx - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)

    def py(ly):
        return HEIGHT - MARGIN - (ly - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}" '
        'fill="none" stroke="black"/>',
        f'<defs><clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
        f'height="{HEIGHT - 2 * MARGIN}"/></clipPath></defs>',
    ]
    # decade ticks
    for d in range(math.ceil(x0), math.floor(x1) + 1):
        out.append(f'<text x="{_fmt(px(d))}" y="{HEIGHT - MARGIN + 18}" font-size="11" text-anchor="middle">1e{d}</text>')
    for d in range(math.ceil(y0), math.floor(y1) + 1):
        out.append(f'<text x="{MARGIN - 6}" y="{_fmt(py(d) + 4)}" font-size="11" text-anchor="end">1e{d}</text>')
    if title:
        out.append(f'<text x="{WIDTH // 2}" y="{MARGIN // 2}" font-size="14" text-anchor="middle">{escape(title)}</text>')
    if "x" in labels:
        out.append(f'<text x="{WIDTH // 2}" y="{HEIGHT - 15}" font-size="12" text-anchor="middle">{escape(labels["x"])}</text>')
    if "y" in labels:
        out.append(
            f'<text x="15" y="{HEIGHT // 2}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 15 {HEIGHT // 2})">{escape(labels["y"])}</text>'
        )

    out.append('<g clip-path="url(#plot)">')
    first = next(iter(logs.values()))
    for s in reference_slopes:
        ax, ay = first[0]
        ya, yb = ay + s * (x0 - ax), ay + s * (x1 - ax)
        out.append(
            f'<line x1="{_fmt(px(x0))}" y1="{_fmt(py(ya))}" x2="{_fmt(px(x1))}" y2="{_fmt(py(yb))}" '
            'stroke="gray" stroke-dasharray="4 3"/>'
        )
    for i, (name, arr) in enumerate(logs.items()):
        color = COLORS[i % len(COLORS)]
        for lx, ly in arr:
            out.append(f'<circle cx="{_fmt(px(lx))}" cy="{_fmt(py(ly))}" r="3" fill="{color}"/>')
        if len(arr) >= 2 and np.ptp(arr[:, 0]) > 0:
            slope, icpt = np.polyfit(arr[:, 0], arr[:, 1], 1)
            out.append(
                f'<line x1="{_fmt(px(x0))}" y1="{_fmt(py(icpt + slope * x0))}" x2="{_fmt(px(x1))}" '
                f'y2="{_fmt(py(icpt + slope * x1))}" stroke="{color}"/>'
            )
    out.append("</g>")
    for i, name in enumerate(series):
        if name:
            color = COLORS[i % len(COLORS)]
            out.append(
                f'<text x="{WIDTH - MARGIN - 4}" y="{MARGIN + 16 + 14 * i}" font-size="11" '
                f'text-anchor="end" fill="{color}">{escape(str(name))}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
