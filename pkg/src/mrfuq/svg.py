"""Minimal SVG line charts; presentation only, no numeric logic."""

from __future__ import annotations

import math

_W, _H, _PAD = 640, 420, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#7f7f7f")


def _path(xs, ys, x0, x1, y0, y1) -> str:
    pts = []
    for x, y in zip(xs, ys):
        if any(map(math.isnan, (x, y))):
            continue
        px = _PAD + (x - x0) / (x1 - x0 or 1.0) * (_W - 2 * _PAD)
        py = _H - _PAD - (y - y0) / (y1 - y0 or 1.0) * (_H - 2 * _PAD)
        pts.append(f"{px:.1f},{py:.1f}")
    return " ".join(pts)


def line_chart(series: dict[str, tuple[list[float], list[float]]], title: str) -> str:
    """SVG document with one polyline per named series."""
    all_x = [x for xs, _ in series.values() for x in xs if not math.isnan(x)]
    all_y = [y for _, ys in series.values() for y in ys if not math.isnan(y)]
    if not all_x or not all_y:
        raise ValueError("nothing to plot")
    x0, x1 = min(all_x), max(all_x)
    y0, y1 = min(all_y), max(all_y)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}" stroke="black"/>',
        f'<line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H - _PAD}" stroke="black"/>',
        f'<text x="{_PAD}" y="{_H - _PAD + 20}" font-size="11">{x0:.3g}</text>',
        f'<text x="{_W - _PAD}" y="{_H - _PAD + 20}" text-anchor="end" font-size="11">{x1:.3g}</text>',
        f'<text x="{_PAD - 5}" y="{_H - _PAD}" text-anchor="end" font-size="11">{y0:.3g}</text>',
        f'<text x="{_PAD - 5}" y="{_PAD}" text-anchor="end" font-size="11">{y1:.3g}</text>',
    ]
    for k, (name, (xs, ys)) in enumerate(series.items()):
        color = _COLORS[k % len(_COLORS)]
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{_path(xs, ys, x0, x1, y0, y1)}"/>'
        )
        parts.append(
            f'<text x="{_W - _PAD}" y="{_PAD + 14 * k}" text-anchor="end" '
            f'font-size="11" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
