"""Deterministic SVG rendering of instances and per-vehicle Dubins tours."""

from __future__ import annotations

import math

from . import dubins
from .instance import Instance

_PALETTE = ["#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#e67e22",
            "#16a085", "#7f8c8d"]


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def tour_polyline(instance: Instance, vehicle: int, tour, step=None):
    """Sampled (x, y) points along the full closed tour of one vehicle."""
    radius = instance.vehicles[vehicle].turn_radius
    if step is None:
        step = radius / 10.0
    points = []
    for u, v in zip(tour, tour[1:]):
        a, b = instance.vertex_pose(u), instance.vertex_pose(v)
        path = dubins.shortest_path(a, b, radius)
        seg = dubins.sample_path(path, a, step)
        if points:
            seg = seg[1:]
        points.extend(seg)
    return points


def polyline_length(points) -> float:
    return sum(math.hypot(b[0] - a[0], b[1] - a[1])
               for a, b in zip(points, points[1:]))


def render_svg(instance: Instance, tours) -> str:
    """SVG document with targets, depots, heading glyphs, and tours.

    Byte-deterministic for fixed inputs: floats are formatted at fixed
    precision and iteration order is fixed.
    """
    if len(tours) != instance.num_vehicles:
        raise ValueError("one tour per vehicle is required")
    all_vertices = list(instance.targets) + list(instance.depots)
    xs = [p.x for p in all_vertices]
    ys = [p.y for p in all_vertices]
    margin = 0.08 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    x0, y0 = min(xs) - margin, min(ys) - margin
    w = max(xs) - min(xs) + 2 * margin
    h = max(ys) - min(ys) + 2 * margin
    glyph = 0.015 * max(w, h)

    def sy(y):  # svg y axis points down
        return y0 + h - (y - y0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(w)}" '
        f'height="{_fmt(h)}" fill="white"/>',
    ]
    for k, tour in enumerate(tours):
        if len(tour) < 2:
            continue
        pts = tour_polyline(instance, k, tour)
        coords = " ".join(f"{_fmt(x)},{_fmt(sy(y))}" for x, y in pts)
        color = _PALETTE[k % len(_PALETTE)]
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(glyph / 3)}"/>'
        )
    for i, p in enumerate(instance.targets):
        parts.append(
            f'<circle cx="{_fmt(p.x)}" cy="{_fmt(sy(p.y))}" r="{_fmt(glyph)}" '
            f'fill="#2c3e50"/>'
        )
        parts.append(_heading_glyph(p, glyph, sy))
    for k, p in enumerate(instance.depots):
        color = _PALETTE[k % len(_PALETTE)]
        parts.append(
            f'<rect x="{_fmt(p.x - glyph)}" y="{_fmt(sy(p.y) - glyph)}" '
            f'width="{_fmt(2 * glyph)}" height="{_fmt(2 * glyph)}" '
            f'fill="{color}"/>'
        )
        parts.append(_heading_glyph(p, glyph, sy))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _heading_glyph(pose, glyph, sy):
    x2 = pose.x + 2.5 * glyph * math.cos(pose.theta)
    y2 = pose.y + 2.5 * glyph * math.sin(pose.theta)
    return (
        f'<line x1="{_fmt(pose.x)}" y1="{_fmt(sy(pose.y))}" '
        f'x2="{_fmt(x2)}" y2="{_fmt(sy(y2))}" stroke="#7f8c8d" '
        f'stroke-width="{_fmt(glyph / 4)}"/>'
    )
