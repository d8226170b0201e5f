"""Static SVG 1.1 polyline rendering of depth-k arc approximations.

Coordinates are emitted with fixed six-decimal rounding so renders are
byte-identical across runs and platforms and diff cleanly in regression
tests.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .arc import vertex_grid

_FMT = "{:.6f}"


def _fmt(x: float) -> str:
    s = _FMT.format(float(x))
    return "0.000000" if s == "-0.000000" else s


def polyline_svg(points: Sequence[complex], *, width: float = 800.0,
                 margin: float = 16.0, stroke: str = "#1f4e66",
                 stroke_width: float = 1.0) -> str:
    """An SVG document whose single polyline joins ``points`` in order.

    The curve is fitted into ``width`` minus margins, preserving aspect
    ratio, with the y axis flipped to the usual mathematical orientation.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.size < 2:
        raise ValueError("polyline needs at least two points")
    xs, ys = pts.real, pts.imag
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    span = max(x1 - x0, y1 - y0, 1e-12)
    scale = (width - 2.0 * margin) / span
    height = (y1 - y0) * scale + 2.0 * margin

    px = margin + (xs - x0) * scale
    py = height - (margin + (ys - y0) * scale)
    coords = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))

    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">\n'
        f'  <polyline fill="none" stroke="{stroke}" '
        f'stroke-width="{_fmt(stroke_width)}" stroke-linejoin="round" '
        f'points="{coords}"/>\n'
        "</svg>\n"
    )


def figure_svg(obj, depth: int, **style) -> tuple[str, int]:
    """Render the depth-``depth`` vertex polyline of a figure or system.

    Returns the SVG text and the vertex count (ell**depth + 1).
    """
    grid = vertex_grid(obj, depth)
    return polyline_svg(grid, **style), len(grid)
