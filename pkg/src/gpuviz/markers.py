"""Marker distance fields and antialiased coverage.

This is the reference math the per-pixel shading mirrors: a signed distance
in marker-local pixel coordinates (negative inside, zero on the boundary)
turned into a coverage alpha through a smooth falloff one antialias band
wide. All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .views import MarkerShape, MarkerStyleKind

_SQRT2 = np.sqrt(2.0)

# Arrow outline pointing +x, inscribed in the unit radius. Head spans
# x in [0, 1], shaft half-height 0.2, head half-width 0.6. CCW order.
_ARROW_POLY = np.array(
    [
        (1.0, 0.0),
        (0.0, 0.6),
        (0.0, 0.2),
        (-1.0, 0.2),
        (-1.0, -0.2),
        (0.0, -0.2),
        (0.0, -0.6),
    ],
    dtype=np.float64,
)


@dataclass
class MarkerStyle:
    shape: MarkerShape = MarkerShape.DISC
    style: MarkerStyleKind = MarkerStyleKind.FILLED
    linewidth: float = 1.0
    antialias_band: float = 1.0

    def __post_init__(self):
        if self.antialias_band <= 0:
            raise ValueError("antialias band must be positive")
        if self.style in (MarkerStyleKind.STROKED, MarkerStyleKind.OUTLINED) and self.linewidth <= 0:
            raise ValueError(f"{self.style.value} markers need a positive linewidth")


def _polygon_sdf(px, py, poly: np.ndarray):
    """Exact signed distance to a closed polygon (negative inside)."""
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    d = np.full(np.broadcast(px, py).shape, np.inf)
    sign = np.ones_like(d)
    n = len(poly)
    for i in range(n):
        vi = poly[i]
        vj = poly[i - 1]
        ex, ey = vj[0] - vi[0], vj[1] - vi[1]
        wx, wy = px - vi[0], py - vi[1]
        t = np.clip((wx * ex + wy * ey) / (ex * ex + ey * ey), 0.0, 1.0)
        bx, by = wx - ex * t, wy - ey * t
        d = np.minimum(d, bx * bx + by * by)
        c0 = py >= vi[1]
        c1 = py < vj[1]
        c2 = ex * wy > ey * wx
        flip = (c0 & c1 & c2) | (~c0 & ~c1 & ~c2)
        sign = np.where(flip, -sign, sign)
    return sign * np.sqrt(d)


def marker_sdf(shape: MarkerShape, px, py, radius):
    """Signed distance in pixels from point (px, py) to the marker boundary.

    The marker is centered at the origin with the given pixel radius.
    Distances are Euclidean for every shape so the antialias band has
    uniform width.
    """
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    radius = np.asarray(radius, dtype=np.float64)
    if shape is MarkerShape.DISC:
        return np.hypot(px, py) - radius
    if shape is MarkerShape.DIAMOND:
        # Normalized so the value is true distance to the diamond's faces.
        return (np.abs(px) + np.abs(py) - radius) / _SQRT2
    if shape is MarkerShape.ARROW:
        # Exact polygon distance scales linearly with the radius.
        safe_r = np.maximum(radius, 1e-12)
        return _polygon_sdf(px / safe_r, py / safe_r, _ARROW_POLY) * safe_r
    raise ValueError(f"unknown marker shape {shape}")


def smoothstep(edge0: float, edge1: float, x):
    t = np.clip((np.asarray(x, dtype=np.float64) - edge0) / (edge1 - edge0), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def marker_coverage(sdf_value, style: MarkerStyle):
    """Coverage alpha in [0, 1] for filled and stroked styles.

    Filled: 1 deep inside, 0 far outside, 0.5 exactly on the boundary.
    Stroked: a band of width linewidth around the boundary with the same
    falloff on both flanks.
    """
    band = style.antialias_band
    if band <= 0:
        raise ValueError("antialias band must be positive")
    if style.style is MarkerStyleKind.FILLED:
        return 1.0 - smoothstep(-band / 2.0, band / 2.0, sdf_value)
    if style.style is MarkerStyleKind.STROKED:
        half = style.linewidth / 2.0
        return 1.0 - smoothstep(half - band / 2.0, half + band / 2.0, np.abs(sdf_value))
    raise ValueError("use marker_coverage_outlined for the outlined style")


def marker_coverage_outlined(sdf_value, style: MarkerStyle):
    """(fill alpha, stroke alpha) for the outlined style.

    The interior fills with alpha 1 while a distinct stroke band hugs the
    boundary; the renderer composites the stroke color over the fill.
    """
    band = style.antialias_band
    fill = 1.0 - smoothstep(-band / 2.0, band / 2.0, sdf_value)
    half = style.linewidth / 2.0
    stroke = 1.0 - smoothstep(half - band / 2.0, half + band / 2.0, np.abs(sdf_value))
    return fill, stroke
