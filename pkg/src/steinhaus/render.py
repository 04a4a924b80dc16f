"""Static SVG snapshots of planar (and 1D) sets.

Rendering only reads the sets; nothing numeric flows back.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import InvalidInput
from .sets import Ball, ConvexPolytope, GridSandwich, GridSet, IntervalUnion, PointSet

SIZE = 480
PAD = 16


def _bbox(sets):
    lo, hi = np.array([np.inf, np.inf]), np.array([-np.inf, -np.inf])
    for K in sets:
        if K is None:
            continue
        if isinstance(K, GridSandwich):
            K = K.outer
        if isinstance(K, GridSet):
            idx = K.cell_indices()
            a, b = idx.min(0) * float(K.h), (idx.max(0) + 1) * float(K.h)
        elif isinstance(K, PointSet):
            p = K.as_floats()
            a, b = p.min(0), p.max(0)
        elif isinstance(K, ConvexPolytope):
            v = np.array([[float(c) for c in x] for x in K.vertices])
            a, b = v.min(0), v.max(0)
        elif isinstance(K, IntervalUnion):
            a, b = np.array([float(K.min), -0.5]), np.array([float(K.max), 0.5])
        elif isinstance(K, Ball):
            c, r = np.array([float(x) for x in K.center]), float(K.radius)
            a, b = c - r, c + r
        else:
            continue
        if a.shape[0] == 1:
            a, b = np.array([a[0], -0.5]), np.array([b[0], 0.5])
        lo, hi = np.minimum(lo, a), np.maximum(hi, b)
    span = max(float((hi - lo).max()), 1e-12)
    return lo, span


class _Canvas:
    def __init__(self, lo, span):
        self.lo, self.s = lo, (SIZE - 2 * PAD) / span
        self.parts = []

    def xy(self, x, y):
        return PAD + (x - self.lo[0]) * self.s, SIZE - PAD - (y - self.lo[1]) * self.s

    def rect(self, x0, y0, x1, y1, fill, opacity=1.0):
        a, b = self.xy(x0, y1)
        self.parts.append(f'<rect x="{a:.3f}" y="{b:.3f}" width="{(x1 - x0) * self.s:.3f}" '
                          f'height="{(y1 - y0) * self.s:.3f}" fill="{fill}" fill-opacity="{opacity}"/>')

    def poly(self, pts, stroke, fill="none"):
        coords = " ".join("%.3f,%.3f" % self.xy(x, y) for x, y in pts)
        self.parts.append(f'<polygon points="{coords}" fill="{fill}" stroke="{stroke}" '
                          f'stroke-width="1"/>')

    def dot(self, x, y, r, fill):
        a, b = self.xy(x, y)
        self.parts.append(f'<circle cx="{a:.3f}" cy="{b:.3f}" r="{r:.2f}" fill="{fill}"/>')

    def svg(self, title: str) -> str:
        body = "\n".join(self.parts)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
                f'viewBox="0 0 {SIZE} {SIZE}">\n<title>{title}</title>\n'
                f'<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n')


def _draw_grid(cv: _Canvas, G: GridSet, fill, opacity):
    h = float(G.h)
    if G.dimension == 1:
        for a, b in _runs(G.mask):
            x0 = (G.offset[0] + a) * h
            cv.rect(x0, -0.25, x0 + (b - a) * h, 0.25, fill, opacity)
        return
    if G.dimension != 2:
        raise InvalidInput("SVG snapshots are planar")
    # one rectangle per horizontal run keeps the file small
    for i, row in enumerate(G.mask):
        x0 = (G.offset[0] + i) * h
        for a, b in _runs(row):
            cv.rect(x0, (G.offset[1] + a) * h, x0 + h, (G.offset[1] + b) * h, fill, opacity)


def _runs(row):
    d = np.diff(np.concatenate([[0], row.astype(np.int8), [0]]))
    return zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1))


def render_svg(K, hull: Optional[ConvexPolytope] = None, title: str = "") -> str:
    """SVG text for a set, with an optional hull outline."""
    cv = _Canvas(*_bbox([K, hull]))
    if isinstance(K, GridSandwich):
        _draw_grid(cv, K.outer, "#9ecae1", 0.6)
        if K.inner is not None:
            _draw_grid(cv, K.inner, "#08519c", 1.0)
    elif isinstance(K, GridSet):
        _draw_grid(cv, K, "#08519c", 1.0)
    elif isinstance(K, PointSet):
        p = K.as_floats()
        if p.shape[1] == 1:
            p = np.hstack([p, np.zeros_like(p)])
        if p.shape[1] != 2:
            raise InvalidInput("SVG snapshots are planar")
        r = max(0.6, min(3.0, 200.0 / max(len(p), 1) ** 0.5))
        for x, y in p:
            cv.dot(x, y, r, "#08519c")
    elif isinstance(K, IntervalUnion):
        for a, b in K.intervals:
            cv.rect(float(a), -0.25, max(float(b), float(a) + 1e-3 * float(K.max - K.min or 1)),
                    0.25, "#08519c")
    elif isinstance(K, ConvexPolytope):
        if K.dimension != 2:
            raise InvalidInput("SVG snapshots are planar")
        cv.poly([tuple(float(c) for c in v) for v in K.vertices], "#08519c", "#9ecae1")
    else:
        raise InvalidInput(f"cannot render {type(K).__name__}")
    if hull is not None and hull.dimension == 2 and not hull.is_degenerate:
        cv.poly([tuple(float(c) for c in v) for v in hull.vertices], "#d94801")
    return cv.svg(title)

