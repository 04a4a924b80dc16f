"""Inner/Outer rasterization onto the cell lattice of size h."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .errors import EmptyInner, InvalidInput
from .scalar import exact
from .sets import (Ball, ConvexPolytope, GridSandwich, GridSet, IntervalUnion, PointSet, _lcm)

INNER, OUTER = "inner", "outer"


def halfspaces(K: ConvexPolytope):
    """Inequalities ``n . x <= c`` describing a full-dimensional polytope."""
    if K.is_degenerate:
        raise InvalidInput("half-space form needs a full-dimensional polytope")
    if K.dimension == 1:
        return [((Fraction(-1),), -K.vertices[0][0]), ((Fraction(1),), K.vertices[-1][0])]
    if K.dimension == 2:
        out = []
        for a, b in K.edges():
            n = (b[1] - a[1], a[0] - b[0])
            out.append((n, n[0] * a[0] + n[1] * a[1]))
        return out
    return [(f.normal, f.offset) for f in K.facets]


def _integer_rows(hs, h):
    """Rescale ``n . (h z) <= c`` to integer rows ``N . z <= C``."""
    rows = []
    for n, c in hs:
        vals = [exact(x) for x in n] + [exact(c) / h]
        m = 1
        for v in vals:
            m = _lcm(m, v.denominator)
        ints = [int(v * m) for v in vals]
        g = math.gcd(*ints) or 1
        rows.append([v // g for v in ints])
    return rows


def _lattice_test(rows, lo, hi, strict: bool) -> np.ndarray:
    """Boolean array over integer points ``lo <= z < hi`` satisfying all rows."""
    shape = tuple(int(b - a) for a, b in zip(lo, hi))
    axes = [np.arange(a, b, dtype=np.int64) for a, b in zip(lo, hi)]
    ok = np.ones(shape, dtype=bool)
    zmax = max(max(abs(int(a)), abs(int(b))) for a, b in zip(lo, hi)) + 1
    for row in rows:
        *N, C = row
        big = max(abs(x) for x in N) * zmax * len(N) + abs(C) >= 2**62
        acc = 0
        for ax, coef in enumerate(N):
            shp = [1] * len(N)
            shp[ax] = shape[ax]
            v = axes[ax].astype(object) * coef if big else axes[ax] * np.int64(coef)
            acc = acc + v.reshape(shp)
        ok &= (acc < C) if strict else (acc <= C)
    return ok


def _poly_box(points, h):
    pts = [[exact(c) / h for c in p] for p in points]
    d = len(pts[0])
    lo = [math.floor(min(p[i] for p in pts)) - 1 for i in range(d)]
    hi = [math.ceil(max(p[i] for p in pts)) + 2 for i in range(d)]
    return lo, hi


def _minkowski_cell(K: ConvexPolytope, h) -> ConvexPolytope:
    """K ⊕ [-h, 0]^d."""
    corners = list(itertools.product(*[(0, -h)] * K.dimension))
    return ConvexPolytope.from_points(
        [tuple(exact(v[i]) + c[i] for i in range(K.dimension)) for v in K.vertices for c in corners])


def _raster_polytope(K: ConvexPolytope, h, mode) -> np.ndarray:
    if not K.is_exact:
        K = ConvexPolytope.from_points([tuple(exact(c) for c in v) for v in K.vertices])
    lo, hi = _poly_box(K.vertices, h)
    if mode == OUTER:
        # open cell (hz, hz+h) meets K  <=>  hz in the interior of K ⊕ [-h,0]^d;
        # lower-dimensional K also keeps cells touching it through faces
        M = _minkowski_cell(K, h)
        ok = _lattice_test(_integer_rows(halfspaces(M), h), lo, hi, strict=not K.is_degenerate)
        return ok, lo
    if K.is_degenerate:
        raise EmptyInner("a lower-dimensional set contains no cell")
    # a cell is inside K iff all of its corners are
    corner_ok = _lattice_test(_integer_rows(halfspaces(K), h), lo, hi, strict=False)
    cell = corner_ok[tuple(slice(0, -1) for _ in lo)].copy()
    d = K.dimension
    for shift in itertools.product((0, 1), repeat=d):
        cell &= corner_ok[tuple(slice(s, s + n - 1) for s, n in zip(shift, corner_ok.shape))]
    return cell, lo


def _raster_intervals(K: IntervalUnion, h, mode):
    cells = []
    for a, b in K.intervals:
        a, b = a / h, b / h
        if mode == OUTER:
            if a == b:
                z = math.floor(a)
                cells.extend([z - 1, z] if a == z else [z])
            else:
                cells.extend(range(math.floor(a), math.ceil(b)))
        else:
            cells.extend(range(math.ceil(a), math.floor(b)))
    return cells


def _raster_points(K: PointSet, h, mode):
    if mode == INNER:
        raise EmptyInner("a finite set contains no cell")
    q = Fraction(K.denom) * h  # point/h = numer / q
    num, den = q.denominator, q.numerator  # numer * num / den
    scaled = K.numer.astype(object) * num
    fl = np.array([[x // den for x in row] for row in scaled], dtype=np.int64)
    on = np.array([[x % den == 0 for x in row] for row in scaled], dtype=bool)
    out = set()
    d = K.dimension
    for z, o in zip(fl, on):
        choices = [((int(z[i]) - 1, int(z[i])) if o[i] else (int(z[i]),)) for i in range(d)]
        out.update(itertools.product(*choices))
    return out


def _raster_ball(B: Ball, h, mode):
    c = [exact(x) / h for x in B.center]
    r = exact(B.radius) / h
    m = 1
    for v in c + [r]:
        m = _lcm(m, v.denominator)
    C = [int(v * m) for v in c]
    R2 = int(r * m) ** 2
    d = len(c)
    lo = [math.floor(v - r) - 1 for v in c]
    hi = [math.ceil(v + r) + 2 for v in c]
    axes = [np.arange(a, b, dtype=np.int64).astype(object) * m for a, b in zip(lo, hi)]
    # per-axis squared gap (distance) and far-corner distance for cell [z, z+1]
    near, far = [], []
    for ax in range(d):
        zlo, zhi = axes[ax], axes[ax] + m
        gap = np.maximum(np.maximum(zlo - C[ax], C[ax] - zhi), 0)
        fr = np.maximum(np.abs(zlo - C[ax]), np.abs(zhi - C[ax]))
        shp = [1] * d
        shp[ax] = len(zlo)
        near.append((gap * gap).reshape(shp))
        far.append((fr * fr).reshape(shp))
    tot = sum(near) if mode == OUTER else sum(far)
    ok = (tot < R2) if mode == OUTER else (tot <= R2)
    ok = np.asarray(ok, dtype=bool)
    if mode == OUTER and r == 0:
        raise InvalidInput("ball radius must be positive")
    return ok, lo


def rasterize(K, h, mode: str = OUTER) -> GridSet:
    """Cells inside K (``inner``) or meeting K (``outer``); inner ⊆ K ⊆ outer.

    Outer keeps cells whose interior meets K, plus cells touching the parts of
    K that no open cell reaches (isolated points, lower-dimensional pieces).
    """
    mode = mode.lower()
    if mode not in (INNER, OUTER):
        raise InvalidInput(f"unknown rasterization mode {mode!r}")
    h = exact(h)
    if h <= 0:
        raise InvalidInput("cell size must be positive")
    if isinstance(K, GridSet):
        k = K.h / h
        if k.denominator == 1:
            return K.refine(int(k))
        raise InvalidInput("grid sets only rasterize onto refinements of their lattice")
    if isinstance(K, IntervalUnion):
        cells = _raster_intervals(K, h, mode)
        if not cells:
            raise EmptyInner("no cell fits inside the set; refine h")
        return GridSet.from_cells([(z,) for z in cells], h)
    if isinstance(K, PointSet):
        return GridSet.from_cells(sorted(_raster_points(K, h, mode)), h)
    if isinstance(K, ConvexPolytope):
        if K.dimension == 1:
            return rasterize(IntervalUnion.from_pairs([(K.vertices[0][0], K.vertices[-1][0])]), h, mode)
        ok, lo = _raster_polytope(K, h, mode)
    elif isinstance(K, Ball):
        ok, lo = _raster_ball(K, h, mode)
    else:
        raise InvalidInput(f"cannot rasterize {type(K).__name__}")
    if not ok.any():
        raise EmptyInner("no cell fits inside the set; refine h")
    return GridSet.from_mask(ok, lo, h)


def sandwich(K, h) -> GridSandwich:
    """Inner/outer pair; the inner side is None when no cell fits."""
    try:
        inner = rasterize(K, h, INNER)
    except EmptyInner:
        inner = None
    return GridSandwich(inner, rasterize(K, h, OUTER))
