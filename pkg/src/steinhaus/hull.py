"""Convex hulls in dimensions 1-3 on exact (int/Fraction) or float coordinates.

Predicates are exact for rational input; float input uses ``FLOAT_TOL``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .scalar import FLOAT_TOL

Point = tuple


def _sign(x) -> int:
    if isinstance(x, float):
        if abs(x) <= FLOAT_TOL:
            return 0
    return (x > 0) - (x < 0)


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def cross3(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def orient3(a, b, c, p):
    return dot(cross3(sub(b, a), sub(c, a)), sub(p, a))


def affine_rank(points: Sequence[Point]) -> int:
    """Affine dimension of a point cloud via fraction-exact elimination."""
    if not points:
        return -1
    p0 = points[0]
    rows = [list(sub(p, p0)) for p in points[1:]]
    rank = 0
    ncols = len(p0)
    for col in range(ncols):
        pivot = None
        for i in range(rank, len(rows)):
            if _sign(rows[i][col]) != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][col]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col]
            if _sign(f) != 0:
                if isinstance(f, float) or isinstance(pv, float):
                    ratio = f / pv
                else:
                    ratio = Fraction(f) / pv
                rows[i] = [x - ratio * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def hull_1d(points):
    lo = min(points, key=lambda p: p[0])
    hi = max(points, key=lambda p: p[0])
    return [lo] if lo == hi else [lo, hi]


def hull_2d(points):
    """Andrew's monotone chain; returns strictly convex vertices in CCW order."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _sign(cross2(lower[-2], lower[-1], p)) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _sign(cross2(upper[-2], upper[-1], p)) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class Facet:
    normal: tuple
    offset: object  # normal . x <= offset inside
    vertices: tuple  # CCW seen from outside


def _plane_key(n, off):
    comps = list(n) + [off]
    lead = next(c for c in comps if _sign(c) != 0)
    if isinstance(lead, float):
        scale = max(abs(c) for c in comps)
        return tuple(round(c / scale, 7) for c in comps)
    return tuple(Fraction(c) / abs(Fraction(lead)) for c in comps)


def _initial_simplex(pts):
    a = pts[0]
    b = next((p for p in pts if p != a), None)
    if b is None:
        return None
    ab = sub(b, a)
    c = next((p for p in pts if any(_sign(x) for x in cross3(ab, sub(p, a)))), None)
    if c is None:
        return None
    d = next((p for p in pts if _sign(orient3(a, b, c, p)) != 0), None)
    if d is None:
        return None
    return a, b, c, d


def hull_3d(points):
    """Incremental hull of full-dimensional 3D points.

    Returns ``(vertices, facets)`` with facets merged over coplanar triangles.
    """
    pts = list(dict.fromkeys(points))
    simplex = _initial_simplex(pts)
    if simplex is None:
        raise ValueError("points are not full-dimensional")
    a, b, c, d = simplex
    if _sign(orient3(a, b, c, d)) > 0:
        b, c = c, b
    # faces oriented so that orient3(face, p) > 0 means p is outside
    faces = {(a, b, c), (a, d, b), (b, d, c), (c, d, a)}
    for p in pts:
        if p in (a, b, c, d):
            continue
        visible = [f for f in faces if _sign(orient3(*f, p)) > 0]
        if not visible:
            continue
        edges = {}
        for f in visible:
            for e in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                edges[e] = edges.get(e, 0) + 1
        horizon = [e for e in edges if (e[1], e[0]) not in edges]
        faces.difference_update(visible)
        for u, v in horizon:
            faces.add((u, v, p))
    groups: dict = {}
    for f in faces:
        n = cross3(sub(f[1], f[0]), sub(f[2], f[0]))
        off = dot(n, f[0])
        groups.setdefault(_plane_key(n, off), []).append((f, n, off))
    facets = []
    extreme = set()
    for tris in groups.values():
        f0, n, off = tris[0]
        fpts = list(dict.fromkeys(v for t in tris for v in t[0]))
        # project to the two coordinates that keep the facet non-degenerate
        axis = max(range(3), key=lambda i: abs(n[i]))
        keep = [i for i in range(3) if i != axis]
        proj = {tuple(v[i] for i in keep): v for v in fpts}
        ring = [proj[q] for q in hull_2d(list(proj))]
        # orient CCW as seen from outside
        if len(ring) >= 3 and _sign(dot(cross3(sub(ring[1], ring[0]), sub(ring[2], ring[0])), n)) < 0:
            ring.reverse()
        extreme.update(ring)
        facets.append(Facet(tuple(n), off, tuple(ring)))
    verts = sorted(extreme)
    return verts, facets


def convex_hull_vertices(points):
    """Vertex set and affine dimension of the hull of ``points`` (d <= 3)."""
    pts = list(dict.fromkeys(tuple(p) for p in points))
    if not pts:
        raise ValueError("empty point set")
    d = len(pts[0])
    k = affine_rank(pts)
    if k == 0:
        return [pts[0]], 0, []
    if d == 1 or k == 1:
        base = pts[0]
        direction = next(sub(p, base) for p in pts if p != base)
        key = lambda p: dot(sub(p, base), direction)
        return sorted({min(pts, key=key), max(pts, key=key)}), 1, []
    if d == 2:
        return hull_2d(pts), 2, []
    if k == 2:
        a, b = pts[0], None
        normal = None
        for p in pts[1:]:
            if b is None and p != a:
                b = p
                continue
            if b is not None:
                n = cross3(sub(b, a), sub(p, a))
                if any(_sign(x) for x in n):
                    normal = n
                    break
        axis = max(range(3), key=lambda i: abs(normal[i]))
        keep = [i for i in range(3) if i != axis]
        proj = {tuple(p[i] for i in keep): p for p in pts}
        return [proj[q] for q in hull_2d(list(proj))], 2, []
    verts, facets = hull_3d(pts)
    return verts, 3, facets
