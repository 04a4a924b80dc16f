"""Measures, diameters, point-to-set distances and Hausdorff distances."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, Delaunay, QhullError, cKDTree

from .errors import DimensionMismatch, InvalidInput
from .hull import cross2, dot, sub
from .scalar import exact, sqrt
from .sets import (Ball, ConvexPolytope, GridSandwich, GridSet, IntervalUnion, PointSet,
                   _lcm, rescale)


class Measured(NamedTuple):
    value: object
    error: object = 0


# --------------------------------------------------------------------------
# conversions


def to_interval_union(K) -> IntervalUnion:
    """Exact 1D view of any 1D representation."""
    if isinstance(K, IntervalUnion):
        return K
    if isinstance(K, PointSet):
        a = K.numer[:, 0]
        return IntervalUnion.from_arrays(a, a, K.denom)
    if isinstance(K, GridSet):
        z = K.cell_indices()[:, 0]
        h = K.h
        return IntervalUnion.from_arrays(z * h.numerator, (z + 1) * h.numerator, h.denominator)
    if isinstance(K, ConvexPolytope):
        from .sets import canonicalize
        return canonicalize([(K.vertices[0][0], K.vertices[-1][0])])
    raise InvalidInput(f"no 1D interval view of {type(K).__name__}")


# --------------------------------------------------------------------------
# volume


def volume(K):
    """Lebesgue measure; a sandwich gives ``(vol inner, vol outer)``."""
    if isinstance(K, IntervalUnion):
        return Fraction(int((K.hi - K.lo).sum()), K.denom)
    if isinstance(K, GridSet):
        return K.count * K.h ** K.dimension
    if isinstance(K, GridSandwich):
        inner = volume(K.inner) if K.inner is not None else Fraction(0)
        return inner, volume(K.outer)
    if isinstance(K, PointSet):
        return Fraction(0)
    if isinstance(K, ConvexPolytope):
        return _polytope_volume(K)
    if isinstance(K, Ball):
        r = K.radius
        return {1: 2 * r, 2: math.pi * r * r, 3: 4 * math.pi * r**3 / 3}[K.dimension]
    raise InvalidInput(f"unsupported set {type(K).__name__}")


def _polytope_volume(K: ConvexPolytope):
    if K.affine_dim < K.dimension:
        return Fraction(0) if K.is_exact else 0.0
    v = K.vertices
    if K.dimension == 1:
        return v[-1][0] - v[0][0]
    if K.dimension == 2:
        twice = sum(v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1]
                    for i in range(len(v)))
        return twice / 2 if K.is_exact else float(twice) / 2
    total = 0
    for f in K.facets:
        r = f.vertices
        for i in range(1, len(r) - 1):
            a, b, c = r[0], r[i], r[i + 1]
            total += (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                      + a[2] * (b[0] * c[1] - b[1] * c[0]))
    return Fraction(total) / 6 if K.is_exact else float(total) / 6


def perimeter(K: ConvexPolytope) -> float:
    if K.dimension != 2:
        raise InvalidInput("perimeter is defined for planar polygons")
    if K.affine_dim == 1:
        return 2 * math.dist(K.vertices[0], K.vertices[1])
    if K.affine_dim == 0:
        return 0.0
    return sum(math.dist(a, b) for a, b in K.edges())


# --------------------------------------------------------------------------
# diameter


def _max_pair_sq(pts: np.ndarray) -> int:
    """Exact max squared pairwise distance of integer points."""
    if len(pts) > 64 and pts.shape[1] > 1:
        try:
            pts = pts[ConvexHull(pts.astype(float)).vertices]
        except QhullError:
            pass
    best = 0
    obj = pts.astype(object)
    for i in range(0, len(obj), 512):
        blk = obj[i:i + 512]
        diff = blk[:, None, :] - obj[None, :, :]
        best = max(best, int((diff * diff).sum(axis=2).max()))
    return best


def diameter_sq(K):
    """Squared diameter, exact for exact representations."""
    if isinstance(K, IntervalUnion):
        return (K.max - K.min) ** 2
    if isinstance(K, PointSet):
        return Fraction(_max_pair_sq(K.numer), K.denom**2)
    if isinstance(K, GridSet):
        return _max_pair_sq(K.boundary_corner_points()) * K.h**2
    if isinstance(K, GridSandwich):
        return diameter_sq(K.outer)
    if isinstance(K, ConvexPolytope):
        v = K.vertices
        return max((dot(sub(a, b), sub(a, b)) for a in v for b in v), default=0)
    if isinstance(K, Ball):
        return (2 * K.radius) ** 2
    raise InvalidInput(f"unsupported set {type(K).__name__}")


def diameter(K):
    return sqrt(diameter_sq(K))


# --------------------------------------------------------------------------
# point-to-set distance


def _seg_dist_sq(p, a, b):
    ab = sub(b, a)
    ap = sub(p, a)
    den = dot(ab, ab)
    if den == 0:
        return dot(ap, ap)
    t = dot(ap, ab)
    t = t / den if isinstance(t, float) or isinstance(den, float) else Fraction(t) / den
    t = min(max(t, 0), 1)
    q = tuple(x + t * y for x, y in zip(a, ab))
    w = sub(p, q)
    return dot(w, w)


def _polytope_dist_sq(p, K: ConvexPolytope):
    v = K.vertices
    if K.affine_dim == 0:
        w = sub(p, v[0])
        return dot(w, w)
    if K.affine_dim == 1:
        return _seg_dist_sq(p, v[0], v[-1])
    if K.dimension == 2:
        if K.contains(p):
            return 0
        return min(_seg_dist_sq(p, a, b) for a, b in K.edges())
    if K.affine_dim == 2:
        # planar polygon in R^3: distance to the plane projection, or to the boundary
        a, b, c = v[0], v[1], v[2]
        n = _cross(sub(b, a), sub(c, a))
        ring = list(v)
        ap = sub(p, a)
        nn = dot(n, n)
        t = Fraction(dot(ap, n)) / nn if not isinstance(nn, float) else dot(ap, n) / nn
        q = tuple(x - t * y for x, y in zip(p, n))
        inside = all(dot(_cross(sub(ring[(i + 1) % len(ring)], ring[i]), sub(q, ring[i])), n) >= 0
                     for i in range(len(ring)))
        if not inside:
            inside = all(dot(_cross(sub(ring[(i + 1) % len(ring)], ring[i]), sub(q, ring[i])), n) <= 0
                         for i in range(len(ring)))
        if inside:
            w = sub(p, q)
            return dot(w, w)
        return min(_seg_dist_sq(p, ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring)))
    if K.contains(p):
        return 0
    best = None
    for f in K.facets:
        sub_poly = ConvexPolytope(f.vertices, 3, 2)
        d = _polytope_dist_sq(p, sub_poly)
        best = d if best is None else min(best, d)
    return best


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _grid_dist_sq(p, G: GridSet):
    """Exact squared distance from a rational point to a closed cell union."""
    u = [exact(c) / G.h for c in p]
    q = math.lcm(*(x.denominator for x in u))
    num = np.array([int(x * q) for x in u], dtype=np.int64)
    idx = G.cell_indices()
    lo = idx * q
    gap = np.maximum(np.maximum(lo - num, num - (lo + q)), 0)
    best = int((gap.astype(object) ** 2).sum(axis=1).min())
    return Fraction(best, q * q) * G.h**2


def distance_sq_to_set(x, K):
    x = tuple(x) if isinstance(x, (tuple, list)) else (x,)
    if len(x) != K.dimension:
        raise DimensionMismatch("point and set dimensions differ")
    if isinstance(K, IntervalUnion):
        p = exact(x[0])
        best = None
        for a, b in K.intervals:
            d = a - p if p < a else (p - b if p > b else Fraction(0))
            best = d if best is None else min(best, d)
        return best * best
    if isinstance(K, PointSet):
        p = [exact(c) for c in x]
        q = math.lcm(K.denom, *(c.denominator for c in p))
        num = np.array([int(c * q) for c in p], dtype=object)
        diff = K.numer.astype(object) * (q // K.denom) - num
        return Fraction(int((diff * diff).sum(axis=1).min()), q * q)
    if isinstance(K, ConvexPolytope):
        if not K.is_exact:
            x = tuple(float(c) for c in x)
        else:
            x = tuple(exact(c) for c in x)
        return _polytope_dist_sq(x, K)
    if isinstance(K, GridSet):
        return _grid_dist_sq(x, K)
    if isinstance(K, GridSandwich):
        return _grid_dist_sq(x, K.outer)
    if isinstance(K, Ball):
        d = max(math.dist([float(c) for c in x], [float(c) for c in K.center]) - float(K.radius), 0.0)
        return d * d
    raise InvalidInput(f"unsupported set {type(K).__name__}")


def distance_to_set(x, K):
    """``inf_{a in K} |x - a|``; exact where the representation is exact.

    For a sandwich this is the distance to the outer side (a lower bound).
    """
    return sqrt(distance_sq_to_set(x, K))


# --------------------------------------------------------------------------
# Hausdorff distance


def _directed_interval_sq(A: IntervalUnion, B: IntervalUnion) -> Fraction:
    """(sup over b in B of d_A(b))^2, exact.

    d_A restricted to an interval of B is piecewise linear with maxima at the
    endpoints of B or at midpoints of gaps of A, so those candidates suffice.
    """
    den = math.lcm(A.denom, B.denom)
    k = 2  # doubled coordinates keep gap midpoints integral
    obj = max(den // A.denom, den // B.denom) * k * max(
        int(np.abs(A.lo).max()), int(np.abs(A.hi).max()),
        int(np.abs(B.lo).max()), int(np.abs(B.hi).max()), 1) >= 2**30
    def cast(x, f):
        return x.astype(object) * f if obj else x * f
    alo, ahi = cast(A.lo, k * (den // A.denom)), cast(A.hi, k * (den // A.denom))
    blo, bhi = cast(B.lo, k * (den // B.denom)), cast(B.hi, k * (den // B.denom))
    cands = [blo, bhi]
    if len(alo) > 1:
        mids = (ahi[:-1] + alo[1:]) // 2
        j = np.searchsorted(blo.astype(float) if obj else blo, mids.astype(float) if obj else mids,
                            side="right") - 1
        ok = (j >= 0)
        ok[ok] = mids[ok] <= bhi[j[ok]]
        cands.append(mids[ok])
    x = np.concatenate(cands)
    xs = x.astype(float) if obj else x
    i = np.searchsorted(alo.astype(float) if obj else alo, xs, side="right") - 1
    # distance to the interval at or left of x, and to the next one on the right
    left = np.where(i >= 0, np.maximum(x - ahi[np.clip(i, 0, None)], 0), None if obj else 2**62)
    nxt = np.clip(i + 1, 0, len(alo) - 1)
    right = np.where(i + 1 < len(alo), alo[nxt] - x, None if obj else 2**62)
    if obj:
        best = max(min(v for v in (l, r) if v is not None) for l, r in zip(left, right))
    else:
        best = int(np.minimum(left, right).max())
    return Fraction(int(best), den * k) ** 2


def hausdorff_sq_1d(A, B) -> Fraction:
    A, B = to_interval_union(A), to_interval_union(B)
    return max(_directed_interval_sq(A, B), _directed_interval_sq(B, A))


def _common_points(A: PointSet, B: PointSet):
    den = _lcm(A.denom, B.denom)
    return rescale(A.numer, A.denom, den), rescale(B.numer, B.denom, den), den


def _directed_points_sq(a: np.ndarray, b: np.ndarray) -> int:
    """sup_{p in a} min_{q in b} |p - q|^2 for integer arrays, exact."""
    if len(a) * len(b) <= 4_000_000:
        best = 0
        bo = b.astype(object) if np.abs(b).max(initial=0) > 2**30 else b
        for i in range(0, len(a), 2048):
            blk = a[i:i + 2048]
            blk = blk.astype(object) if bo.dtype == object else blk
            diff = blk[:, None, :] - bo[None, :, :]
            best = max(best, int((diff * diff).sum(axis=2).min(axis=1).max()))
        return best
    tree = cKDTree(b.astype(float))
    dist, _ = tree.query(a.astype(float), k=1)
    order = np.argsort(-dist)
    best = -1
    bo = b.astype(object)
    for i in order:
        if best >= 0 and dist[i] ** 2 < best * (1 - 1e-9) - 1e-6:
            break
        diff = bo - a[i].astype(object)
        best = max(best, int((diff * diff).sum(axis=1).min()))
    return best


def hausdorff_points_sq(A: PointSet, B: PointSet) -> Fraction:
    a, b, den = _common_points(A, B)
    return Fraction(max(_directed_points_sq(a, b), _directed_points_sq(b, a)), den * den)


# --- point set versus convex polygon ------------------------------------


def _lattice_basis(vecs: np.ndarray):
    """Gauss-reduced basis of the planar lattice generated by integer vectors."""
    # Hermite form by repeated extended gcd: rows (a, b), (0, c)
    a = b = c = 0
    for x, y in vecs.tolist():
        if x == 0 and y == 0:
            continue
        if x != 0 or a != 0:
            g, s_, t_ = _egcd(a, x)
            # new first row combines (a, b) and (x, y); the leftover has x = 0
            nb = s_ * b + t_ * y
            ya = (a // g) * y - (x // g) * b if g else y
            a, b = g, nb
            c = math.gcd(c, ya)
        else:
            c = math.gcd(c, y)
    if a == 0 or c == 0:
        return None
    u, v = np.array([a, b], dtype=object), np.array([0, c], dtype=object)
    while True:
        if u.dot(u) > v.dot(v):
            u, v = v, u
        m = round(Fraction(int(u.dot(v)), int(u.dot(u))))
        if m == 0:
            break
        v = v - m * u
        if v.dot(v) >= u.dot(u):
            break
    if u.dot(v) < 0:
        v = -v
    return np.array([[int(u[0]), int(u[1])], [int(v[0]), int(v[1])]], dtype=np.int64)


def _egcd(a: int, b: int):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    x0, x1, y0, y1 = 1, 0, 0, 1
    aa, bb = a, b
    while bb:
        q = aa // bb
        aa, bb = bb, aa - q * bb
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if aa < 0:
        aa, x0, y0 = -aa, -x0, -y0
    return aa, x0, y0


def _regular_points(pts: np.ndarray):
    """Prune points that cannot lie on a large empty circle.

    Let Lambda be a lattice and mu its covering radius.  An empty disc of
    radius above mu touching p would contain a point of the coset p + Lambda
    within 2mu of p.  So if every such coset point is present, p only lies on
    empty circles of radius <= mu.  Each well filled coset is eroded on its
    own; points elsewhere are never pruned, they only make discs less empty.

    Returns ``(regular_mask, deep_candidates, mu_sq)`` in the units of
    ``pts`` or None when nothing can be pruned.  The candidates are
    homogeneous circumcentres of complete lattice triangles.
    """
    n = len(pts)
    rng = np.random.default_rng(0)
    tried, best = set(), None
    # Small samples tend to land in a single coset and give the lattice the
    # bulk lives on; stray points near the boundary only refine it.
    for size in (8, 8, 8, 16, 64):
        pick = rng.choice(n, size=min(n, size), replace=False)
        B = _lattice_basis(pts[pick] - pts[pick[0]])
        if B is None or tuple(B.ravel()) in tried:
            continue
        tried.add(tuple(B.ravel()))
        got = _coset_erosion(pts, B)
        if got is not None and (best is None or got[0].sum() > best[0].sum()):
            best = got
    if best is None or not best[0].any():
        return None
    return best


def _coset_erosion(pts: np.ndarray, B: np.ndarray):
    n = len(pts)
    sdet = int(B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0])
    det = abs(sdet)
    adj = np.array([[B[1, 1], -B[1, 0]], [-B[0, 1], B[0, 0]]], dtype=np.int64)
    # rel = i*b1 + j*b2  ->  rel @ adj.T = sdet * (i, j); the residue names the coset
    coef = (pts - pts[0]) @ adj.T
    res = coef % det
    key = res[:, 0] * det + res[:, 1]
    ukeys, inv, counts = np.unique(key, return_inverse=True, return_counts=True)
    u, v = B[0].astype(object), B[1].astype(object)
    w = v - u
    uu, vv, ww = u.dot(u), v.dot(v), w.dot(w)
    mu_sq = Fraction(int(uu * vv * ww), 4 * sdet * sdet)
    lim = 4 * mu_sq
    side = min(math.sqrt(uu), math.sqrt(vv)) * det / math.sqrt(uu * vv)
    span = int(math.ceil(2 * math.sqrt(float(mu_sq)) / side)) + 1
    st = np.zeros((2 * span + 1,) * 2, dtype=bool)
    for i in range(-span, span + 1):
        for j in range(-span, span + 1):
            x = i * u + j * v
            st[i + span, j + span] = x.dot(x) <= lim
    regular = np.zeros(n, dtype=bool)
    deep = np.zeros((0, 3), dtype=object)
    for c in np.flatnonzero(counts >= max(64, n // 50)):
        idx = np.flatnonzero(inv == c)
        cc = (coef[idx] - res[idx[0]]) // sdet
        cmin = cc.min(axis=0)
        cc -= cmin
        shape = cc.max(axis=0) + 1
        if int(np.prod(shape)) > 8_000_000 or len(idx) < 0.02 * int(np.prod(shape)):
            continue
        bm = np.zeros(tuple(shape), dtype=bool)
        bm[cc[:, 0], cc[:, 1]] = True
        er = ndimage.binary_erosion(np.pad(bm, span), structure=st)[span:-span, span:-span]
        regular[idx] = er[cc[:, 0], cc[:, 1]]
        if len(deep):
            continue
        full = bm[:-1, :-1] & bm[1:, :-1] & bm[:-1, 1:]
        corner = np.argwhere(full)[:64]
        if len(corner):
            p0 = ((corner - cc[0]).astype(object) @ B.astype(object)
                  + pts[idx[0]].astype(object))
            a, bq, cq = p0, p0 + u, p0 + v
            D = 2 * (a[:, 0] * (bq[:, 1] - cq[:, 1]) + bq[:, 0] * (cq[:, 1] - a[:, 1])
                     + cq[:, 0] * (a[:, 1] - bq[:, 1]))
            a2, b2, c2 = (x[:, 0] ** 2 + x[:, 1] ** 2 for x in (a, bq, cq))
            X = a2 * (bq[:, 1] - cq[:, 1]) + b2 * (cq[:, 1] - a[:, 1]) + c2 * (a[:, 1] - bq[:, 1])
            Y = a2 * (cq[:, 0] - bq[:, 0]) + b2 * (a[:, 0] - cq[:, 0]) + c2 * (bq[:, 0] - a[:, 0])
            deep = np.stack([X, Y, D], axis=1)
    return regular, deep, mu_sq


def _obj(a):
    return np.asarray(a).astype(object)


def _bits(a) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return max(int(abs(int(x))).bit_length() for x in (a.max(), a.min()))


def sup_dist_polygon_to_points_sq(P: PointSet, Q: ConvexPolytope, prune: bool = True) -> Fraction:
    """Exact ``(sup_{y in Q} d_P(y))^2`` for planar P and exact polygon Q.

    Candidates are the vertices of the Voronoi partition of P clipped to Q
    (circumcentres and bisector/edge crossings) plus the vertices of Q.
    Candidate numerators are built in int64 when a bit bound shows they stay
    below 2**53 (so the float ranking is correctly rounded), otherwise as
    Python ints.  Floats only rank; the top ones are re-evaluated exactly,
    including the membership test in Q.

    Dense lattice sets are pruned first: a point whose radius-2 lattice
    neighbourhood is complete cannot lie on an empty circle of radius
    above g/sqrt(2), so it never generates a candidate beating that value.
    When the answer falls below it we recompute without pruning.
    """
    pts = P.numer
    n = len(pts)
    # scale so that P is integral and Q has common denominator qd
    qs = [tuple(exact(c) * P.denom for c in v) for v in Q.vertices]
    qd = math.lcm(*(c.denominator for v in qs for c in v))
    U = np.array([[int(c * qd) for c in v] for v in qs], dtype=object)
    nq = len(U)
    bp, bu, bq = _bits(pts), _bits(U), qd.bit_length()
    small = 3 * bp + 4 < 53 and 2 * bu + bp + bq + 8 < 53 and bq + bp + bu + 6 < 53
    dt = np.int64 if small else object

    def arr(x):
        return np.asarray(x).astype(dt)

    Ud = arr(U)
    parts = [(Ud[:, 0], Ud[:, 1], np.full(nq, qd, dtype=dt))]

    subset = np.arange(n)
    tree = None
    info = _regular_points(pts) if prune and n >= 2000 else None
    if info is not None:
        regular, deep, mu_sq = info
        subset = np.flatnonzero(~regular)
        # a complete lattice triangle whose circumcentre lies in Q realises d = mu
        if len(deep):
            d = arr(deep)
            parts.append((d[:, 0], d[:, 1], d[:, 2]))
    sp = pts[subset]
    m = len(sp)
    # each part is (X, Y, W, g) with g a float bound on d_P at that candidate
    Uf = U.astype(float)
    scale = 1.0 + float(np.abs(Uf).max()) / qd
    slack = 1e-9 * scale
    parts = [(*pt, np.full(len(pt[0]), np.inf)) for pt in parts]

    def edge_cross(fx, fy):
        """Float edge tests ``(b - a) x (y - a)`` for each edge of Q."""
        for i in range(nq):
            a, b = Uf[i] / qd, Uf[(i + 1) % nq] / qd
            yield (b[0] - a[0]) * (fy - a[1]) - (b[1] - a[1]) * (fx - a[0])

    def own_dist(X, Y, W, g):
        fw = W.astype(float)
        return np.hypot(X.astype(float) / fw - g[:, 0], Y.astype(float) / fw - g[:, 1])

    if m >= 2:
        tris = edges = None
        delaunay = False
        collinear = m < 3 or np.linalg.matrix_rank((sp - sp[0]).astype(float)) < 2
        if m <= 40:
            import itertools
            if m >= 3:
                tris = np.array(list(itertools.combinations(range(m), 3)), dtype=np.int64)
            edges = np.array(list(itertools.combinations(range(m), 2)), dtype=np.int64)
        elif collinear:
            d = sp - sp[0]
            key = d[:, 0] if np.any(d[:, 0]) else d[:, 1]
            order = np.argsort(key)
            edges = np.stack([order[:-1], order[1:]], axis=1)
        else:
            tri = Delaunay(sp.astype(float))
            tris = tri.simplices
            delaunay = True
        so = arr(sp)
        spf = sp.astype(float)
        if tris is not None and len(tris):
            a, b, c = so[tris[:, 0]], so[tris[:, 1]], so[tris[:, 2]]
            D = 2 * (a[:, 0] * (b[:, 1] - c[:, 1]) + b[:, 0] * (c[:, 1] - a[:, 1])
                     + c[:, 0] * (a[:, 1] - b[:, 1]))
            keep = D != 0
            Dk = np.where(keep, D, 1)
            a2 = a[:, 0] ** 2 + a[:, 1] ** 2
            b2 = b[:, 0] ** 2 + b[:, 1] ** 2
            c2 = c[:, 0] ** 2 + c[:, 1] ** 2
            X = a2 * (b[:, 1] - c[:, 1]) + b2 * (c[:, 1] - a[:, 1]) + c2 * (a[:, 1] - b[:, 1])
            Y = a2 * (c[:, 0] - b[:, 0]) + b2 * (a[:, 0] - c[:, 0]) + c2 * (b[:, 0] - a[:, 0])
            if delaunay:
                # A Voronoi edge meets the boundary of Q only if it is a hull ray or
                # one of its end circumcentres is not strictly inside Q.
                fw = Dk.astype(float)
                fx, fy = X.astype(float) / fw, Y.astype(float) / fw
                near = ~keep | np.any(tri.neighbors < 0, axis=1)
                if nq >= 3:
                    clear = np.ones(len(tris), dtype=bool)
                    for cr in edge_cross(fx, fy):
                        clear &= cr > slack * scale
                    near |= ~clear
                else:
                    near[:] = True
                t = tris[near]
                e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
                edges = np.unique(np.sort(e, axis=1), axis=0)
            X, Y, D = X[keep], Y[keep], D[keep]
            parts.append((X, Y, D, own_dist(X, Y, D, spf[tris[keep, 0]])))
        if edges is not None and len(edges) and nq >= 2:
            p, q = so[edges[:, 0]], so[edges[:, 1]]
            pf = spf[edges[:, 0]]
            pq = q - p
            rhs = (q[:, 0] ** 2 + q[:, 1] ** 2) - (p[:, 0] ** 2 + p[:, 1] ** 2)
            segs = [(i, (i + 1) % nq) for i in range(nq)] if nq > 2 else [(0, 1)]
            for i, j in segs:
                u, v = Ud[i], Ud[j]
                uv = v - u
                td = 2 * (pq[:, 0] * uv[0] + pq[:, 1] * uv[1])
                tn = qd * rhs - 2 * (pq[:, 0] * u[0] + pq[:, 1] * u[1])
                neg = td < 0
                td = np.where(neg, -td, td)
                tn = np.where(neg, -tn, tn)
                ok = (td != 0) & (tn >= 0) & (tn <= td)
                td, tn = td[ok], tn[ok]
                cx, cy, cw = u[0] * td + tn * uv[0], u[1] * td + tn * uv[1], qd * td
                parts.append((cx, cy, cw, own_dist(cx, cy, cw, pf[ok])))

    X = np.concatenate([pt[0] for pt in parts])
    Y = np.concatenate([pt[1] for pt in parts])
    W = np.concatenate([pt[2] for pt in parts])
    G = np.concatenate([pt[3] for pt in parts])
    neg = W < 0
    X, Y, W = np.where(neg, -X, X), np.where(neg, -Y, Y), np.where(neg, -W, W)
    fw = W.astype(float)
    fx, fy = X.astype(float) / fw, Y.astype(float) / fw
    # loose float membership; survivors are re-tested exactly below
    inside = np.ones(len(W), dtype=bool)
    if nq >= 3:
        for cr in edge_cross(fx, fy):
            inside &= cr >= -slack * scale
    X, Y, W, G = X[inside], Y[inside], W[inside], G[inside]
    q = np.stack([fx[inside], fy[inside]], axis=1)
    if tree is None:
        tree = cKDTree(pts.astype(float))
    # Query nearest points in order of the bound g and stop once g drops clearly
    # below the best distance seen; the skipped candidates cannot reach the top.
    by_g = np.argsort(-G)
    dist = np.full(len(W), -1.0)
    nn = np.zeros(len(W), dtype=np.int64)
    done, chunk, seen = 0, 1024, -np.inf
    while done < len(by_g) and G[by_g[done]] >= seen - 2 * slack:
        ids = by_g[done:done + chunk]
        dist[ids], nn[ids] = tree.query(q[ids], k=1)
        seen = max(seen, float(dist[ids].max()))
        done += len(ids)
        chunk *= 2
    cutoff = float(G[by_g[done]]) if done < len(by_g) else -np.inf
    po = _obj(pts)
    k = min(16, n)

    def evaluate(ids):
        order = ids[np.argsort(-dist[ids])]
        dsorted = dist[order]
        best_n, best_d = 0, 1  # best = best_n / best_d, kept as exact integers
        pos = 0
        while pos < len(order):
            top = dsorted[pos]
            if best_n and top < math.sqrt(best_n / best_d) - slack:
                break
            # dsorted is descending: the group is everything down to top - slack
            end = pos + int(np.searchsorted(-dsorted[pos:], -(top - slack), side="right"))
            sel = order[pos:end]
            pos = end
            if dt is np.int64 and len(sel) > 1:
                # ties are mostly repeats of one point: reduce the triples, keep one of each
                g = np.gcd(np.gcd(X[sel], Y[sel]), W[sel])
                g[g == 0] = 1
                rx, ry, rw = X[sel] // g, Y[sel] // g, W[sel] // g
                o = np.lexsort((rw, ry, rx))
                first = np.ones(len(o), dtype=bool)
                first[1:] = (np.diff(rx[o]) != 0) | (np.diff(ry[o]) != 0) | (np.diff(rw[o]) != 0)
                sel = sel[o[first]]
            xs, ys, ws = _obj(X[sel]), _obj(Y[sel]), _obj(W[sel])
            ok = np.ones(len(sel), dtype=bool)
            if nq >= 3:
                for i in range(nq):
                    a, b = U[i], U[(i + 1) % nq]
                    cr = ((b[0] - a[0]) * (ys * qd - a[1] * ws)
                          - (b[1] - a[1]) * (xs * qd - a[0] * ws))
                    ok &= cr >= 0
            if not ok.any():
                continue
            sel, xs, ys, ws = sel[ok], xs[ok], ys[ok], ws[ok]
            den = ws ** 2
            # distance to the float nearest neighbour bounds the true value above
            p1 = po[nn[sel]]
            ub = (xs - p1[:, 0] * ws) ** 2 + (ys - p1[:, 1] * ws) ** 2
            exact_done = np.zeros(len(sel), dtype=bool)
            while True:
                live = np.flatnonzero(~exact_done & (ub * best_d > best_n * den))
                if not len(live):
                    break
                if not exact_done.any():
                    # the float winner first; true ties then drop out without more work
                    live = live[[int(np.argmax(ub[live].astype(float) / den[live].astype(float)))]]
                _, idx = tree.query(q[sel[live]], k=k)
                nb = po[np.asarray(idx).reshape(len(live), -1)]
                lx, ly, lw = xs[live][:, None], ys[live][:, None], ws[live][:, None]
                num = np.minimum(((lx - nb[:, :, 0] * lw) ** 2
                                  + (ly - nb[:, :, 1] * lw) ** 2).min(axis=1), ub[live])
                ub[live] = num
                exact_done[live] = True
                for t in range(len(live)):
                    dj = den[live[t]]
                    if num[t] * best_d > best_n * dj:
                        best_n, best_d = int(num[t]), int(dj)
        return best_n, best_d

    best_n, best_d = evaluate(by_g[:done])
    if done < len(by_g) and math.sqrt(best_n / best_d) - 2 * slack <= cutoff:
        rest = by_g[done:]
        dist[rest], nn[rest] = tree.query(q[rest], k=1)
        best_n, best_d = evaluate(by_g)
    best = Fraction(best_n, best_d)
    if info is not None and best < info[2]:
        return sup_dist_polygon_to_points_sq(P, Q, prune=False)
    return best / (P.denom ** 2)


def sup_dist_points_to_polygon_sq(P: PointSet, Q: ConvexPolytope) -> Fraction:
    """Exact ``(sup_{p in P} d_Q(p))^2``."""
    pf = P.as_floats()
    verts = np.array([[float(c) for c in v] for v in Q.vertices])
    if Q.affine_dim == 2:
        # only points not clearly inside need exact treatment
        scale = 1e-9 * (1.0 + float(np.abs(verts).max()) + float(np.abs(pf).max()))
        inside = np.ones(len(pf), dtype=bool)
        for i in range(len(verts)):
            a, b = verts[i], verts[(i + 1) % len(verts)]
            cr = (b[0] - a[0]) * (pf[:, 1] - a[1]) - (b[1] - a[1]) * (pf[:, 0] - a[0])
            inside &= cr > scale * (1.0 + float(np.abs(b - a).max()))
        cand = np.flatnonzero(~inside)
    else:
        cand = np.arange(len(pf))
    best = Fraction(0)
    if len(cand) and Q.affine_dim == 2:
        # exact membership for the borderline points (Q is CCW)
        qd = math.lcm(*(Fraction(c).denominator for v in Q.vertices for c in v), P.denom)
        U = [[int(Fraction(c) * qd) for c in v] for v in Q.vertices]
        X = _obj(P.numer[cand]) * (qd // P.denom)
        ok = np.ones(len(cand), dtype=bool)
        for i in range(len(U)):
            a, b = U[i], U[(i + 1) % len(U)]
            ok &= (b[0] - a[0]) * (X[:, 1] - a[1]) - (b[1] - a[1]) * (X[:, 0] - a[0]) >= 0
        cand = cand[~ok]
    if not len(cand):
        return best
    dmin = _dist_to_polytope_vec(pf[cand], ConvexPolytope.from_points(
        [tuple(float(c) for c in v) for v in Q.vertices]))
    for j in np.argsort(-dmin):
        if dmin[j] ** 2 < float(best) * (1 - 1e-9) - 1e-12:
            break
        p = tuple(Fraction(int(c), P.denom) for c in P.numer[cand[j]])
        best = max(best, _polytope_dist_sq(p, Q))
    return best


def hausdorff_points_polygon_sq(P: PointSet, Q: ConvexPolytope) -> Fraction:
    if not Q.is_exact:
        raise InvalidInput("exact Hausdorff distance needs an exact polygon")
    return max(sup_dist_points_to_polygon_sq(P, Q), sup_dist_polygon_to_points_sq(P, Q))


# --- grids -----------------------------------------------------------------


def _corner_lattice(G: GridSet, lo, shape):
    """Boolean corner-lattice mask of G's cell corners in window [lo, lo+shape)."""
    m = G.window(tuple(x - 1 for x in lo), tuple(s + 1 for s in shape))
    out = np.zeros(tuple(shape), dtype=bool)
    d = G.dimension
    for shift in np.ndindex(*(2,) * d):
        sl = tuple(slice(1 - s, 1 - s + n) for s, n in zip(shift, shape))
        out |= m[sl]
    return out


def _grid_grid(A: GridSet, B: GridSet) -> Measured:
    from .sets import common_resolution
    h = common_resolution(A.h, B.h)
    A, B = A.refine_to(h), B.refine_to(h)
    lo = tuple(min(a, b) for a, b in zip(A.offset, B.offset))
    hi = tuple(max(a + s, b + t) + 1 for a, s, b, t in zip(A.offset, A.mask.shape, B.offset, B.mask.shape))
    shape = tuple(q - p for p, q in zip(lo, hi))
    ca, cb = _corner_lattice(A, lo, shape), _corner_lattice(B, lo, shape)
    da = ndimage.distance_transform_edt(~ca)
    db = ndimage.distance_transform_edt(~cb)
    val = max(float(da[cb].max()), float(db[ca].max())) * float(h)
    return Measured(val, float(h) * math.sqrt(A.dimension))


def _grid_polytope(G: GridSet, Q: ConvexPolytope) -> Measured:
    """Certified bracket; value is the upper end, error the bracket width bound."""
    h = float(G.h)
    d = G.dimension
    corners = G.boundary_corner_points() * h
    # d_Q is convex, so its sup over each closed cell sits at a corner
    qf = ConvexPolytope.from_points([tuple(float(c) for c in v) for v in Q.vertices]) \
        if Q.is_exact else Q
    sup_g = max(math.sqrt(_polytope_dist_sq(tuple(p), qf)) for p in corners) \
        if len(corners) <= 4000 else _max_dist_to_polytope_vec(corners, qf)
    # other direction on the corner lattice of the cells meeting Q
    verts = np.array([[float(c) for c in v] for v in Q.vertices])
    lo = np.floor(verts.min(axis=0) / h).astype(int) - 1
    hi = np.ceil(verts.max(axis=0) / h).astype(int) + 2
    lo = np.minimum(lo, np.array(G.offset))
    hi = np.maximum(hi, np.array(G.offset) + np.array(G.mask.shape) + 1)
    shape = tuple(int(x) for x in hi - lo)
    cg = _corner_lattice(G, tuple(int(x) for x in lo), shape)
    dist = ndimage.distance_transform_edt(~cg) * h
    grid_pts = np.stack(np.meshgrid(*[np.arange(s) for s in shape], indexing="ij"), -1).reshape(-1, d)
    grid_pts = (grid_pts + lo) * h
    near = _dist_to_polytope_vec(grid_pts, qf) <= h * math.sqrt(d) / 2 + 1e-12
    sup_q = float(dist.reshape(-1)[near].max()) + h * math.sqrt(d) / 2
    return Measured(max(sup_g, sup_q), h * math.sqrt(d))


def _dist_to_polytope_vec(pts: np.ndarray, Q: ConvexPolytope) -> np.ndarray:
    v = np.array([[float(c) for c in x] for x in Q.vertices])
    d = pts.shape[1]
    if Q.affine_dim == 0:
        return np.sqrt(((pts - v[0]) ** 2).sum(1))
    if d == 1 or Q.affine_dim == 1:
        a, b = v[0], v[-1]
        ab = b - a
        t = np.clip(((pts - a) @ ab) / (ab @ ab), 0, 1)
        return np.sqrt(((pts - (a + t[:, None] * ab)) ** 2).sum(1))
    if d == 2 and Q.affine_dim == 2:
        inside = np.ones(len(pts), dtype=bool)
        best = np.full(len(pts), np.inf)
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            ab = b - a
            inside &= (ab[0] * (pts[:, 1] - a[1]) - ab[1] * (pts[:, 0] - a[0])) >= -1e-12
            t = np.clip(((pts - a) @ ab) / (ab @ ab), 0, 1)
            best = np.minimum(best, ((pts - (a + t[:, None] * ab)) ** 2).sum(1))
        return np.where(inside, 0.0, np.sqrt(best))
    return np.array([math.sqrt(float(_polytope_dist_sq(tuple(p), Q))) for p in pts])


def _max_dist_to_polytope_vec(pts, Q):
    return float(_dist_to_polytope_vec(np.asarray(pts, dtype=float), Q).max())


def hausdorff_with_error(A, B) -> Measured:
    """Hausdorff distance plus an additive error bound (0 when exact)."""
    if A.dimension != B.dimension:
        raise DimensionMismatch("Hausdorff distance needs equal dimensions")
    if isinstance(A, GridSandwich) or isinstance(B, GridSandwich):
        raise InvalidInput("use the process trace bracket for sandwiches")
    if A.dimension == 1 and not isinstance(A, Ball) and not isinstance(B, Ball):
        return Measured(sqrt(hausdorff_sq_1d(A, B)), 0)
    if isinstance(B, PointSet) and not isinstance(A, PointSet):
        A, B = B, A
    if isinstance(B, GridSet) and not isinstance(A, GridSet):
        A, B = B, A
    if isinstance(A, PointSet) and isinstance(B, PointSet):
        return Measured(sqrt(hausdorff_points_sq(A, B)), 0)
    if isinstance(A, PointSet) and isinstance(B, ConvexPolytope):
        if A.dimension == 2:
            return Measured(sqrt(hausdorff_points_polygon_sq(A, B)), 0)
        return _sampled_points_polytope(A, B)
    if isinstance(A, ConvexPolytope) and isinstance(B, ConvexPolytope):
        ab = max(_polytope_dist_sq(v, B) for v in A.vertices)
        ba = max(_polytope_dist_sq(v, A) for v in B.vertices)
        return Measured(sqrt(max(ab, ba)), 0)
    if isinstance(A, GridSet) and isinstance(B, GridSet):
        return _grid_grid(A, B)
    if isinstance(A, GridSet) and isinstance(B, ConvexPolytope):
        return _grid_polytope(A, B)
    if isinstance(A, GridSet) and isinstance(B, PointSet):
        return _grid_points(A, B)
    raise InvalidInput(f"no Hausdorff route for {type(A).__name__} / {type(B).__name__}")


def _grid_points(G: GridSet, P: PointSet) -> Measured:
    """Bracket for grid versus finite set via corner sampling of the grid."""
    h = float(G.h)
    d = G.dimension
    pf = P.as_floats()
    corners = G.corner_points() * h
    tree = cKDTree(pf)
    dist, _ = tree.query(corners, k=1)
    sup_g = float(dist.max()) + h * math.sqrt(d) / 2
    sup_p = max(math.sqrt(float(_grid_dist_sq(p, G))) for p in P.points)
    return Measured(max(sup_g, sup_p), h * math.sqrt(d) / 2)


def _sampled_points_polytope(P: PointSet, Q: ConvexPolytope) -> Measured:
    """3D finite set versus polytope: Lipschitz-certified sampling bracket."""
    pf = P.as_floats()
    sup_p = math.sqrt(float(sup_dist_points_to_polygon_sq(P, Q))) if Q.dimension == 2 else \
        max(math.sqrt(float(_polytope_dist_sq(p, Q))) for p in P.points)
    verts = np.array([[float(c) for c in v] for v in Q.vertices])
    lo, hi = verts.min(0), verts.max(0)
    step = float(max(hi - lo)) / 48 or 1.0
    axes = [np.arange(a, b + step, step) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, len(lo))
    near = _dist_to_polytope_vec(grid, Q) <= step * math.sqrt(3) / 2
    dist, _ = cKDTree(pf).query(grid[near], k=1)
    err = step * math.sqrt(3) / 2
    return Measured(max(sup_p, float(dist.max()) + err), err)


def hausdorff_distance(A, B):
    """Hausdorff distance (conservative upper value when grids are involved)."""
    return hausdorff_with_error(A, B).value
