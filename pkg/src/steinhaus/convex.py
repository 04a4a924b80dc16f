"""Hulls, quasi-support profiles, star subsets, Caratheodory decompositions
and the origin-centred ball radius."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (BudgetExceeded, EmptySet, InvalidInput, NotSymmetric, PointOutsideHull,
                     QThresholdNotMet)
from .hull import cross2, dot, sub
from .metrics import diameter
from .raster import halfspaces
from .scalar import ceil_log2, exact, sqrt
from .sets import (Ball, ConvexPolytope, GridSandwich, GridSet, IntervalUnion, PointSet,
                   canonicalize)


def convex_hull(P) -> ConvexPolytope:
    """Vertex-minimal exact hull; lower-dimensional hulls keep their affine_dim."""
    from .minkowski import hull_of
    if isinstance(P, (list, tuple)):
        return ConvexPolytope.from_points(P)
    return hull_of(P)


# --------------------------------------------------------------------------
# symmetry and the origin ball


def is_symmetric(K) -> bool:
    if isinstance(K, (IntervalUnion, PointSet)):
        return K == -K
    if isinstance(K, GridSet):
        off = tuple(-o - s for o, s in zip(K.offset, K.mask.shape))
        return off == K.offset and np.array_equal(K.mask, K.mask[tuple(slice(None, None, -1)
                                                                    for _ in K.offset)])
    if isinstance(K, GridSandwich):
        return (K.inner is None or is_symmetric(K.inner)) and is_symmetric(K.outer)
    if isinstance(K, ConvexPolytope):
        return set(K.vertices) == {tuple(-c for c in v) for v in K.vertices}
    if isinstance(K, Ball):
        return all(c == 0 for c in K.center)
    raise InvalidInput(f"unsupported set {type(K).__name__}")


def _require_symmetric(K):
    if not is_symmetric(K):
        raise NotSymmetric("operation needs a symmetric set K = -K")


def _grid_origin_radius_sq(U: GridSet):
    """Exact squared distance from 0 to the closure of the complement of U."""
    lo = [o - 1 for o in U.offset]
    shape = [s + 2 for s in U.mask.shape]
    m = U.window(lo, shape)
    idx = np.indices(shape).reshape(len(shape), -1).T + np.array(lo)
    free = ~m.reshape(-1)
    z = idx[free]
    # distance from the origin to the closed box [z, z+1] in units of h
    gap = np.maximum(np.maximum(z, -(z + 1)), 0)
    return int((gap * gap).sum(axis=1).min()) * U.h**2


def origin_ball_radius(K):
    """Largest rho with the closed ball B(0, rho) inside K (radius convention).

    Grids return the certified pair (rho_inner, rho_outer); for an exact grid
    both entries coincide.
    """
    _require_symmetric(K)
    if isinstance(K, IntervalUnion):
        for a, b in K.intervals:
            if a <= 0 <= b:
                return b
        return Fraction(0)
    if isinstance(K, PointSet):
        return Fraction(0)
    if isinstance(K, GridSet):
        rho = sqrt(_grid_origin_radius_sq(K))
        return rho, rho
    if isinstance(K, GridSandwich):
        hi = sqrt(_grid_origin_radius_sq(K.outer))
        lo = sqrt(_grid_origin_radius_sq(K.inner)) if K.inner is not None else Fraction(0)
        return lo, hi
    if isinstance(K, ConvexPolytope):
        return sqrt(_polytope_origin_radius_sq(K))
    if isinstance(K, Ball):
        return K.radius
    raise InvalidInput(f"unsupported set {type(K).__name__}")


def _polytope_origin_radius_sq(K: ConvexPolytope):
    if K.is_degenerate:
        return Fraction(0)
    best = None
    for n, c in halfspaces(K):
        if c <= 0:
            return Fraction(0)
        nn = sum(x * x for x in n)
        v = Fraction(c) ** 2 / nn if not isinstance(nn, float) else c * c / nn
        best = v if best is None else min(best, v)
    return best


# --------------------------------------------------------------------------
# directions


def direction_plan(d: int, n: Optional[int] = None) -> np.ndarray:
    """Unit directions: d=2 uniform angles on [0, pi) (each stands for ±theta),
    d=3 a Fibonacci sphere."""
    if d == 1:
        return np.array([[1.0]])
    if d == 2:
        n = n or 720
        a = np.pi * np.arange(n) / n
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    n = n or 2048
    i = np.arange(n) + 0.5
    phi = np.arccos(1 - 2 * i / n)
    th = np.pi * (1 + 5**0.5) * i
    return np.stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)], axis=1)


# --------------------------------------------------------------------------
# quasi-support


@dataclass
class QuasiSupportProfile:
    """r(theta), D(theta) in the diameter convention: [0, r/2] ⊆ P_theta ⊆ [0, D/2]."""

    directions: np.ndarray
    r_of_theta: list
    D_of_theta: list

    @property
    def r(self):
        return min(self.r_of_theta)

    @property
    def D(self):
        return max(self.D_of_theta)

    def to_rows(self):
        for th, r, D in zip(self.directions, self.r_of_theta, self.D_of_theta):
            yield [*(float(x) for x in th), r, D]


def _interval_profile(K: IntervalUnion, sign: int):
    # P_theta = {t >= 0 : sign * t in K}
    pieces = []
    for a, b in K.intervals:
        a, b = (a, b) if sign > 0 else (-b, -a)
        if b >= 0:
            pieces.append((max(a, Fraction(0)), b))
    pieces.sort()
    half_r = Fraction(0)
    if pieces and pieces[0][0] == 0:
        half_r = pieces[0][1]
    half_D = pieces[-1][1] if pieces else Fraction(0)
    return 2 * half_r, 2 * half_D


def _polytope_radial(K: ConvexPolytope, theta) -> float:
    """max{t >= 0 : t theta in K} for a symmetric polytope."""
    if K.affine_dim == 0:
        return 0.0
    if K.affine_dim == 1:
        v = np.array([float(c) for c in K.vertices[-1]])
        nv = float(np.linalg.norm(v))
        cos = float(np.dot(v, theta)) / nv
        return nv if abs(abs(cos) - 1) < 1e-12 else 0.0
    if K.is_degenerate:
        # planar polygon in R^3: only in-plane directions see a segment
        lo, hi = 0.0, float(diameter(K))
        pts = [tuple(float(c) for c in v) for v in K.vertices]
        Kf = ConvexPolytope.from_points(pts)
        from .metrics import _polytope_dist_sq
        for _ in range(60):
            mid = (lo + hi) / 2
            if _polytope_dist_sq(tuple(mid * t for t in theta), Kf) <= 1e-20:
                lo = mid
            else:
                hi = mid
        return lo
    best = math.inf
    for n, c in halfspaces(K):
        s = sum(float(a) * b for a, b in zip(n, theta))
        if s > 0:
            best = min(best, float(c) / s)
    return max(best, 0.0)


def _grid_ray(U: GridSet, theta, step_frac: float = 0.25):
    """(first gap, last hit) of the ray t*theta through closed cells, sampled at h/4."""
    h = float(U.h)
    lo = np.array(U.offset)
    shape = np.array(U.mask.shape)
    reach = float(np.abs(np.concatenate([lo, lo + shape])).max()) * math.sqrt(U.dimension) + 1
    t = np.arange(0.0, reach + step_frac, step_frac)
    pts = t[:, None] * np.asarray(theta)[None, :]
    member = np.zeros(len(t), dtype=bool)
    # closed cells: a point on a cell face belongs to every adjacent cell
    for shift in itertools.product((0.0, -1e-9), repeat=U.dimension):
        idx = np.floor(pts + np.array(shift)).astype(np.int64) - lo
        ok = np.all((idx >= 0) & (idx < shape), axis=1)
        hit = np.zeros(len(t), dtype=bool)
        hit[ok] = U.mask[tuple(idx[ok].T)]
        member |= hit
    if not member[0]:
        return 0.0, 0.0
    gaps = np.flatnonzero(~member)
    first_gap = t[gaps[0] - 1] if len(gaps) else t[-1]
    hits = np.flatnonzero(member)
    return first_gap * h, t[hits[-1]] * h


def quasi_support(K, directions=None) -> QuasiSupportProfile:
    """Per-direction inner/outer segment diameters of a symmetric K."""
    _require_symmetric(K)
    d = K.dimension
    if d == 1 and isinstance(K, IntervalUnion):
        r, D = _interval_profile(K, 1)
        return QuasiSupportProfile(np.array([[1.0]]), [r], [D])
    dirs = direction_plan(d, directions) if directions is None or isinstance(directions, int) \
        else np.asarray(directions, dtype=float)
    rs, Ds = [], []
    if isinstance(K, GridSandwich):
        K = K.inner if K.inner is not None else K.outer
    for th in dirs:
        if isinstance(K, ConvexPolytope):
            t = _polytope_radial(K, th)
            rs.append(2 * t)
            Ds.append(2 * t)
        elif isinstance(K, GridSet):
            a, b = _grid_ray(K, th)
            rs.append(2 * a)
            Ds.append(2 * b)
        elif isinstance(K, PointSet):
            pf = K.as_floats()
            nrm = np.linalg.norm(pf, axis=1)
            along = np.abs(pf @ th - nrm) < 1e-12
            rs.append(0.0)
            Ds.append(2 * float(nrm[along].max()) if along.any() else 0.0)
        elif isinstance(K, Ball):
            rs.append(2 * float(K.radius))
            Ds.append(2 * float(K.radius))
        else:
            raise InvalidInput(f"unsupported set {type(K).__name__}")
    return QuasiSupportProfile(dirs, rs, Ds)


# --------------------------------------------------------------------------
# star subset


def _grid_star_mask(U: GridSet, chunk: int = 4096) -> np.ndarray:
    """Cells whose centre segment to the origin stays inside U (exact).

    Between consecutive lattice-plane crossings the segment runs through the
    open interior of one cell, so testing the midpoint of every piece decides
    the whole segment; crossing points lie in the closure of both neighbours.
    """
    idx = U.cell_indices()
    lo = np.array(U.offset)
    shape = np.array(U.mask.shape)
    c2 = 2 * idx + 1  # doubled centres (odd integers)
    keep = np.ones(len(idx), dtype=bool)
    kmax = int(np.abs(c2).max()) // 2 + 1
    ks = np.arange(1, kmax + 1)
    for s in range(0, len(idx), chunk):
        cc = c2[s:s + chunk].astype(np.float64)
        params = []
        for ax in range(U.dimension):
            a = np.abs(cc[:, ax])[:, None]
            # crossings of planes x_ax = ±k: t = 2k / |c2|
            t = 2 * ks[None, :] / a
            t[t >= 1] = 1.0
            params.append(t)
        t = np.sort(np.concatenate([np.zeros((len(cc), 1))] + params + [np.ones((len(cc), 1))],
                                   axis=1), axis=1)
        mids = (t[:, :-1] + t[:, 1:]) / 2
        valid = (t[:, 1:] - t[:, :-1]) > 1e-12
        pts = mids[:, :, None] * (cc[:, None, :] / 2)
        cell = np.floor(pts).astype(np.int64) - lo
        inside = np.all((cell >= 0) & (cell < shape), axis=2)
        mem = np.zeros(inside.shape, dtype=bool)
        mem[inside] = U.mask[tuple(cell[inside].T)]
        keep[s:s + chunk] = np.all(mem | ~valid, axis=1)
    out = np.zeros_like(U.mask)
    sel = idx[keep] - lo
    out[tuple(sel.T)] = True
    return out


def star_subset(K, directions=None):
    """Inner approximation of Star(K), the largest origin-star-shaped subset."""
    _require_symmetric(K)
    if isinstance(K, IntervalUnion):
        r, _ = _interval_profile(K, 1)
        return canonicalize([(-r / 2, r / 2)])
    if isinstance(K, ConvexPolytope):
        return K
    if isinstance(K, GridSandwich):
        if K.inner is None:
            raise EmptySet("sandwich has no certified inner cells")
        K = K.inner
    if isinstance(K, GridSet):
        m = _grid_star_mask(K)
        if not m.any():
            raise EmptySet("no cell centre sees the origin inside the set")
        return GridSet.from_mask(m, K.offset, K.h)
    if isinstance(K, PointSet):
        if not K.contains(tuple(0 for _ in range(K.dimension))):
            raise EmptySet("origin not in the set")
        return PointSet.from_points([tuple(0 for _ in range(K.dimension))])
    raise InvalidInput(f"unsupported set {type(K).__name__}")


# --------------------------------------------------------------------------
# Caratheodory


@dataclass
class CaratheodoryDecomposition:
    points: list
    weights: list

    def recombine(self):
        d = len(self.points[0])
        return tuple(sum(t * p[i] for t, p in zip(self.weights, self.points)) for i in range(d))


def _solve(A, b):
    """Exact Gaussian elimination; None when singular."""
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _barycentric(y, simplex):
    """Weights of y in the simplex (affine span assumed to contain y) or None."""
    k = len(simplex) - 1
    base = simplex[0]
    vecs = [sub(p, base) for p in simplex[1:]]
    rhs = sub(y, base)
    # normal equations on the spanned subspace keep this exact for any k <= d
    G = [[dot(u, v) for v in vecs] for u in vecs]
    g = [dot(u, rhs) for u in vecs]
    lam = _solve(G, g) if k else []
    if lam is None:
        return None
    recon = tuple(b + sum(l * v[i] for l, v in zip(lam, vecs)) for i, b in enumerate(base))
    if recon != tuple(y):
        return None
    w = [1 - sum(lam)] + lam
    return w if all(x >= 0 for x in w) else None


def _simplices(K: ConvexPolytope):
    v = list(K.vertices)
    if K.affine_dim == 0:
        return [[v[0]]]
    if K.affine_dim == 1:
        return [[v[0], v[-1]]]
    if K.dimension == 2 or K.affine_dim == 2:
        if K.dimension == 3:
            # planar polygon in space: order along its plane via the facet ring
            ring = _planar_ring(v)
        else:
            ring = v
        return [[ring[0], ring[i], ring[i + 1]] for i in range(1, len(ring) - 1)]
    apex = v[0]
    out = []
    for f in K.facets:
        if apex in f.vertices:
            continue
        r = f.vertices
        out.extend([apex, r[0], r[i], r[i + 1]] for i in range(1, len(r) - 1))
    return out


def _planar_ring(v):
    a = v[0]
    n = None
    for b, c in itertools.combinations(v[1:], 2):
        u, w = sub(b, a), sub(c, a)
        n = (u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0])
        if any(n):
            break
    ax = max(range(3), key=lambda i: abs(n[i]))
    keep = [i for i in range(3) if i != ax]
    from .hull import hull_2d
    proj = {tuple(p[i] for i in keep): p for p in v}
    return [proj[q] for q in hull_2d(list(proj))]


def caratheodory_decompose(y, K1) -> CaratheodoryDecomposition:
    """y as a convex combination of at most d+1 points of K1, largest weight first."""
    y = tuple(exact(c) for c in (y if isinstance(y, (tuple, list)) else (y,)))
    K = convex_hull(K1) if not isinstance(K1, ConvexPolytope) else K1
    if not K.is_exact:
        raise InvalidInput("Caratheodory decomposition runs in exact arithmetic")
    if len(y) != K.dimension:
        raise InvalidInput("dimension mismatch")
    for simplex in _simplices(K):
        w = _barycentric(y, simplex)
        if w is not None:
            pairs = sorted(((t, p) for t, p in zip(w, simplex) if t > 0), key=lambda tp: -tp[0])
            return CaratheodoryDecomposition([p for _, p in pairs], [t for t, _ in pairs])
    raise PointOutsideHull(f"{y} is not in the convex hull")


@dataclass
class DyadicRounding:
    q: list
    alphas: list
    point: tuple
    distance: object
    distance_bound: object
    n: int


def dyadic_round(dec: CaratheodoryDecomposition, n: int, D=None) -> DyadicRounding:
    """Round the weights to multiples of 1/2^{n-1}; the point lies in K_n.

    The integers alpha_i = q_i 2^{n-1} sum to 2^{n-1}, so sum q_i x_i is one of
    the weighted combinations that make up K_n.
    """
    d = len(dec.points[0])
    need = ceil_log2(d * (d + 1))
    if n < need:
        raise QThresholdNotMet(f"n={n} is below ceil(log2(d(d+1)))={need}")
    m = 2 ** (n - 1)
    rest = [Fraction(round(t * m), m) for t in dec.weights[1:]]
    q = [1 - sum(rest)] + rest
    if q[0] < 0:
        raise QThresholdNotMet("rounded leading weight went negative")
    pts = dec.points
    point = tuple(sum(qi * p[i] for qi, p in zip(q, pts)) for i in range(d))
    y = dec.recombine()
    dist = sqrt(sum((a - b) ** 2 for a, b in zip(point, y)))
    if D is None:
        D = diameter(PointSet.from_points(pts)) if len(pts) > 1 else Fraction(0)
    return DyadicRounding(q, [int(x * m) for x in q], point, dist, D * d / Fraction(2**n), n)


def weighted_combination_set(K1: PointSet, n: int, cap: int = 10**6) -> PointSet:
    """{ sum alpha_i x_i / 2^{n-1} : alpha_i >= 0 integers, sum alpha_i = 2^{n-1} }.

    Enumerated directly over multisets, independent of the sumset code.
    """
    if n < 1:
        raise InvalidInput("n must be at least 1")
    m = 2 ** (n - 1)
    k = len(K1)
    if math.comb(k + m - 1, m) > cap:
        raise BudgetExceeded(f"{math.comb(k + m - 1, m)} multisets exceed the cap {cap}")
    pts = K1.numer
    combos = np.array(list(itertools.combinations_with_replacement(range(k), m)), dtype=np.int64)
    sums = pts[combos].sum(axis=1)
    return PointSet.from_numer(np.unique(sums, axis=0), K1.denom * m)
