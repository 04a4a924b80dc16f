"""Radius lower bounds, the 1D process constants, half-hull thresholds,
Steiner checks and planar shape functionals."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import ndimage

from .convex import (_polytope_radial, convex_hull, direction_plan, origin_ball_radius,
                     quasi_support, star_subset)
from .errors import InvalidInput, NullMeasure
from .hull import cross2, dot, sub
from .metrics import _dist_to_polytope_vec, diameter, diameter_sq, perimeter, volume
from .minkowski import grid_difference_mask, iterate_process, mstar_upper_sq, steinhaus_map
from .raster import INNER, halfspaces, rasterize
from .scalar import ceil_log2, exact, sqrt
from .sets import ConvexPolytope, GridSandwich, GridSet, IntervalUnion, PointSet, canonicalize


# --------------------------------------------------------------------------
# Steinhaus radius bounds


def steinhaus_radius_bruteforce(U) -> tuple:
    """[rho_inner, rho_outer] for the largest closed ball about 0 inside U - U.

    U - U is computed exactly on the h-lattice, so for an exact grid the two
    ends coincide.
    """
    if isinstance(U, GridSandwich):
        lo = steinhaus_radius_bruteforce(U.inner)[0] if U.inner is not None else Fraction(0)
        return lo, steinhaus_radius_bruteforce(U.outer)[1]
    if not isinstance(U, GridSet):
        raise InvalidInput("brute-force radius runs on grid sets")
    mask, offset = grid_difference_mask(U)
    diff = GridSet.from_mask(mask, offset, U.h)
    return origin_ball_radius(diff)


@dataclass
class BoundReport:
    """Certified lower bound on the Steinhaus radius (radius convention)."""

    bound_value: float
    truth_bracket: tuple
    slack: float
    convention: str = "radius"
    mstar_upper: object = None
    best_subset: str = "U"
    candidates: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "bound_value": float(self.bound_value),
            "truth_bracket": [float(x) for x in self.truth_bracket],
            "slack": float(self.slack),
            "convention": self.convention,
            "mstar_upper": float(self.mstar_upper) if self.mstar_upper is not None else None,
            "best_subset": self.best_subset,
            "candidates": {k: float(v) for k, v in self.candidates.items()},
        }


def _ratio_bound(S: GridSet):
    """|S| / sqrt(upper_sq): exact when the root is rational, else rounded down."""
    _, upper_sq = mstar_upper_sq(S)
    vol = volume(S)
    val = sqrt(vol * vol / upper_sq)
    if not isinstance(val, Fraction):
        # a few ulps below the float quotient keeps it a lower bound
        val = float(vol) / math.sqrt(float(upper_sq)) * (1 - 1e-15)
    return val, sqrt(upper_sq)


def theorem1_bound(U: GridSet, truth: bool = True) -> BoundReport:
    """|U| / M*(U) with the certified upper value of M*."""
    if volume(U) <= 0:
        raise NullMeasure("bound needs |U| > 0")
    val, up = _ratio_bound(U)
    tb = steinhaus_radius_bruteforce(U) if truth else (float("nan"), float("nan"))
    slack = float(tb[0]) / float(val) if truth and val else float("nan")
    return BoundReport(val, tb, slack, mstar_upper=up, candidates={"U": val})


def erosions(U: GridSet, k_max: int = 8):
    """Erosions of U by discrete balls of radius k cells, k = 1..k_max (while nonempty)."""
    m = np.pad(U.mask, k_max + 1)
    off = tuple(o - k_max - 1 for o in U.offset)
    for k in range(1, k_max + 1):
        g = np.indices((2 * k + 1,) * U.dimension) - k
        ball = (g**2).sum(axis=0) <= k * k
        e = ndimage.binary_erosion(m, structure=ball)
        if not e.any():
            return
        yield f"erosion{k}", GridSet.from_mask(e, off, U.h)


def _max_rectangle_2d(m: np.ndarray):
    """Largest all-true axis rectangle (area, (r0, c0, r1, c1)) by the histogram method."""
    rows, cols = m.shape
    heights = np.zeros(cols, dtype=np.int64)
    best = (0, None)
    for r in range(rows):
        heights = np.where(m[r], heights + 1, 0)
        stack = []
        for c in range(cols + 1):
            hgt = heights[c] if c < cols else 0
            start = c
            while stack and stack[-1][1] >= hgt:
                s, sh = stack.pop()
                area = sh * (c - s)
                if area > best[0]:
                    best = (int(area), (r - sh + 1, s, r + 1, c))
                start = s
            stack.append((start, hgt))
    return best


def maximal_box(U: GridSet) -> Optional[GridSet]:
    """A largest inscribed axis box of U (cells)."""
    m = U.mask
    if m.ndim == 1:
        runs = np.diff(np.concatenate([[0], m.astype(np.int8), [0]]))
        s, e = np.flatnonzero(runs == 1), np.flatnonzero(runs == -1)
        i = int(np.argmax(e - s))
        box = np.zeros_like(m)
        box[s[i]:e[i]] = True
    elif m.ndim == 2:
        _, (r0, c0, r1, c1) = _max_rectangle_2d(m)
        box = np.zeros_like(m)
        box[r0:r1, c0:c1] = True
    else:
        best, arg = 0, None
        for z0 in range(m.shape[0]):
            acc = np.ones(m.shape[1:], dtype=bool)
            for z1 in range(z0, m.shape[0]):
                acc &= m[z1]
                if not acc.any():
                    break
                a, rect = _max_rectangle_2d(acc)
                if a * (z1 - z0 + 1) > best:
                    best, arg = a * (z1 - z0 + 1), (z0, z1 + 1, rect)
        z0, z1, (r0, c0, r1, c1) = arg
        box = np.zeros_like(m)
        box[z0:z1, r0:r1, c0:c1] = True
    return GridSet.from_mask(box, U.offset, U.h)


def theorem2_bound(U: GridSet, family: Optional[Callable] = None, k_max: int = 8,
                   truth: bool = True) -> BoundReport:
    """sup over a generated subset family of |S| / M*(S).

    The default family is U, its disk erosions and a maximal inscribed box;
    any subset S of U gives a valid lower bound, so the result is one too.
    """
    if volume(U) <= 0:
        raise NullMeasure("bound needs |U| > 0")
    if family is None:
        members = [("U", U), *erosions(U, k_max), ("box", maximal_box(U))]
    else:
        members = list(family(U))
    cands = {}
    best = ("U", None, None)
    for name, S in members:
        if not S.issubset(U):
            raise InvalidInput(f"family member {name} is not a subset of U")
        val, up = _ratio_bound(S)
        cands[name] = val
        if best[1] is None or val > best[1]:
            best = (name, val, up)
    tb = steinhaus_radius_bruteforce(U) if truth else (float("nan"), float("nan"))
    slack = float(tb[0]) / float(best[1]) if truth else float("nan")
    return BoundReport(best[1], tb, slack, mstar_upper=best[2], best_subset=best[0],
                       candidates=cands)


# --------------------------------------------------------------------------
# 1D process


@dataclass
class OneDConstants:
    """r is the diameter of the largest symmetric interval [-r/2, r/2] in K1."""

    r: object
    D: object
    eps: object
    n0: int
    t0: object
    l0: int
    degenerate: bool = False

    @property
    def N_threshold(self) -> int:
        return self.l0 * self.n0

    @property
    def guarantee(self) -> str:
        if self.degenerate:
            return "K_n = [-D/2, D/2] for all n >= 1"
        return (f"[-D/2+eps, D/2-eps] ⊆ K_n ⊆ [-D/2, D/2] for all n > {self.N_threshold}")


def one_d_constants(r, D, eps) -> OneDConstants:
    r, D, eps = exact(r), exact(D), exact(eps)
    if r <= 0 or D <= 0:
        raise InvalidInput("r and D must be positive")
    if r >= D:
        return OneDConstants(r, D, eps, 0, Fraction(0), 0, degenerate=True)
    if not 0 < eps < D / 2:
        raise InvalidInput("need 0 < eps < D/2")
    n0 = ceil_log2(D / r)
    t0 = 1 - Fraction(1, 2**n0)
    # smallest l with (1/t0)^l >= D/(2 eps), i.e. ceil(log2(D/2eps) / |log2 t0|)
    target = D / (2 * eps)
    l0, p = 0, Fraction(1)
    while p < target:
        p /= t0
        l0 += 1
    return OneDConstants(r, D, eps, n0, t0, l0)


@dataclass
class OneDVerdict:
    constants: OneDConstants
    n_checked: int
    n_star: Optional[int]
    holds_past_threshold: bool
    l1_distance: object
    l1_ok: bool
    per_n: list

    @property
    def ok(self) -> bool:
        return self.holds_past_threshold and self.l1_ok


def verify_one_d_containment(K0: IntervalUnion, eps, n_extra: int = 1) -> OneDVerdict:
    """Run the exact interval process to threshold + n_extra and check both containments.

    Once [-D/2+eps, D/2-eps] ⊆ K_n, nesting K_n ⊆ K_{n+1} ⊆ Conv(K1) keeps it
    for every later n, so the check at finitely many n certifies "onward".
    """
    if not isinstance(K0, IntervalUnion):
        raise InvalidInput("1D verification runs on interval unions")
    if volume(K0) == 0:
        raise NullMeasure("the 1D theorem needs a seed of positive measure")
    eps = exact(eps)
    K = steinhaus_map(K0)
    prof = quasi_support(K)
    r, D = prof.r, K.max - K.min
    c = one_d_constants(r, D, eps) if r < D else one_d_constants(D, D, eps)
    n_last = max(c.N_threshold + n_extra, 1)
    target = (-D / 2 + eps, D / 2 - eps)
    per_n, n_star = [], None
    for n in range(1, n_last + 1):
        if n > 1:
            K = steinhaus_map(K)
        inner = K.contains_interval(*target)
        outer = K.min >= -D / 2 and K.max <= D / 2
        per_n.append((n, inner, outer, volume(K)))
        if inner and outer:
            n_star = n if n_star is None else n_star
        else:
            n_star = None
    l1 = D - volume(K)
    return OneDVerdict(c, n_last, n_star, n_star is not None and n_star <= n_last,
                       l1, l1 <= 2 * eps, per_n)


def k1_family(r, D, delta) -> IntervalUnion:
    """[-D/2, -D/2+delta] ∪ [-r/2, r/2] ∪ [D/2-delta, D/2]."""
    r, D, delta = exact(r), exact(D), exact(delta)
    if not (0 <= delta <= r < D and r > 0):
        raise InvalidInput("need 0 <= delta <= r < D and r > 0")
    return canonicalize([(-D / 2, -D / 2 + delta), (-r / 2, r / 2), (D / 2 - delta, D / 2)])


# --------------------------------------------------------------------------
# higher-dimensional threshold


def half_hull_threshold(D, d: int, r) -> int:
    """Smallest n >= max(log2(2Dd/r), log2(d(d+1))); r in the diameter convention."""
    if d < 2:
        raise InvalidInput("use one_d_constants in dimension 1")
    if r <= 0:
        raise InvalidInput("r must be positive")
    a = ceil_log2(2 * D * d / r)
    return max(a, ceil_log2(d * (d + 1)))


@dataclass
class HalfHullVerdict:
    n: int
    r: object
    D: object
    contained: bool
    missing_cells: int
    h: object


def half_hull_check(K0: GridSet, budget: Optional[int] = None) -> HalfHullVerdict:
    """Check that inner(K_{n+1}) contains the inner rasterization of Conv(K1)/2."""
    K1 = steinhaus_map(K0, budget)
    rho_inner = origin_ball_radius(K1)[0]
    r = 2 * rho_inner
    if r == 0:
        raise NullMeasure("K1 contains no ball about the origin")
    D = diameter(K1)
    n = half_hull_threshold(D, K0.dimension, r)
    trace = iterate_process(K0, n + 1, budget=budget, metrics=False)
    Kn1 = trace[n + 1].snapshot
    inner = Kn1.inner if isinstance(Kn1, GridSandwich) else Kn1
    target = rasterize(trace.hull.scale(Fraction(1, 2)), inner.h, INNER)
    missing = int(np.count_nonzero(target.mask & ~inner.window(target.offset, target.mask.shape)))
    return HalfHullVerdict(n, r, D, missing == 0, missing, inner.h)


# --------------------------------------------------------------------------
# Steiner


@dataclass
class Steiner2D:
    predicted_area: float
    predicted_perimeter: float
    measured_area: float
    measured_bracket: tuple
    error_bound: float
    relative_error: float
    offset_area: float
    offset_perimeter: float


def offset_polygon(B: ConvexPolytope, r: float):
    """Exact-piecewise area and perimeter of B ⊕ rB^2: polygon + edge strips + corner sectors."""
    A = float(volume(B))
    edges = [(tuple(map(float, a)), tuple(map(float, b))) for a, b in B.edges()]
    strips = sum(math.dist(a, b) * r for a, b in edges)
    angles = 0.0
    for (a, b), (_, c) in zip(edges, edges[1:] + edges[:1]):
        u = (b[0] - a[0], b[1] - a[1])
        v = (c[0] - b[0], c[1] - b[1])
        angles += math.atan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1])
    area = A + strips + 0.5 * angles * r * r
    per = sum(math.dist(a, b) for a, b in edges) + angles * r
    return area, per


def steiner_2d_check(B: ConvexPolytope, r, h) -> Steiner2D:
    """Compare the Steiner area against a grid measurement and the offset polygon."""
    if B.dimension != 2 or B.is_degenerate:
        raise InvalidInput("Steiner 2D check needs a convex polygon")
    r, hf = float(r), float(h)
    A, P = float(volume(B)), perimeter(B)
    pred = A + P * r + math.pi * r * r
    Bf = ConvexPolytope.from_points([tuple(float(c) for c in v) for v in B.vertices])
    verts = np.array([[float(c) for c in v] for v in B.vertices])
    lo = np.floor((verts.min(0) - r) / hf).astype(int) - 2
    hi = np.ceil((verts.max(0) + r) / hf).astype(int) + 2
    xs = np.arange(lo[0], hi[0] + 1) * hf
    ys = np.arange(lo[1], hi[1] + 1) * hf
    pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), -1).reshape(-1, 2)
    dcorner = _dist_to_polytope_vec(pts, Bf).reshape(len(xs), len(ys))
    # B_r convex: a cell is inside iff its four corners are
    inside = dcorner <= r
    inner = inside[:-1, :-1] & inside[1:, :-1] & inside[:-1, 1:] & inside[1:, 1:]
    # a cell meets B_r iff its lower corner is within r of B ⊕ [-h,0]^2
    M = ConvexPolytope.from_points([(x - dx, y - dy) for x, y in Bf.vertices
                                    for dx in (0.0, hf) for dy in (0.0, hf)])
    outer = (_dist_to_polytope_vec(pts, M) <= r).reshape(len(xs), len(ys))[:-1, :-1]
    a_in = float(inner.sum()) * hf * hf
    a_out = float(outer.sum()) * hf * hf
    meas = (a_in + a_out) / 2
    oa, op = offset_polygon(B, r)
    return Steiner2D(pred, P + 2 * math.pi * r, meas, (a_in, a_out), (a_out - a_in) / 2,
                     abs(meas - pred) / pred, oa, op)


@dataclass
class Steiner3D:
    predicted_volume: float
    predicted_area: float
    measured_volume: Optional[float] = None
    measured_bracket: Optional[tuple] = None


def steiner_3d_closed_forms(shape: str, dims, r, h=None) -> Steiner3D:
    """Box (a, b, c): V + A r + pi(a+b+c) r^2 + 4pi/3 r^3.  Ball R: 4pi/3 (R+r)^3.

    With ``h`` the dilation is also measured on a grid (inner/outer cell
    counts, midpoint reported), which is how the box coefficient was checked.
    """
    r = float(r)
    if shape == "box":
        a, b, c = (float(x) for x in dims)
        V, A, M = a * b * c, 2 * (a * b + b * c + c * a), a + b + c
        vol = V + A * r + math.pi * M * r * r + 4 * math.pi / 3 * r**3
        area = A + 2 * math.pi * M * r + 4 * math.pi * r * r
    elif shape == "ball":
        R = float(dims if not isinstance(dims, (tuple, list)) else dims[0])
        vol = 4 * math.pi / 3 * (R + r) ** 3
        area = 4 * math.pi * (R + r) ** 2
    else:
        raise InvalidInput(f"unknown shape {shape!r}")
    out = Steiner3D(vol, area)
    if h is not None:
        hf = float(h)
        if shape == "box":
            half = np.array([a, b, c]) / 2
        else:
            half = None
        ext = (max(a, b, c) / 2 if shape == "box" else R) + r
        n = int(math.ceil(ext / hf)) + 1
        g = np.arange(-n, n + 1) * hf  # corner lattice, body centred at 0
        X, Y, Z = np.meshgrid(g, g, g, indexing="ij", sparse=True)
        if shape == "box":
            dx = np.maximum(np.abs(X) - half[0], 0)
            dy = np.maximum(np.abs(Y) - half[1], 0)
            dz = np.maximum(np.abs(Z) - half[2], 0)
            dist = np.sqrt(dx**2 + dy**2 + dz**2)
        else:
            dist = np.maximum(np.sqrt(X**2 + Y**2 + Z**2) - R, 0)
        ins = dist <= r
        inner = ins[:-1, :-1, :-1].copy()
        for s in np.ndindex(2, 2, 2):
            inner &= ins[s[0]:s[0] + 2 * n, s[1]:s[1] + 2 * n, s[2]:s[2] + 2 * n]
        # a cell meets the dilation iff its nearest point does: clamp the centre
        cc = (g[:-1] + g[1:]) / 2
        X, Y, Z = np.meshgrid(cc, cc, cc, indexing="ij", sparse=True)
        if shape == "box":
            gx = np.maximum(np.abs(X) - half[0] - hf / 2, 0)
            gy = np.maximum(np.abs(Y) - half[1] - hf / 2, 0)
            gz = np.maximum(np.abs(Z) - half[2] - hf / 2, 0)
            dmin = np.sqrt(gx**2 + gy**2 + gz**2)
        else:
            box_gap = np.sqrt(np.maximum(np.abs(X) - hf / 2, 0) ** 2 + np.maximum(np.abs(Y) - hf / 2, 0) ** 2
                              + np.maximum(np.abs(Z) - hf / 2, 0) ** 2)
            dmin = np.maximum(box_gap - R, 0)
        outer = dmin <= r
        v_in = float(inner.sum()) * hf**3
        v_out = float(outer.sum()) * hf**3
        out.measured_volume = (v_in + v_out) / 2
        out.measured_bracket = (v_in, v_out)
    return out


# --------------------------------------------------------------------------
# Kakeya and shape functionals


@dataclass
class KakeyaReport:
    sampled_chord_min: float
    difference_radius_x2: object
    relative_gap: float
    agree: bool
    r_kakeya: object
    directions: int


def kakeya_equivalence_check(K: ConvexPolytope, directions: int = 720, tol: float = 1e-3) -> KakeyaReport:
    """Compare min over sampled u of the longest chord of K along u with 2 rho(S(K)).

    The longest chord along u is the radial function of K - K; its infimum is
    the Steinhaus radius, i.e. K is r-Kakeya iff r <= that value.
    """
    if K.dimension != 2:
        raise InvalidInput("Kakeya check is planar")
    DK = steinhaus_map(K).scale(2)  # K - K
    dirs = direction_plan(2, directions)
    if DK.is_degenerate:
        chord = min(_polytope_radial(DK, th) for th in dirs)
    else:
        hs = halfspaces(DK)
        N = np.array([[float(x) for x in n] for n, _ in hs])
        c = np.array([float(c) for _, c in hs])
        proj = dirs @ N.T
        with np.errstate(divide="ignore"):
            t = np.where(proj > 0, c[None, :] / proj, np.inf)
        chord = float(t.min(axis=1).min())
    rad = 2 * origin_ball_radius(steinhaus_map(K))
    rf = float(rad)
    gap = abs(chord - rf) / rf if rf > 0 else abs(chord - rf)
    return KakeyaReport(float(chord), rad, float(gap), bool(gap <= tol), rad, directions)


@dataclass
class ShapeFunctionals:
    A: object
    P: float
    W: object
    r_in: float
    R: float
    D: object
    degenerate: bool = False

    @property
    def bs_point(self):
        if self.R == 0:
            return (0.0, 0.0)
        return (float(self.r_in) / float(self.R), float(self.D) / (2 * float(self.R)))

    def to_json(self):
        return {"A": float(self.A), "P": self.P, "W": float(self.W), "r_in": float(self.r_in),
                "R": float(self.R), "D": float(self.D), "bs_point": list(self.bs_point),
                "degenerate": self.degenerate}


def min_width(K: ConvexPolytope):
    """Minimal width, attained with an edge flush against a support line."""
    if K.is_degenerate:
        return Fraction(0) if K.is_exact else 0.0
    best = None
    v = K.vertices
    for a, b in K.edges():
        e = sub(b, a)
        ee = dot(e, e)
        far = max(abs(cross2(a, b, p)) for p in v)
        w2 = Fraction(far) ** 2 / ee if not isinstance(ee, float) else far * far / ee
        best = w2 if best is None else min(best, w2)
    return sqrt(best)


def _inradius(K: ConvexPolytope) -> float:
    """Largest inscribed circle: best point equidistant from three edge lines."""
    rows = []
    for a, b in K.edges():
        n = np.array([float(b[1] - a[1]), float(a[0] - b[0])])
        n /= np.linalg.norm(n)
        rows.append([n[0], n[1], n[0] * float(a[0]) + n[1] * float(a[1])])
    H = np.array(rows)  # inside: n.x <= c
    m = len(H)
    tri = np.array(list(itertools.combinations(range(m), 3)))
    A = np.concatenate([H[tri][:, :, :2], np.ones((len(tri), 3, 1))], axis=2)
    rhs = H[tri][:, :, 2]
    det = np.linalg.det(A)
    ok = np.abs(det) > 1e-12
    sol = np.linalg.solve(A[ok], rhs[ok][:, :, None])[:, :, 0]
    slack = H[:, 2][None, :] - sol[:, :2] @ H[:, :2].T
    feas = np.all(slack >= sol[:, 2:3] - 1e-9 * (1 + np.abs(H[:, 2]).max()), axis=1)
    return float(sol[feas, 2].max()) if feas.any() else 0.0


def _circle2(a, b):
    c = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    return c, math.dist(a, c)


def _circle3(a, b, c):
    d = 2 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if d == 0:
        return None
    a2, b2, c2 = a[0] ** 2 + a[1] ** 2, b[0] ** 2 + b[1] ** 2, c[0] ** 2 + c[1] ** 2
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    return (ux, uy), math.dist(a, (ux, uy))


def min_enclosing_circle(points):
    """Incremental (Welzl-style) minimal enclosing circle."""
    pts = [tuple(map(float, p)) for p in points]
    tol = 1e-12

    def inside(c, p):
        return math.dist(c[0], p) <= c[1] * (1 + tol) + tol

    c = (pts[0], 0.0)
    for i, p in enumerate(pts):
        if inside(c, p):
            continue
        c = (p, 0.0)
        for j, q in enumerate(pts[:i]):
            if inside(c, q):
                continue
            c = _circle2(p, q)
            for s in pts[:j]:
                if not inside(c, s):
                    c = _circle3(p, q, s) or c
    return c


def shape_functionals(K: ConvexPolytope) -> ShapeFunctionals:
    if K.dimension != 2:
        raise InvalidInput("shape functionals are planar")
    D = diameter(K)
    R = min_enclosing_circle(K.vertices)[1]
    if K.is_degenerate:
        return ShapeFunctionals(Fraction(0), perimeter(K), Fraction(0), 0.0, R, D, degenerate=True)
    return ShapeFunctionals(volume(K), perimeter(K), min_width(K), _inradius(K), R, D)


# --------------------------------------------------------------------------
# corollary


def _f_factory(f):
    """Evaluable function descriptor -> (kind, callable on float arrays)."""
    if isinstance(f, str):
        if f.startswith("coord"):
            i = int(f[5:] or 0)
            return "affine", (lambda X, i=i: X[:, i]), (i,)
        if f == "norm":
            return "norm", (lambda X: np.linalg.norm(X, axis=1)), None
        if f == "const":
            return "affine", (lambda X: np.zeros(len(X))), None
    if isinstance(f, tuple) and len(f) == 2:
        a, b = np.asarray(f[0], dtype=float), float(f[1])
        return "affine", (lambda X, a=a, b=b: X @ a + b), None
    raise InvalidInput(f"unknown function descriptor {f!r}")


@dataclass
class CorollaryVerdict:
    m: float
    M: float
    eps: float
    per_n: list
    threshold: Optional[int]

    @property
    def ok(self) -> bool:
        return self.threshold is not None


def corollary_range_check(trace, f, eps) -> CorollaryVerdict:
    """[m+eps, M-eps] ⊆ f(Star_n) and f(K_n) ⊆ [m, M] along a process trace."""
    v1 = volume(trace[1].snapshot)
    if (v1[1] if isinstance(v1, tuple) else v1) == 0:
        raise NullMeasure("the range corollary needs a seed of positive measure")
    kind, fn, _ = _f_factory(f)
    V = np.array([[float(c) for c in v] for v in trace.hull.vertices])
    vals = fn(V)
    if kind == "norm":
        m, M = 0.0, float(vals.max())
    else:
        m, M = float(vals.min()), float(vals.max())
    eps = float(eps)
    tol = 1e-12 * max(1.0, abs(m), abs(M))
    per_n, threshold = [], None
    for rec in trace:
        K = rec.snapshot
        star = star_subset(K)
        if isinstance(star, GridSet):
            S = (star.cell_indices() + 0.5) * float(star.h)
            S = np.vstack([S, np.zeros((1, S.shape[1]))])
            outer = K.outer if isinstance(K, GridSandwich) else K
            X = outer.corner_points() * float(outer.h)
        elif isinstance(star, IntervalUnion):
            S = np.array([[float(star.min)], [float(star.max)]])
            X = np.array([[float(a)] for ab in K.intervals for a in ab])
        else:
            S = np.array([[float(c) for c in v] for v in star.vertices])
            X = S
        fs, fx = fn(S), fn(X)
        covers = fs.min() <= m + eps + tol and fs.max() >= M - eps - tol
        inside = fx.min() >= m - tol and fx.max() <= M + tol
        ok = covers and inside
        per_n.append((rec.n, bool(covers), bool(inside)))
        if ok and threshold is None:
            threshold = rec.n
        elif not ok:
            threshold = None
    return CorollaryVerdict(m, M, eps, per_n, threshold)
