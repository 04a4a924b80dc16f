"""Canonical representations of nonempty compact subsets of R^d, d <= 3.

Exact sets (interval unions, point sets) store integer numerators over one
common denominator so the heavy set arithmetic runs in numpy integer code.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Optional, Union

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, EmptySet, InvalidInput
from .hull import convex_hull_vertices, cross2
from .scalar import exact

INT_LIMIT = 2**62


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _guard(*arrays):
    for a in arrays:
        if a.size and int(np.abs(a).max()) >= INT_LIMIT:
            raise BudgetExceeded("exact coordinates exceed the int64 working range")


def _to_common(values) -> tuple[np.ndarray, int]:
    fr = [exact(v) for v in values]
    den = reduce(_lcm, (f.denominator for f in fr), 1)
    if den >= INT_LIMIT or any(abs(f.numerator) * (den // f.denominator) >= INT_LIMIT for f in fr):
        raise BudgetExceeded("exact coordinates exceed the int64 working range")
    return np.array([f.numerator * (den // f.denominator) for f in fr], dtype=np.int64), den


def _reduce(arrays: list[np.ndarray], denom: int):
    g = denom
    for a in arrays:
        if a.size:
            g = math.gcd(g, int(np.gcd.reduce(np.abs(a).ravel())))
    if g > 1:
        arrays = [a // g for a in arrays]
        denom //= g
    return arrays, denom


def _row_keys(*arrays):
    """Encode integer rows as scalar keys that preserve lexicographic order, or None."""
    stack = np.vstack(arrays)
    lo, hi = stack.min(axis=0), stack.max(axis=0)
    span = (hi - lo + 1).astype(object)
    if math.prod(int(x) for x in span) >= 2**62:
        return None
    mult = np.ones(len(span), dtype=np.int64)
    for i in range(len(span) - 2, -1, -1):
        mult[i] = mult[i + 1] * int(span[i + 1])
    return [(a - lo) @ mult for a in arrays]


def unique_rows(a: np.ndarray) -> np.ndarray:
    """Lexicographically sorted unique rows."""
    if len(a) < 2:
        return a
    keys = _row_keys(a)
    if keys is None:
        return np.unique(a, axis=0)
    k = keys[0]
    if np.all(k[1:] > k[:-1]):
        return a
    _, idx = np.unique(k, return_index=True)
    return a[idx]


def rescale(arr: np.ndarray, denom: int, new_denom: int) -> np.ndarray:
    k = new_denom // denom
    if k * denom != new_denom:
        raise ValueError("new denominator must be a multiple")
    out = arr * k
    _guard(out)
    return out


# --------------------------------------------------------------------------
# IntervalUnion


@dataclass(frozen=True, eq=False)
class IntervalUnion:
    """Sorted, strictly separated closed intervals ``[lo_i/denom, hi_i/denom]``."""

    lo: np.ndarray
    hi: np.ndarray
    denom: int = 1

    dimension = 1

    @classmethod
    def from_pairs(cls, pairs) -> "IntervalUnion":
        return canonicalize(pairs)

    @classmethod
    def from_arrays(cls, lo, hi, denom) -> "IntervalUnion":
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        if lo.size == 0:
            raise EmptySet("interval union needs at least one interval")
        if np.any(lo > hi):
            raise InvalidInput("interval with a > b")
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
        run = np.maximum.accumulate(hi)
        # closed intervals that touch (lo == running max) merge
        start = np.ones(lo.size, dtype=bool)
        start[1:] = lo[1:] > run[:-1]
        idx = np.flatnonzero(start)
        ends = np.append(idx[1:], lo.size) - 1
        (lo, hi), denom = _reduce([lo[idx], run[ends]], int(denom))
        return cls(lo, hi, denom)

    @property
    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        d = self.denom
        return [(Fraction(int(a), d), Fraction(int(b), d)) for a, b in zip(self.lo, self.hi)]

    def __len__(self):
        return int(self.lo.size)

    def __eq__(self, other):
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return (self.denom == other.denom and np.array_equal(self.lo, other.lo)
                and np.array_equal(self.hi, other.hi))

    def __hash__(self):
        return hash((self.denom, self.lo.tobytes(), self.hi.tobytes()))

    def __repr__(self):
        parts = []
        for a, b in self.intervals:
            parts.append(f"{{{a}}}" if a == b else f"[{a}, {b}]")
        return "IntervalUnion(" + " ∪ ".join(parts) + ")"

    @property
    def min(self) -> Fraction:
        return Fraction(int(self.lo[0]), self.denom)

    @property
    def max(self) -> Fraction:
        return Fraction(int(self.hi[-1]), self.denom)

    def scale(self, c) -> "IntervalUnion":
        c = exact(c)
        lo, hi = self.lo * c.numerator, self.hi * c.numerator
        _guard(lo, hi)
        if c < 0:
            lo, hi = hi, lo
        return IntervalUnion.from_arrays(lo, hi, self.denom * c.denominator)

    def __neg__(self):
        return IntervalUnion(-self.hi[::-1].copy(), -self.lo[::-1].copy(), self.denom)

    def translate(self, x) -> "IntervalUnion":
        x = exact(x)
        den = _lcm(self.denom, x.denominator)
        s = x.numerator * (den // x.denominator)
        return IntervalUnion.from_arrays(rescale(self.lo, self.denom, den) + s,
                                         rescale(self.hi, self.denom, den) + s, den)

    def contains_point(self, x) -> bool:
        x = exact(x)
        i = np.searchsorted(self.lo * x.denominator, x.numerator * self.denom, side="right") - 1
        return i >= 0 and x * self.denom <= int(self.hi[i])

    def contains_interval(self, a, b) -> bool:
        a, b = exact(a), exact(b)
        i = np.searchsorted(self.lo * a.denominator, a.numerator * self.denom, side="right") - 1
        return i >= 0 and b * self.denom <= int(self.hi[i])

    def issubset(self, other: "IntervalUnion") -> bool:
        return all(other.contains_interval(a, b) for a, b in self.intervals)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        den = _lcm(self.denom, other.denom)
        lo = np.concatenate([rescale(self.lo, self.denom, den), rescale(other.lo, other.denom, den)])
        hi = np.concatenate([rescale(self.hi, self.denom, den), rescale(other.hi, other.denom, den)])
        return IntervalUnion.from_arrays(lo, hi, den)


def canonicalize(raw: Iterable) -> IntervalUnion:
    """Sort and merge closed intervals; touching intervals coalesce."""
    pairs = [(exact(a), exact(b)) for a, b in raw]
    if not pairs:
        raise EmptySet("canonicalize needs at least one interval")
    vals, den = _to_common([v for p in pairs for v in p])
    return IntervalUnion.from_arrays(vals[0::2], vals[1::2], den)


# --------------------------------------------------------------------------
# PointSet


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite exact point set, rows of ``numer`` over a common denominator."""

    numer: np.ndarray
    denom: int = 1

    @classmethod
    def from_points(cls, points) -> "PointSet":
        pts = [tuple(p) if isinstance(p, (tuple, list)) else (p,) for p in points]
        if not pts:
            raise EmptySet("point set needs at least one point")
        d = len(pts[0])
        if any(len(p) != d for p in pts):
            raise DimensionMismatch("mixed point dimensions")
        if d not in (1, 2, 3):
            raise InvalidInput("dimension must be 1, 2 or 3")
        flat, den = _to_common([c for p in pts for c in p])
        return cls.from_numer(flat.reshape(-1, d), den)

    @classmethod
    def from_numer(cls, numer, denom) -> "PointSet":
        numer = np.asarray(numer, dtype=np.int64)
        if numer.ndim == 1:
            numer = numer[:, None]
        if numer.shape[0] == 0:
            raise EmptySet("point set needs at least one point")
        (numer,), denom = _reduce([numer], int(denom))
        return cls(unique_rows(numer), denom)

    @property
    def dimension(self) -> int:
        return int(self.numer.shape[1])

    @property
    def points(self) -> list[tuple[Fraction, ...]]:
        d = self.denom
        return [tuple(Fraction(int(c), d) for c in row) for row in self.numer]

    def __len__(self):
        return int(self.numer.shape[0])

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.denom == other.denom and np.array_equal(self.numer, other.numer)

    def __hash__(self):
        return hash((self.denom, self.numer.tobytes()))

    def __repr__(self):
        if len(self) > 12:
            return f"PointSet({len(self)} points, d={self.dimension}, denom={self.denom})"
        return f"PointSet({self.points})"

    def scale(self, c) -> "PointSet":
        c = exact(c)
        out = self.numer * c.numerator
        _guard(out)
        return PointSet.from_numer(out, self.denom * c.denominator)

    def __neg__(self):
        return PointSet.from_numer(-self.numer, self.denom)

    def issubset(self, other: "PointSet") -> bool:
        den = _lcm(self.denom, other.denom)
        a = rescale(self.numer, self.denom, den)
        b = rescale(other.numer, other.denom, den)
        keys = _row_keys(a, b)
        if keys is None:
            sa = {r.tobytes() for r in np.ascontiguousarray(a)}
            sb = {r.tobytes() for r in np.ascontiguousarray(b)}
            return sa <= sb
        return bool(np.isin(keys[0], keys[1]).all())

    def contains(self, p) -> bool:
        return PointSet.from_points([p]).issubset(self)

    def union(self, other: "PointSet") -> "PointSet":
        den = _lcm(self.denom, other.denom)
        return PointSet.from_numer(np.vstack([rescale(self.numer, self.denom, den),
                                              rescale(other.numer, other.denom, den)]), den)

    def as_floats(self) -> np.ndarray:
        return self.numer / self.denom


# --------------------------------------------------------------------------
# GridSet / GridSandwich


@dataclass(frozen=True, eq=False)
class GridSet:
    """Union of closed cells ``prod_i [h z_i, h (z_i + 1)]`` for ``z`` in the mask.

    ``mask[k]`` is cell ``offset + k``; the mask is trimmed to its bounding box.
    """

    h: Fraction
    offset: tuple
    mask: np.ndarray

    @classmethod
    def from_mask(cls, mask, offset, h) -> "GridSet":
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim not in (1, 2, 3):
            raise InvalidInput("grid dimension must be 1, 2 or 3")
        h = exact(h)
        if h <= 0:
            raise InvalidInput("cell size must be positive")
        if not mask.any():
            raise EmptySet("grid set has no cells")
        sl = []
        off = []
        for ax in range(mask.ndim):
            other = tuple(i for i in range(mask.ndim) if i != ax)
            nz = np.flatnonzero(mask.any(axis=other) if other else mask)
            sl.append(slice(int(nz[0]), int(nz[-1]) + 1))
            off.append(int(offset[ax]) + int(nz[0]))
        return cls(h, tuple(off), np.ascontiguousarray(mask[tuple(sl)]))

    @classmethod
    def from_cells(cls, cells, h) -> "GridSet":
        if isinstance(cells, np.ndarray) and cells.ndim == 2:
            cells = cells.astype(np.int64)
        else:
            cells = np.array([tuple(c) if isinstance(c, (tuple, list, np.ndarray)) else (c,)
                              for c in cells], dtype=np.int64)
        if cells.size == 0:
            raise EmptySet("grid set has no cells")
        lo = cells.min(axis=0)
        shape = tuple(cells.max(axis=0) - lo + 1)
        mask = np.zeros(shape, dtype=bool)
        mask[tuple((cells - lo).T)] = True
        return cls.from_mask(mask, tuple(int(v) for v in lo), h)

    @property
    def dimension(self) -> int:
        return self.mask.ndim

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    @property
    def cells(self) -> set:
        idx = np.argwhere(self.mask) + np.array(self.offset)
        return {tuple(int(v) for v in row) for row in idx}

    def cell_indices(self) -> np.ndarray:
        return np.argwhere(self.mask) + np.array(self.offset, dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, GridSet):
            return NotImplemented
        if self.h != other.h:
            k = common_resolution(self.h, other.h)
            return self.refine_to(k) == other.refine_to(k)
        return self.offset == other.offset and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.h, self.offset, self.mask.shape, self.mask.tobytes()))

    def __repr__(self):
        return f"GridSet(d={self.dimension}, h={self.h}, cells={self.count}, offset={self.offset})"

    def refine(self, k: int) -> "GridSet":
        if k == 1:
            return self
        mask = self.mask
        for ax in range(mask.ndim):
            mask = np.repeat(mask, k, axis=ax)
        return GridSet(self.h / k, tuple(o * k for o in self.offset), mask)

    def refine_to(self, h) -> "GridSet":
        k = self.h / exact(h)
        if k.denominator != 1:
            raise InvalidInput(f"cannot refine h={self.h} to {h}")
        return self.refine(int(k))

    def window(self, lo, shape) -> np.ndarray:
        """Mask restricted/padded to the index box ``[lo, lo + shape)``."""
        out = np.zeros(tuple(shape), dtype=bool)
        src, dst = [], []
        for ax in range(self.dimension):
            a = max(lo[ax], self.offset[ax])
            b = min(lo[ax] + shape[ax], self.offset[ax] + self.mask.shape[ax])
            if b <= a:
                return out
            src.append(slice(a - self.offset[ax], b - self.offset[ax]))
            dst.append(slice(a - lo[ax], b - lo[ax]))
        out[tuple(dst)] = self.mask[tuple(src)]
        return out

    def issubset(self, other: "GridSet") -> bool:
        k = common_resolution(self.h, other.h)
        a, b = self.refine_to(k), other.refine_to(k)
        return not np.any(a.mask & ~b.window(a.offset, a.mask.shape))

    def union(self, other: "GridSet") -> "GridSet":
        k = common_resolution(self.h, other.h)
        a, b = self.refine_to(k), other.refine_to(k)
        lo = tuple(min(x, y) for x, y in zip(a.offset, b.offset))
        hi = tuple(max(x + s, y + t) for x, s, y, t in
                   zip(a.offset, a.mask.shape, b.offset, b.mask.shape))
        shape = tuple(q - p for p, q in zip(lo, hi))
        return GridSet.from_mask(a.window(lo, shape) | b.window(lo, shape), lo, k)

    def translate_cells(self, z) -> "GridSet":
        return GridSet(self.h, tuple(o + int(v) for o, v in zip(self.offset, z)), self.mask)

    def corner_points(self) -> np.ndarray:
        """Integer corner indices (units of h) of all cells, deduplicated."""
        idx = self.cell_indices()
        d = self.dimension
        shifts = np.array(np.meshgrid(*[[0, 1]] * d, indexing="ij")).reshape(d, -1).T
        pts = (idx[:, None, :] + shifts[None, :, :]).reshape(-1, d)
        return np.unique(pts, axis=0)

    def boundary_corner_points(self) -> np.ndarray:
        """Corners of cells with at least one exposed face (enough for hulls/diameters)."""
        m = np.pad(self.mask, 1)
        exposed = np.zeros_like(m)
        for ax in range(m.ndim):
            exposed |= m & ~np.roll(m, 1, axis=ax)
            exposed |= m & ~np.roll(m, -1, axis=ax)
        inner = exposed[tuple(slice(1, -1) for _ in range(m.ndim))]
        sub = GridSet(self.h, self.offset, inner) if inner.any() else self
        return sub.corner_points()


def common_resolution(h1, h2) -> Fraction:
    """Largest h with h1/h and h2/h both integers."""
    h1, h2 = exact(h1), exact(h2)
    den = _lcm(h1.denominator, h2.denominator)
    return Fraction(math.gcd(h1.numerator * (den // h1.denominator),
                             h2.numerator * (den // h2.denominator)), den)


@dataclass(frozen=True)
class GridSandwich:
    """Certified pair ``inner ⊆ K ⊆ outer``; ``inner`` is None when empty."""

    inner: Optional[GridSet]
    outer: GridSet

    def __post_init__(self):
        if self.inner is not None:
            if self.inner.h != self.outer.h or self.inner.dimension != self.outer.dimension:
                raise InvalidInput("sandwich sides must share h and dimension")
            if not self.inner.issubset(self.outer):
                raise InvalidInput("sandwich inner side is not contained in the outer side")

    @property
    def h(self) -> Fraction:
        return self.outer.h

    @property
    def dimension(self) -> int:
        return self.outer.dimension


# --------------------------------------------------------------------------
# Convex bodies


@dataclass(frozen=True, eq=False)
class ConvexPolytope:
    """Convex hull of its (extreme) vertices; 2D vertices are in CCW order."""

    vertices: tuple
    dimension: int
    affine_dim: int
    facets: tuple = field(default=(), repr=False)

    @classmethod
    def from_points(cls, points) -> "ConvexPolytope":
        pts = [tuple(p) if isinstance(p, (tuple, list)) else (p,) for p in points]
        if not pts:
            raise EmptySet("polytope needs at least one point")
        d = len(pts[0])
        if d not in (1, 2, 3) or any(len(p) != d for p in pts):
            raise DimensionMismatch("polytope points must share a dimension in 1..3")
        pts = [tuple(c if isinstance(c, float) else exact(c) for c in p) for p in pts]
        verts, k, facets = convex_hull_vertices(pts)
        return cls(tuple(verts), d, k, tuple(facets))

    @classmethod
    def from_vertices(cls, vertices) -> "ConvexPolytope":
        """Validate that every listed point is extreme."""
        poly = cls.from_points(vertices)
        given = {tuple(v) if isinstance(v, (tuple, list)) else (v,) for v in vertices}
        given = {tuple(c if isinstance(c, float) else exact(c) for c in v) for v in given}
        if set(poly.vertices) != given:
            raise InvalidInput("listed points are not in convex position")
        return poly

    @property
    def is_degenerate(self) -> bool:
        return self.affine_dim < self.dimension

    @property
    def is_exact(self) -> bool:
        return all(not isinstance(c, float) for v in self.vertices for c in v)

    def __eq__(self, other):
        if not isinstance(other, ConvexPolytope):
            return NotImplemented
        return self.dimension == other.dimension and set(self.vertices) == set(other.vertices)

    def __hash__(self):
        return hash(frozenset(self.vertices))

    def edges(self):
        """CCW edges of a full-dimensional polygon."""
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def contains(self, p) -> bool:
        p = tuple(p) if isinstance(p, (tuple, list)) else (p,)
        d = self.dimension
        if self.affine_dim == 0:
            return p == self.vertices[0]
        if d == 1:
            return self.vertices[0][0] <= p[0] <= self.vertices[-1][0]
        if self.is_degenerate:
            from .metrics import distance_to_set
            return distance_to_set(p, self) == 0
        if d == 2:
            return all(cross2(a, b, p) >= 0 for a, b in self.edges())
        return all(sum(n_i * x for n_i, x in zip(f.normal, p)) <= f.offset for f in self.facets)

    def scale(self, c) -> "ConvexPolytope":
        return ConvexPolytope.from_points([tuple(c * x for x in v) for v in self.vertices])

    def translate(self, t) -> "ConvexPolytope":
        return ConvexPolytope.from_points([tuple(x + y for x, y in zip(v, t)) for v in self.vertices])


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball; used as a rasterization source and test body."""

    center: tuple
    radius: object

    @property
    def dimension(self) -> int:
        return len(self.center)


CompactSet = Union[IntervalUnion, GridSet, GridSandwich, PointSet, ConvexPolytope]


def dimension_of(K) -> int:
    return K.dimension


def box(lo, hi) -> ConvexPolytope:
    """Axis-aligned box as a polytope."""
    import itertools
    corners = itertools.product(*[(a, b) for a, b in zip(lo, hi)])
    return ConvexPolytope.from_points([tuple(exact(c) for c in p) for p in corners])
