import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import cKDTree

from steinhaus import (ConvexPolytope, DimensionMismatch, GridSet, IntervalUnion, PointSet, box,
                       hausdorff_distance, hausdorff_with_error, iterate_process)
from steinhaus.metrics import (diameter, diameter_sq, hausdorff_points_polygon_sq,
                               hausdorff_points_sq, hausdorff_sq_1d, perimeter,
                               sup_dist_polygon_to_points_sq, volume)
from steinhaus.sets import canonicalize

coord = st.integers(-12, 12)


def polygon_samples(Q: ConvexPolytope, step: float) -> np.ndarray:
    V = np.array([[float(c) for c in v] for v in Q.vertices])
    lo, hi = V.min(0), V.max(0)
    xs = np.arange(lo[0], hi[0] + step, step)
    ys = np.arange(lo[1], hi[1] + step, step)
    g = np.stack(np.meshgrid(xs, ys, indexing="ij"), -1).reshape(-1, 2)
    keep = np.ones(len(g), dtype=bool)
    for i in range(len(V)):
        a, b = V[i], V[(i + 1) % len(V)]
        keep &= (b[0] - a[0]) * (g[:, 1] - a[1]) - (b[1] - a[1]) * (g[:, 0] - a[0]) >= -1e-12
    return np.vstack([g[keep], V])


@given(st.lists(st.tuples(coord, coord), min_size=1, max_size=15),
       st.lists(st.tuples(coord, coord), min_size=3, max_size=7))
@settings(max_examples=60, deadline=None)
def test_polygon_sup_distance_against_dense_sampling(pts, poly):
    P = PointSet.from_points(pts)
    try:
        Q = ConvexPolytope.from_points(poly)
    except Exception:
        return
    if Q.affine_dim < 2:
        return
    exact = math.sqrt(float(sup_dist_polygon_to_points_sq(P, Q)))
    step = 0.05
    samples = polygon_samples(Q, step)
    sampled = float(cKDTree(P.as_floats()).query(samples)[0].max())
    # d_P is 1-Lipschitz: the exact sup sits within one sample spacing above the samples
    assert sampled <= exact + 1e-9
    assert exact <= sampled + step * math.sqrt(2) / 2 + 1e-9


def test_polygon_sup_distance_known_value():
    # centre of the unit square is the farthest point from its corners
    P = PointSet.from_points([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert sup_dist_polygon_to_points_sq(P, box((0, 0), (1, 1))) == F(1, 2)
    # a single point at a corner: the opposite corner
    P = PointSet.from_points([(0, 0)])
    assert sup_dist_polygon_to_points_sq(P, box((0, 0), (2, 1))) == 5


@pytest.mark.parametrize("seed", [[(0, 0), (1, 0), (3, 2)], [(0, 0), (0, 1), (0, 3), (1, 2), (3, 3)],
                                  [(1, 0), (1, 3), (2, 3), (3, 0)]])
def test_lattice_pruning_matches_unpruned(seed):
    trace = iterate_process(PointSet.from_points(seed), 6, metrics=False)
    for n in (5, 6):
        P = trace[n].snapshot
        assert (sup_dist_polygon_to_points_sq(P, trace.hull, prune=True)
                == sup_dist_polygon_to_points_sq(P, trace.hull, prune=False))


def test_rate_bound_on_a_seed():
    trace = iterate_process(PointSet.from_points([(0, 0), (3, 1), (1, 3)]), 7, metrics=False)
    D_sq = diameter_sq(trace.hull)
    for n in range(3, 8):
        assert hausdorff_points_polygon_sq(trace[n].snapshot, trace.hull) <= D_sq * 4 / F(4) ** n


def test_hausdorff_1d_exact():
    A = canonicalize([(F(0), F(1)), (F(3), F(4))])
    B = canonicalize([(F(0), F(4))])
    assert hausdorff_sq_1d(A, B) == F(1)
    assert hausdorff_distance(A, B) == 1
    P = PointSet.from_points([(0,), (4,)])
    assert hausdorff_with_error(P, B) == (2, 0)


@given(st.lists(st.tuples(coord, coord), min_size=1, max_size=8),
       st.lists(st.tuples(coord, coord), min_size=1, max_size=8))
@settings(max_examples=60, deadline=None)
def test_point_hausdorff_matches_bruteforce(a, b):
    A, B = PointSet.from_points(a), PointSet.from_points(b)
    pa, pb = A.as_floats(), B.as_floats()
    d = np.sqrt(((pa[:, None] - pb[None]) ** 2).sum(-1))
    brute = max(d.min(1).max(), d.min(0).max())
    assert math.isclose(math.sqrt(float(hausdorff_points_sq(A, B))), brute, abs_tol=1e-12)
    assert hausdorff_points_sq(A, B) == hausdorff_points_sq(B, A)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        hausdorff_distance(PointSet.from_points([(0,)]), PointSet.from_points([(0, 0)]))


def test_volume_diameter_perimeter():
    B = box((0, 0), (2, 1))
    assert volume(B) == 2 and diameter_sq(B) == 5 and perimeter(B) == 6
    assert volume(canonicalize([(F(0), F(1, 2)), (F(1), F(3, 2))])) == 1
    assert volume(GridSet.from_cells([(0, 0), (3, 3)], F(1, 4))) == F(1, 8)
    assert diameter(IntervalUnion.from_pairs([(-2, -2), (2, 2)])) == 4
    assert volume(PointSet.from_points([(0, 0)])) == 0


def test_grid_hausdorff_reports_error():
    G = GridSet.from_cells([(0, 0)], F(1, 2))
    m = hausdorff_with_error(G, box((0, 0), (F(1, 2), F(1, 2))))
    assert m.error > 0 and m.value >= 0
