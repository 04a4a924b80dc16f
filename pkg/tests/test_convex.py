import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steinhaus import (Ball, ConvexPolytope, EmptySet, GridSet, IntervalUnion, NotSymmetric,
                       PointSet, box, iterate_process, steinhaus_map)
from steinhaus.convex import (caratheodory_decompose, convex_hull, direction_plan, dyadic_round,
                              is_symmetric, origin_ball_radius, quasi_support, star_subset,
                              weighted_combination_set)
from steinhaus.errors import PointOutsideHull, QThresholdNotMet

small = st.integers(-6, 6)


def test_symmetry_detection():
    assert is_symmetric(box((-1, -2), (1, 2)))
    assert not is_symmetric(box((0, 0), (1, 1)))
    assert is_symmetric(Ball((0, 0), 3)) and not is_symmetric(Ball((1, 0), 3))
    G = GridSet.from_cells([(i, j) for i in range(-2, 2) for j in range(-2, 2)], F(1, 2))
    assert is_symmetric(G)
    assert not is_symmetric(GridSet.from_cells([(0, 0)], F(1, 2)))


def test_asymmetric_input_is_refused():
    with pytest.raises(NotSymmetric):
        origin_ball_radius(box((0, 0), (1, 1)))
    with pytest.raises(NotSymmetric):
        quasi_support(PointSet.from_points([(1, 0)]))


def test_origin_ball_radius_values():
    assert origin_ball_radius(box((-1, -2), (1, 2))) == 1
    assert origin_ball_radius(Ball((0, 0), F(3, 2))) == F(3, 2)
    assert origin_ball_radius(IntervalUnion.from_pairs([(-3, -2), (-1, 1), (2, 3)])) == 1
    # exact grid: both certified ends agree
    G = GridSet.from_cells([(i, j) for i in range(-2, 2) for j in range(-2, 2)], F(1, 2))
    assert origin_ball_radius(G) == (1, 1)


@given(st.lists(st.tuples(small, small), min_size=3, max_size=6))
@settings(max_examples=40, deadline=None)
def test_polygon_ball_radius_is_inscribed(pts):
    K = steinhaus_map(convex_hull(pts))
    if K.is_degenerate:
        return
    rho = float(origin_ball_radius(K))
    # every sampled boundary direction reaches at least rho, and one is close to it
    prof = quasi_support(K, 720)
    assert min(prof.r_of_theta) / 2 >= rho - 1e-9
    assert prof.r / 2 <= rho * (1 + 1e-3) + 1e-9


def test_direction_plans():
    d2 = direction_plan(2, 8)
    assert d2.shape == (8, 2)
    assert np.allclose(np.linalg.norm(direction_plan(3, 100), axis=1), 1)


def test_quasi_support_of_square():
    p = quasi_support(box((-1, -1), (1, 1)), 4)
    assert p.r_of_theta[0] == pytest.approx(2) and p.r_of_theta[1] == pytest.approx(2 * math.sqrt(2))
    assert p.r_of_theta == p.D_of_theta
    assert p.r == pytest.approx(2) and p.D == pytest.approx(2 * math.sqrt(2))


def test_quasi_support_interval_gap():
    K = IntervalUnion.from_pairs([(-3, -2), (-1, 1), (2, 3)])
    p = quasi_support(K)
    assert p.r == 2 and p.D == 6


def test_star_of_plus_sign_is_itself():
    # each arm is a union of centred strips, so every cell centre sees the origin
    cells = [(i, j) for i in range(-6, 6) for j in (-1, 0)]
    cells += [(j, i) for i in range(-6, 6) for j in (-1, 0)]
    U = GridSet.from_cells(cells, F(1, 4))
    assert star_subset(U) == U


def test_star_drops_hidden_cells():
    # a ring around an empty core: nothing is visible from the origin
    cells = [(i, j) for i in range(-4, 4) for j in range(-4, 4) if max(abs(i + 0.5), abs(j + 0.5)) > 2]
    with pytest.raises(EmptySet):
        star_subset(GridSet.from_cells(cells, F(1, 4)))
    # a ring with a centred core keeps the core only
    cells += [(i, j) for i in (-1, 0) for j in (-1, 0)]
    S = star_subset(GridSet.from_cells(cells, F(1, 4)))
    assert S.count < len(cells)
    assert {(-1, -1), (-1, 0), (0, -1), (0, 0)} <= S.cells


@given(st.lists(st.tuples(small, small), min_size=1, max_size=6),
       st.lists(st.fractions(min_value=0, max_value=1, max_denominator=12), min_size=6, max_size=6))
@settings(max_examples=60, deadline=None)
def test_caratheodory_recombines_exactly(pts, raw):
    K = PointSet.from_points(pts)
    V = K.points
    w = raw[:len(V)]
    if sum(w) == 0:
        w = [F(1)] + [F(0)] * (len(V) - 1)
    s = sum(w)
    y = tuple(sum(wi / s * v[i] for wi, v in zip(w, V)) for i in range(2))
    dec = caratheodory_decompose(y, K)
    assert dec.recombine() == y
    assert len(dec.points) <= 3
    assert all(t > 0 for t in dec.weights) and sum(dec.weights) == 1
    assert list(dec.weights) == sorted(dec.weights, reverse=True)


def test_caratheodory_outside_hull():
    with pytest.raises(PointOutsideHull):
        caratheodory_decompose((5, 5), PointSet.from_points([(0, 0), (1, 0), (0, 1)]))


def test_dyadic_rounding_lands_in_the_iterate():
    K0 = PointSet.from_points([(0, 0), (4, 0), (1, 3)])
    trace = iterate_process(K0, 4, metrics=False)
    K1 = trace[1].snapshot
    dec = caratheodory_decompose((F(1, 3), F(1, 5)), K1)
    for n in (3, 4):
        r = dyadic_round(dec, n)
        assert sum(r.q) == 1 and sum(r.alphas) == 2 ** (n - 1)
        assert float(r.distance) <= float(r.distance_bound) + 1e-12
        assert trace[n].snapshot.contains(r.point)


def test_dyadic_rounding_threshold():
    dec = caratheodory_decompose((F(1, 3), F(1, 3)), PointSet.from_points([(0, 0), (1, 0), (0, 1)]))
    with pytest.raises(QThresholdNotMet):
        dyadic_round(dec, 2)


@pytest.mark.parametrize("seed", [[(0, 0), (4, 0), (1, 3)], [(0,), (1,), (5,)]])
def test_weighted_combinations_equal_the_iterates(seed):
    trace = iterate_process(PointSet.from_points(seed), 4, metrics=False)
    K1 = trace[1].snapshot
    for n in range(1, 5):
        assert weighted_combination_set(K1, n) == trace[n].snapshot


def test_convex_hull_from_list():
    H = convex_hull([(0, 0), (2, 0), (1, 1), (0, 2), (F(1, 2), F(1, 2))])
    assert isinstance(H, ConvexPolytope) and len(H.vertices) == 3
