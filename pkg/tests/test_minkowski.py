import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from steinhaus import (Ball, BudgetExceeded, ConvexPolytope, GridSandwich, GridSet, IntervalUnion, PointSet,
                       ResolutionTooCoarse, box, iterate_process, rasterize,
                       sandwich, steinhaus_map)
from steinhaus.metrics import diameter, volume
from steinhaus.minkowski import (correlation, identity_check_powers, minkowski_content_estimate,
                                 minkowski_sum, mstar_estimate, shift_symmdiff, sumset_power,
                                 tube_volume)
from steinhaus.sets import canonicalize

small = st.integers(-6, 6)
points2 = st.lists(st.tuples(small, small), min_size=1, max_size=6)
fr = st.fractions(min_value=-4, max_value=4, max_denominator=8)


def neg(P: PointSet) -> PointSet:
    return PointSet.from_numer(-P.numer, P.denom)


@given(points2)
@settings(max_examples=80, deadline=None)
def test_image_is_symmetric_and_holds_origin(pts):
    S = steinhaus_map(PointSet.from_points(pts))
    assert S.contains((0, 0))
    assert neg(S) == S


@given(points2)
@settings(max_examples=80, deadline=None)
def test_point_diameter_preserved_exactly(pts):
    K = PointSet.from_points(pts)
    assert diameter(steinhaus_map(K)) == diameter(K)


@given(st.lists(st.tuples(fr, fr), min_size=1, max_size=5))
@settings(max_examples=80, deadline=None)
def test_interval_image_matches_point_image_on_endpoints(pairs):
    K = canonicalize([(min(a, b), max(a, b)) for a, b in pairs])
    S = steinhaus_map(K)
    assert S.min == -S.max
    assert S.max - S.min == K.max - K.min
    # every pairwise difference of endpoints lands in the image
    ends = [x for ab in K.intervals for x in ab]
    for a in ends:
        for b in ends:
            assert S.contains_point((a - b) / 2)


def test_nesting_along_the_process():
    trace = iterate_process(PointSet.from_points([(0, 0), (3, 1), (1, 2)]), 5, metrics=False)
    for a, b in zip(trace.sets, trace.sets[1:]):
        assert a.issubset(b)


def test_two_point_trace_is_exact():
    trace = iterate_process(PointSet.from_points([(0,), (4,)]), 8)
    assert [r.dH for r in trace] == [F(4, 2 ** (n + 1)) for n in range(1, 9)]
    assert all(r.dH_err == 0 for r in trace)
    assert all(r.diam == 4 for r in trace)


def test_k1_image_bit_exact():
    K1 = canonicalize([(F(-2), F(-2)), (F(-1, 2), F(1, 2)), (F(2), F(2))])
    S = steinhaus_map(K1)
    assert S.intervals == [(F(-2), F(-2)), (F(-5, 4), F(-3, 4)), (F(-1, 2), F(1, 2)),
                           (F(3, 4), F(5, 4)), (F(2), F(2))]


def test_polytope_image_is_half_difference_body():
    tri = ConvexPolytope.from_points([(0, 0), (1, 0), (0, 1)])
    S = steinhaus_map(tri)
    assert volume(S) == F(3, 2) * volume(tri)  # |T - T| = 6|T| for a triangle
    assert steinhaus_map(S) == S


def test_grid_image_halves_resolution_and_keeps_symmetry():
    U = GridSet.from_cells([(0, 0), (1, 0), (3, 1)], F(1, 2))
    S = steinhaus_map(U)
    assert S.h == F(1, 4)
    cells = {tuple(c) for c in S.cell_indices().tolist()}
    assert cells == {(-1 - a, -1 - b) for a, b in cells}


def test_grid_image_brackets_the_true_difference_set():
    sq = box((0, 0), (1, 1))
    S = steinhaus_map(sandwich(sq, F(1, 8)))
    exact = steinhaus_map(sq)
    assert isinstance(S, GridSandwich)
    assert volume(S.inner) <= volume(exact) <= volume(S.outer)


def test_grid_budget_raises_with_suggestion():
    U = rasterize(box((0, 0), (1, 1)), F(1, 64))
    with pytest.raises(BudgetExceeded) as err:
        steinhaus_map(U, budget=1000)
    assert err.value.suggested_coarsening and err.value.suggested_coarsening >= 2


def test_iterate_coarsens_instead_of_failing():
    trace = iterate_process(sandwich(box((0, 0), (1, 1)), F(1, 32)), 3, budget=5000)
    assert len(trace) == 3


def test_point_budget_env_override(monkeypatch):
    monkeypatch.setenv("STEINHAUS_BUDGET", "50")
    with pytest.raises(BudgetExceeded):
        steinhaus_map(PointSet.from_points([(i * i,) for i in range(14)]))


def test_sumset_identity_on_small_seed():
    K0 = PointSet.from_points([(0, 0), (2, 1), (1, 3)])
    assert identity_check_powers(K0, 3)


def test_minkowski_sum_and_power():
    A = PointSet.from_points([(0,), (1,)])
    assert minkowski_sum(A, A) == PointSet.from_points([(0,), (1,), (2,)])
    assert sumset_power(A, 3) == PointSet.from_points([(i,) for i in range(4)])


def test_shift_measures_on_rectangle():
    R = rasterize(box((0, 0), (2, 1)), F(1, 4))
    assert correlation(R, (F(1, 2), 0)) == F(3, 2)
    assert shift_symmdiff(R, (F(1, 2), 0)) == 1


def test_mstar_rectangle_bracket():
    R = rasterize(box((0, 0), (2, 1)), F(1, 32))
    rep = mstar_estimate(R)
    assert rep.upper_bound_sq == 20
    assert rep.lower_estimate <= float(rep.upper_bound)
    assert (float(rep.upper_bound) - rep.lower_estimate) / rep.lower_estimate <= 0.05


def test_tube_volume_of_disk():
    U = rasterize(Ball((0, 0), 1), F(1, 128), "inner")
    t, err = tube_volume(U, F(1, 4), with_error=True)
    assert abs(t - math.pi) <= max(err, 0.03 * math.pi)
    with pytest.raises(ResolutionTooCoarse):
        tube_volume(U, F(1, 256))


def test_content_ratios_on_square():
    U = rasterize(box((0, 0), (1, 1)), F(1, 128))
    est = minkowski_content_estimate(U)
    # axis-aligned boundary: no staircase, so the ratios sit near the perimeter
    assert abs(est.ratios[-1] - 4) / 4 < 0.05
    assert all(a <= b + 1e-12 for a, b in zip(est.tube_volumes[1:], est.tube_volumes))


@pytest.mark.parametrize("pairs,h", [([(0, 1), (2, 3)], F(1, 2)), ([(0, F(1, 2)), (F(3, 2), 3)], F(1, 2)),
                                     ([(-1, 0), (1, 4)], F(1))])
def test_outer_raster_commutes_on_lattice_intervals(pairs, h):
    K = IntervalUnion.from_pairs(pairs)
    assert steinhaus_map(rasterize(K, h, "outer")) == rasterize(steinhaus_map(K), h / 2, "outer")


@given(st.lists(st.tuples(fr, fr), min_size=1, max_size=4), st.sampled_from([F(1), F(1, 2), F(1, 4)]))
@settings(max_examples=60, deadline=None)
def test_outer_raster_of_image_sits_inside_image_of_raster(pairs, h):
    K = canonicalize([(min(a, b), max(a, b)) for a, b in pairs])
    assert rasterize(steinhaus_map(K), h / 2, "outer").issubset(steinhaus_map(rasterize(K, h, "outer")))


def test_outer_raster_does_not_commute_on_points():
    K = IntervalUnion.from_pairs([(0, 0), (F(1, 4), F(1, 4))])
    lhs = steinhaus_map(rasterize(K, F(1), "outer"))
    rhs = rasterize(steinhaus_map(K), F(1, 2), "outer")
    assert (lhs.count, rhs.count) == (4, 2)
