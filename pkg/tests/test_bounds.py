import math
from fractions import Fraction as F

import numpy as np
import pytest

from steinhaus import ConvexPolytope, GridSet, IntervalUnion, InvalidInput, box, iterate_process, rasterize, sandwich
from steinhaus.bounds import (corollary_range_check, half_hull_check, half_hull_threshold,
                              k1_family, kakeya_equivalence_check, maximal_box, min_enclosing_circle,
                              one_d_constants, shape_functionals, steiner_2d_check,
                              steiner_3d_closed_forms, steinhaus_radius_bruteforce, theorem1_bound,
                              theorem2_bound, verify_one_d_containment)
from steinhaus.errors import NullMeasure


def fringed_square() -> GridSet:
    """A 32x32 block with comb teeth on every side: mass far from the core."""
    m = np.zeros((40, 40), dtype=bool)
    m[4:36, 4:36] = True
    m[0:4, 4:36:2] = True
    m[36:40, 4:36:2] = True
    m[4:36:2, 0:4] = True
    m[4:36:2, 36:40] = True
    return GridSet.from_mask(m, (0, 0), F(1, 32))


def test_first_bound_on_rectangle():
    rep = theorem1_bound(rasterize(box((0, 0), (2, 1)), F(1, 8)))
    assert rep.bound_value == pytest.approx(1 / math.sqrt(5), abs=1e-15)
    assert rep.bound_value <= 1 / math.sqrt(5)
    assert rep.truth_bracket == (1, 1)
    assert rep.slack >= 1


def test_bruteforce_radius_of_square_grid():
    assert steinhaus_radius_bruteforce(rasterize(box((0, 0), (1, 1)), F(1, 4))) == (1, 1)


def test_subset_family_beats_the_whole_set():
    U = fringed_square()
    b1 = theorem1_bound(U, truth=False)
    b2 = theorem2_bound(U, truth=False)
    assert b2.bound_value > 3 * b1.bound_value
    assert b2.best_subset == "box"
    assert maximal_box(U).count == 32 * 32


def test_subset_family_is_still_a_lower_bound():
    U = fringed_square()
    rep = theorem2_bound(U)
    assert rep.truth_bracket[0] >= rep.bound_value


def test_family_members_must_be_subsets():
    U = rasterize(box((0, 0), (1, 1)), F(1, 4))
    bad = GridSet.from_cells([(100, 100)], F(1, 4))
    with pytest.raises(InvalidInput):
        theorem2_bound(U, family=lambda U: [("bad", bad)], truth=False)


def test_null_measure_refused():
    with pytest.raises(NullMeasure):
        verify_one_d_containment(IntervalUnion.from_pairs([(0, 0), (1, 1)]), F(1, 4))


def test_one_d_constants():
    c = one_d_constants(1, 4, F(1, 2))
    assert (c.n0, c.t0, c.l0, c.N_threshold) == (2, F(3, 4), 5, 10)
    assert one_d_constants(4, 4, F(1, 2)).degenerate


@pytest.mark.parametrize("eps", [F(1, 2), F(1, 4), F(1, 8)])
def test_one_d_threshold_grows_as_eps_shrinks(eps):
    smaller = one_d_constants(1, 4, eps / 2)
    assert smaller.l0 >= one_d_constants(1, 4, eps).l0


def test_one_d_constants_validate():
    with pytest.raises(InvalidInput):
        one_d_constants(1, 4, 3)
    with pytest.raises(InvalidInput):
        one_d_constants(0, 4, F(1, 2))


def test_one_d_containment_on_family():
    v = verify_one_d_containment(k1_family(1, 4, F(1, 4)), F(1, 2))
    assert v.ok
    assert v.n_star is not None and v.n_star <= v.constants.N_threshold + 1


def test_half_hull_threshold():
    assert half_hull_threshold(4, 2, 1) == 4
    with pytest.raises(InvalidInput):
        half_hull_threshold(4, 1, 1)
    with pytest.raises(InvalidInput):
        half_hull_threshold(4, 2, 0)


def test_half_hull_containment_on_square():
    v = half_hull_check(rasterize(box((0, 0), (1, 1)), F(1, 4)))
    assert v.contained and v.missing_cells == 0


def test_steiner_error_halves_with_resolution():
    B = box((0, 0), (2, 1))
    errs = [steiner_2d_check(B, F(1, 2), h).relative_error for h in (F(1, 16), F(1, 32), F(1, 64))]
    assert errs[0] > errs[1] > errs[2]
    assert 1.6 < errs[0] / errs[1] < 2.4 and 1.6 < errs[1] / errs[2] < 2.4
    s = steiner_2d_check(B, F(1, 2), F(1, 64))
    assert s.measured_bracket[0] <= s.predicted_area <= s.measured_bracket[1]
    assert s.offset_area == pytest.approx(s.predicted_area, rel=1e-12)
    assert s.offset_perimeter == pytest.approx(s.predicted_perimeter, rel=1e-12)


def test_steiner_3d_forms():
    s = steiner_3d_closed_forms("box", (1, 2, 3), F(1, 2), F(1, 16))
    assert s.measured_bracket[0] <= s.predicted_volume <= s.measured_bracket[1]
    b = steiner_3d_closed_forms("ball", 1, F(1, 2))
    assert b.predicted_volume == pytest.approx(4 * math.pi / 3 * 1.5**3)
    with pytest.raises(InvalidInput):
        steiner_3d_closed_forms("torus", 1, 1)


@pytest.mark.parametrize("pts", [[(0, 0), (2, 0), (2, 1), (0, 1)], [(0, 0), (3, 0), (1, 2)]])
def test_kakeya_agrees(pts):
    rep = kakeya_equivalence_check(ConvexPolytope.from_points(pts))
    assert rep.agree


def test_shape_functionals_of_triangle():
    s = shape_functionals(ConvexPolytope.from_points([(0, 0), (2, 0), (0, 2)]))
    assert s.A == 2 and s.D ** 2 == pytest.approx(8)
    assert s.W == pytest.approx(math.sqrt(2))
    assert s.r_in == pytest.approx(2 - math.sqrt(2))
    assert s.R == pytest.approx(math.sqrt(2))
    x, y = s.bs_point
    assert 0 < x <= 0.5 + 1e-12 and y <= 1


def test_min_enclosing_circle():
    c, r = min_enclosing_circle([(0, 0), (4, 0), (2, 1), (2, -1)])
    assert r == pytest.approx(2) and c == pytest.approx((2, 0))


def test_corollary_on_square_sandwich():
    trace = iterate_process(sandwich(box((0, 0), (1, 1)), F(1, 8)), 4, metrics=False)
    v = corollary_range_check(trace, "coord0", F(1, 4))
    assert v.ok and (v.m, v.M) == (-0.5, 0.5)
    assert all(covers and inside for _, covers, inside in v.per_n)


def test_family_of_just_u_matches_the_first_bound():
    U = fringed_square()
    b1 = theorem1_bound(U, truth=False)
    b2 = theorem2_bound(U, family=lambda U: [("U", U)], truth=False)
    assert b2.bound_value == b1.bound_value and b2.best_subset == "U"
