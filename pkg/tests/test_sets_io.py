import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steinhaus import (Ball, BudgetExceeded, ConvexPolytope, EmptySet, GridSandwich, GridSet,
                       IntervalUnion, InvalidInput, PointSet, box, sandwich)
from steinhaus import io as sio
from steinhaus.sets import canonicalize

fracs = st.fractions(min_value=-8, max_value=8, max_denominator=16)


# --------------------------------------------------------------------------
# canonical forms


def test_interval_union_merges_touching_and_overlapping():
    K = canonicalize([(F(2), F(3)), (F(0), F(1)), (F(1), F(3, 2)), (F(5, 2), F(4))])
    assert K.intervals == [(F(0), F(3, 2)), (F(2), F(4))]


def test_degenerate_intervals_are_points():
    K = IntervalUnion.from_pairs([(1, 1), (0, F(1, 2))])
    assert K.intervals == [(F(0), F(1, 2)), (F(1), F(1))]
    assert K.contains_point(1) and not K.contains_point(F(3, 4))


def test_pointset_dedupes_and_shares_one_denominator():
    P = PointSet.from_points([(F(1, 2), 0), (F(1, 2), 0), (F(1, 3), 1)])
    assert len(P.numer) == 2
    assert P.denom == 6


def test_pointset_equality_ignores_representation():
    a = PointSet.from_points([(0, 1), (F(1, 2), 2)])
    b = PointSet.from_points([(F(2, 4), 2), (0, 1)])
    assert a == b and hash(a) == hash(b)


def test_empty_inputs_raise():
    with pytest.raises(EmptySet):
        PointSet.from_points([])
    with pytest.raises(EmptySet):
        GridSet.from_cells([], F(1, 2))


def test_mixed_dimensions_rejected():
    with pytest.raises(InvalidInput):
        PointSet.from_points([(0, 1), (2,)])


def test_overflow_guard():
    with pytest.raises(BudgetExceeded):
        PointSet.from_points([(2**63,)])


def test_from_vertices_rejects_non_convex():
    with pytest.raises(InvalidInput):
        ConvexPolytope.from_vertices([(0, 0), (2, 0), (1, F(1, 4)), (1, 2)])


def test_grid_from_cells_accepts_arrays():
    cells = np.array([[0, 0], [1, 2]])
    assert GridSet.from_cells(cells, F(1, 4)) == GridSet.from_cells([(0, 0), (1, 2)], F(1, 4))


def test_grid_equality_across_refinement():
    G = GridSet.from_cells([(0, 0), (0, 1)], F(1, 2))
    assert G.refine(2).count == 8
    assert G.refine(2).issubset(G.refine(2))


# --------------------------------------------------------------------------
# JSON round trip


def _roundtrip(K, mode="exact"):
    return sio.set_from_json(json.loads(json.dumps(sio.set_to_json(K, mode))))


@given(st.lists(st.tuples(fracs, fracs), min_size=1, max_size=8))
@settings(max_examples=60, deadline=None)
def test_intervals_roundtrip(pairs):
    K = canonicalize([(min(a, b), max(a, b)) for a, b in pairs])
    assert _roundtrip(K) == K


@given(st.lists(st.tuples(fracs, fracs), min_size=1, max_size=12))
@settings(max_examples=60, deadline=None)
def test_points_roundtrip(pts):
    K = PointSet.from_points(pts)
    assert _roundtrip(K) == K


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=1, max_size=20),
       st.sampled_from([F(1), F(1, 2), F(1, 3), F(3, 8)]))
@settings(max_examples=60, deadline=None)
def test_grid_roundtrip(cells, h):
    K = GridSet.from_cells(cells, h)
    assert _roundtrip(K) == K


def test_polytope_sandwich_ball_roundtrip():
    B = box((0, 0), (1, F(1, 3)))
    assert _roundtrip(B) == B
    S = sandwich(B, F(1, 8))
    R = _roundtrip(S)
    assert isinstance(R, GridSandwich) and R == S
    ball = Ball((F(1, 2), 0), F(3, 4))
    assert _roundtrip(ball) == ball


def test_float_mode_emits_numbers():
    doc = sio.set_to_json(PointSet.from_points([(F(1, 4), 1)]), "float")
    assert doc["points"] == [[0.25, 1]] or doc["points"] == [[0.25, 1.0]]
    assert doc["schema_version"] == sio.SCHEMA_VERSION


@pytest.mark.parametrize("doc", [
    {"kind": "nope", "dimension": 2},
    {"kind": "points", "dimension": 4, "points": [[1, 2, 3, 4]]},
    {"kind": "points", "dimension": 2, "points": [[1]]},
    {"kind": "points", "dimension": 2, "points": []},
    {"kind": "grid", "dimension": 2, "h": "0", "cells": [[0, 0]]},
    {"kind": "grid", "dimension": 2, "h": "1/2", "cells": [[0, 0.5]]},
    {"kind": "intervals", "intervals": [["a", "b"]]},
    {"kind": "ball", "dimension": 2, "center": ["0", "0"], "radius": "-1"},
    [1, 2],
])
def test_malformed_documents(doc):
    with pytest.raises(InvalidInput):
        sio.set_from_json(doc)


def test_load_set_reports_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{\"kind\": ")
    with pytest.raises(InvalidInput, match="malformed"):
        sio.load_set(p)


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "sub" / "a.json"
    sio.write_json(target, {"x": 1})
    sio.write_json(target, {"x": 2})
    assert json.loads(target.read_text()) == {"x": 2}
    assert [p.name for p in target.parent.iterdir()] == ["a.json"]


def test_atomic_write_failure_keeps_old_file(tmp_path):
    target = tmp_path / "a.json"
    sio.write_json(target, {"x": 1})
    with pytest.raises(TypeError):
        sio.write_json(target, {"x": object()})
    assert json.loads(target.read_text()) == {"x": 1}
    assert [p.name for p in tmp_path.iterdir()] == ["a.json"]
