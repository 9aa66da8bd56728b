import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gptcoexist.geometry import (
    ConvexPolygon2D,
    EmptyPolytopeError,
    HalfPlane2D,
    HalfSpace,
    UnboundedPolytopeError,
    Vec2,
    clip_halfplane,
    contains_point,
    enumerate_polytope_vertices,
    hull_halfspaces,
    intersect_halfplanes,
    minkowski_sum,
    polygon_area,
    regular_constraint_halfplanes,
    regular_constraint_polygon,
    support,
)

SQUARE = ConvexPolygon2D.from_points([(0, 0), (1, 0), (1, 1), (0, 1)])


def same_vertex_set(a, b, tol=1e-9):
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    if len(a) != len(b):
        return False
    if len(a) == 0:
        return True
    d = np.abs(a[:, None, :] - b[None, :, :]).max(axis=2)
    return bool(d.min(axis=1).max() <= tol and d.min(axis=0).max() <= tol)


# ---- oracle examples ----

def test_clip_bisects_square():
    out = clip_halfplane(SQUARE, HalfPlane2D((1, 0), 0.5))
    assert same_vertex_set(out.vertices, [(0, 0), (0.5, 0), (0.5, 1), (0, 1)])


def test_clip_nonbinding_keeps_square():
    assert same_vertex_set(clip_halfplane(SQUARE, HalfPlane2D((1, 0), 2)).vertices, SQUARE.vertices)


def test_clip_infeasible_gives_empty():
    assert clip_halfplane(SQUARE, HalfPlane2D((1, 0), -1)).is_empty


def test_intersect_box():
    bound = ConvexPolygon2D.from_points([(-5, -5), (5, -5), (5, 5), (-5, 5)])
    hps = [HalfPlane2D((1, 0), 0.5), HalfPlane2D((-1, 0), 0.5), HalfPlane2D((0, 1), 0.5), HalfPlane2D((0, -1), 0.5)]
    out = intersect_halfplanes(hps, bound)
    assert same_vertex_set(out.vertices, [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)])


def test_intersect_empty_list_is_identity():
    assert same_vertex_set(intersect_halfplanes([], SQUARE).vertices, SQUARE.vertices)


def test_intersect_octagon_matches_trig_formula():
    bound = ConvexPolygon2D.from_points([(-2, -2), (2, -2), (2, 2), (-2, 2)])
    out = intersect_halfplanes(regular_constraint_halfplanes(8, 0.5), bound)
    r = 0.5 / math.cos(math.pi / 8)
    expected = [(r * math.cos((2 * k + 1) * math.pi / 8), r * math.sin((2 * k + 1) * math.pi / 8)) for k in range(8)]
    assert same_vertex_set(out.vertices, expected)


def test_minkowski_square_square():
    out = minkowski_sum(SQUARE, SQUARE)
    assert same_vertex_set(out.vertices, [(0, 0), (2, 0), (2, 2), (0, 2)])
    assert polygon_area(out) == pytest.approx(4.0)


def test_minkowski_with_point_translates():
    pt = ConvexPolygon2D([(0.3, -0.2)])
    assert same_vertex_set(minkowski_sum(SQUARE, pt).vertices, SQUARE.translated((0.3, -0.2)).vertices)


def test_minkowski_orthogonal_segments():
    a = ConvexPolygon2D.from_points([(0, 0), (1, 0)])
    b = ConvexPolygon2D.from_points([(0, 0), (0, 1)])
    assert same_vertex_set(minkowski_sum(a, b).vertices, SQUARE.vertices)


def test_area_examples():
    assert polygon_area(SQUARE) == pytest.approx(1.0)
    assert polygon_area(ConvexPolygon2D.empty()) == 0.0
    octagon = regular_constraint_polygon(8, 0.5)
    assert polygon_area(octagon) == pytest.approx(8 * 0.25 * math.tan(math.pi / 8), abs=1e-12)


def test_degenerate_areas_are_zero():
    assert polygon_area(ConvexPolygon2D([(1, 1)])) == 0.0
    assert polygon_area(ConvexPolygon2D.from_points([(0, 0), (1, 1)])) == 0.0


@pytest.mark.parametrize("pt,inside", [((0.5, 0.5), True), ((1.0, 1.0), True), ((1.1, 0.5), False)])
def test_contains_point_square(pt, inside):
    assert contains_point(SQUARE, pt) is inside


def test_contains_point_degenerate():
    seg = ConvexPolygon2D.from_points([(0, 0), (1, 0)])
    assert contains_point(seg, (0.5, 0.0))
    assert not contains_point(seg, (0.5, 0.01))
    assert contains_point(ConvexPolygon2D([(0.2, 0.3)]), Vec2(0.2, 0.3))
    assert not contains_point(ConvexPolygon2D.empty(), (0, 0))


def test_regular_constraint_polygon_examples():
    assert same_vertex_set(regular_constraint_polygon(4, 0.5).vertices,
                           [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)])
    point = regular_constraint_polygon(6, 0.0, (0.1, -0.2))
    assert same_vertex_set(point.vertices, [(0.1, -0.2)])
    hexagon = regular_constraint_polygon(6, 0.5)
    assert np.allclose(np.linalg.norm(hexagon.vertices, axis=1), 0.5 / math.cos(math.pi / 6))


def test_vertex_enumeration_unit_cube():
    hs = []
    for i in range(3):
        n = [0.0] * 3
        n[i] = 1.0
        hs.append(HalfSpace(tuple(n), 1.0))
        n[i] = -1.0
        hs.append(HalfSpace(tuple(n), 0.0))
    v = enumerate_polytope_vertices(hs, 3)
    assert len(v) == 8
    assert set(map(tuple, np.round(v).astype(int))) == {(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)}


def test_vertex_enumeration_errors():
    with pytest.raises(EmptyPolytopeError):
        enumerate_polytope_vertices([HalfSpace((1, 0), -1), HalfSpace((-1, 0), -1),
                                     HalfSpace((0, 1), 1), HalfSpace((0, -1), 1)], 2)
    with pytest.raises(UnboundedPolytopeError):
        enumerate_polytope_vertices([HalfSpace((1, 0), 1), HalfSpace((0, 1), 1), HalfSpace((0, -1), 1)], 2)


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError):
        HalfPlane2D((0, 0), 1)
    with pytest.raises(ValueError):
        Vec2(float("nan"), 0)


# ---- properties ----

coord = st.floats(-2, 2, allow_nan=False)
points = st.lists(st.tuples(coord, coord), min_size=3, max_size=12)
angles = st.floats(0, 2 * math.pi)


def poly_from(pts):
    return ConvexPolygon2D.from_points(pts)


@settings(max_examples=60, deadline=None)
@given(points, angles, st.floats(-1, 1))
def test_clip_idempotent(pts, theta, c):
    p = poly_from(pts)
    hp = HalfPlane2D((math.cos(theta), math.sin(theta)), c)
    once = clip_halfplane(p, hp)
    twice = clip_halfplane(once, hp)
    assert same_vertex_set(once.vertices, twice.vertices)


@settings(max_examples=60, deadline=None)
@given(points, points)
def test_minkowski_commutes(a, b):
    p, q = poly_from(a), poly_from(b)
    assert same_vertex_set(minkowski_sum(p, q).vertices, minkowski_sum(q, p).vertices)


@settings(max_examples=60, deadline=None)
@given(points, points)
def test_support_additive(a, b):
    p, q = poly_from(a), poly_from(b)
    s = minkowski_sum(p, q)
    for k in range(16):
        u = (math.cos(2 * math.pi * k / 16), math.sin(2 * math.pi * k / 16))
        assert support(s, u) == pytest.approx(support(p, u) + support(q, u), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(points, st.integers(0, 11), angles)
def test_area_invariant_under_roll_and_rotation(pts, shift, theta):
    p = poly_from(pts)
    a = polygon_area(p)
    rolled = ConvexPolygon2D(np.roll(p.vertices, shift % max(len(p), 1), axis=0))
    assert polygon_area(rolled) == pytest.approx(a, abs=1e-9)
    R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    rotated = ConvexPolygon2D(p.vertices @ R.T)
    assert polygon_area(rotated) == pytest.approx(a, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(coord, coord, coord), min_size=4, max_size=9), st.integers(0, 2**31))
def test_vertex_enumeration_round_trip(pts, seed):
    pts = np.array(pts)
    centred = pts - pts.mean(axis=0)
    if np.linalg.matrix_rank(centred, tol=1e-3) < 3:
        return
    hs = hull_halfspaces(pts)
    v = enumerate_polytope_vertices(hs, 3)
    hs2 = hull_halfspaces(v)
    A1 = np.array([h.normal for h in hs]); b1 = np.array([h.offset for h in hs])
    A2 = np.array([h.normal for h in hs2]); b2 = np.array([h.offset for h in hs2])
    rng = np.random.default_rng(seed)
    probes = rng.uniform(-2.5, 2.5, (1000, 3))
    m1 = A1 @ probes.T - b1[:, None]
    m2 = A2 @ probes.T - b2[:, None]
    # skip probes within rounding distance of a facet
    clear = (np.abs(m1).min(axis=0) > 1e-7) & (np.abs(m2).min(axis=0) > 1e-7)
    in1 = (m1 <= 0).all(axis=0)
    in2 = (m2 <= 0).all(axis=0)
    assert np.array_equal(in1[clear], in2[clear])
