import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gptcoexist.geometry import contains_point, polygon_area, regular_constraint_polygon
from gptcoexist.serialize import theory_from_json, theory_to_json
from gptcoexist.theory import (
    build_classical_theory,
    build_displaced_hexagon,
    build_regular_polygon_theory,
    build_square_bit,
    effect_complement,
    find_reflecting_hyperplane,
    fit_affine_map,
    is_edge,
    is_effect,
    is_state_space_point_symmetric,
    probability,
    square_bit_effect_from_normal,
    square_bit_effect_to_normal,
    square_bit_probability_table,
    square_bit_state_from_normal,
    square_bit_state_to_normal,
    closed_form_extremal_effects,
    unbiased_cross_section,
)

SQUARE_BIT_TABLE = np.array([
    [0, 1, 0, 0, 1, 1],
    [0, 1, 0, 1, 0, 1],
    [0, 0, 1, 0, 1, 1],
    [0, 0, 1, 1, 0, 1],
], dtype=float)


def row_set_equal(a, b, tol=1e-9):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    d = np.abs(a[:, None, :] - b[None, :, :]).max(axis=2)
    return bool(d.min(axis=1).max() <= tol and d.min(axis=0).max() <= tol)


def all_theories():
    out = [build_regular_polygon_theory(n) for n in range(3, 13)]
    out += [build_classical_theory(n) for n in (2, 3, 4)]
    out += [build_square_bit(), build_displaced_hexagon(0.25)]
    return out


# ---- oracle examples ----

def test_square_bit_table_matches_published_values():
    t = build_square_bit()
    assert np.array_equal(square_bit_probability_table(t), SQUARE_BIT_TABLE)
    assert len(t.extremal_effects) == 6


def test_square_bit_probability_examples():
    t = build_square_bit()
    table = square_bit_probability_table(t)
    assert table[0, 1] == 1.0  # e1 on the first state
    assert table[0, 2] == 0.0  # e2 on the first state


def test_square_bit_affinely_equivalent_to_square_polygon():
    sq = build_square_bit()
    p4 = build_regular_polygon_theory(4)
    fixed = (sq.index_of(sq.unit), p4.index_of(p4.unit))
    M, perm, residual = fit_affine_map(sq.extremal_effects, p4.extremal_effects, fixed=fixed)
    assert residual < 1e-9
    assert np.linalg.matrix_rank(M[:3, :3]) == 3
    assert np.allclose(np.append(sq.unit, 1.0) @ M, np.append(p4.unit, 1.0), atol=1e-9)


def test_square_bit_conversion_round_trips():
    e4 = np.array([1.0, 0.0, 0.0, 1.0])
    assert np.allclose(square_bit_effect_from_normal(square_bit_effect_to_normal(e4)), e4)
    w4 = np.array([3, -1, 1, 1]) / 4
    assert np.allclose(square_bit_state_from_normal(square_bit_state_to_normal(w4)), w4)


@pytest.mark.parametrize("n,k,expected", [
    (4, 0, (0.5, 0.5, 0.5)),
    (6, 0, (0.5, 0.5 * math.tan(math.pi / 6), 0.5)),
    (3, 0, (2 / 3, 0.0, 1 / 3)),
])
def test_closed_form_rows(n, k, expected):
    t = build_regular_polygon_theory(n)
    assert t.index_of(expected, 1e-9) is not None
    assert np.allclose(closed_form_extremal_effects(n)[1 + k], expected, atol=1e-12)


@pytest.mark.parametrize("n,count", [(3, 8), (4, 6), (5, 12), (6, 8)])
def test_extremal_counts(n, count):
    assert len(build_regular_polygon_theory(n).extremal_effects) == count


@pytest.mark.parametrize("n", range(3, 13))
def test_enumeration_matches_closed_form(n):
    assert row_set_equal(build_regular_polygon_theory(n).extremal_effects, closed_form_extremal_effects(n))


def test_classical_counts():
    assert len(build_classical_theory(2).extremal_effects) == 4
    assert len(build_classical_theory(3).extremal_effects) == 8
    with pytest.raises(ValueError):
        build_classical_theory(13)


def test_polygon_precondition():
    with pytest.raises(ValueError):
        build_regular_polygon_theory(2)


def test_complement_examples():
    t = build_regular_polygon_theory(6)
    assert np.allclose(effect_complement(t, t.unit), t.zero)
    assert np.allclose(effect_complement(t, t.unit / 2), t.unit / 2)
    rows = closed_form_extremal_effects(6)
    assert np.allclose(effect_complement(t, rows[1]), rows[4])


def test_is_effect_examples():
    t = build_regular_polygon_theory(6)
    assert is_effect(t, [0, 0, 0.5])
    assert not is_effect(t, [1, 0, 0.5])
    assert probability([1, 0, 0.5], [1, 0, 1]) == pytest.approx(1.5)
    for th in all_theories():
        assert is_effect(th, th.zero) and is_effect(th, th.unit)


def test_displaced_hexagon():
    h = build_displaced_hexagon(0.25)
    assert find_reflecting_hyperplane(h) is None
    e0, e3 = h.extremal_effects[1], h.extremal_effects[4]
    assert np.allclose(effect_complement(h, e0), e3)
    assert find_reflecting_hyperplane(build_displaced_hexagon(0.2)) is None
    with pytest.raises(ValueError):
        build_displaced_hexagon(0.6)


def test_reflecting_hyperplane_examples():
    hp = find_reflecting_hyperplane(build_regular_polygon_theory(6))
    assert hp is not None and hp.residual < 1e-9
    # plane z = 1/2 up to scale
    normal = np.asarray(hp.normal)
    assert np.allclose(normal / normal[2], [0, 0, 1], atol=1e-9)
    assert hp.offset / normal[2] == pytest.approx(0.5)
    assert find_reflecting_hyperplane(build_regular_polygon_theory(5)) is None


def test_point_symmetry_examples():
    assert is_state_space_point_symmetric(build_regular_polygon_theory(8))
    assert not is_state_space_point_symmetric(build_regular_polygon_theory(7))
    assert not is_state_space_point_symmetric(build_classical_theory(3))


def test_edge_examples():
    t = build_regular_polygon_theory(6)
    e0 = closed_form_extremal_effects(6)[1]
    assert is_edge(t, t.zero, e0)
    assert not is_edge(t, t.zero, t.unit)
    sq = build_regular_polygon_theory(4)
    assert is_edge(sq, [0.5, 0.5, 0.5], [0.5, -0.5, 0.5])


def test_cross_section_examples():
    sec4 = unbiased_cross_section(build_regular_polygon_theory(4))
    assert row_set_equal(sec4.vertices, np.array([(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)]))
    sec6 = unbiased_cross_section(build_regular_polygon_theory(6))
    assert polygon_area(sec6) == pytest.approx(polygon_area(regular_constraint_polygon(6, 0.5)), abs=1e-9)
    for n in (4, 6, 8, 10, 12):
        assert contains_point(unbiased_cross_section(build_regular_polygon_theory(n)), (0, 0))


# ---- invariants ----

@pytest.mark.parametrize("t", all_theories(), ids=lambda t: t.name)
def test_complement_of_extremal_is_extremal(t):
    for e in t.extremal_effects:
        assert t.index_of(effect_complement(t, e), 1e-9) is not None


@pytest.mark.parametrize("t", [th for th in all_theories() if th.has_states], ids=lambda t: t.name)
def test_unit_and_zero_pairing(t):
    W = t.extremal_states
    assert np.array_equal(W @ t.unit, np.ones(len(W)))
    assert np.array_equal(W @ t.zero, np.zeros(len(W)))


@pytest.mark.parametrize("t", [build_regular_polygon_theory(n) for n in range(3, 13)]
                         + [build_classical_theory(n) for n in (3, 4)], ids=lambda t: t.name)
def test_hyperplane_iff_point_symmetric(t):
    assert (find_reflecting_hyperplane(t) is not None) == is_state_space_point_symmetric(t)


def test_on_hyperplane_radius_tends_to_half():
    radii = []
    for n in range(4, 41, 2):
        e = closed_form_extremal_effects(n)[1]
        r = math.hypot(e[0], e[1])
        assert r == pytest.approx(0.5 / math.cos(math.pi / n), abs=1e-12)
        radii.append(r)
    assert all(a > b for a, b in zip(radii, radii[1:]))
    assert radii[-1] - 0.5 < 2e-3


@pytest.mark.parametrize("t", all_theories(), ids=lambda t: t.name)
def test_json_round_trip(t):
    back = theory_from_json(theory_to_json(t))
    assert np.abs(back.extremal_effects - t.extremal_effects).max() <= 1e-12
    assert back.d == t.d


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 12), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_complement_preserves_effect_membership(n, a, b, c):
    t = build_regular_polygon_theory(n)
    w = np.array([a, b, c]) + 1e-3
    w /= w.sum()
    e = w @ t.extremal_effects[[0, 1, -1]]
    assert is_effect(t, e)
    assert is_effect(t, effect_complement(t, e))
