"""Finite-dimensional probability theories: states, effects and their symmetries.

Coordinates follow the normal parametrization: a state is a column vector
whose last entry is 1, an effect is a covector, and the outcome probability is
their dot product.  For polygon theories the unit effect is ``(0, 0, 1)`` and
unbiased effects live on the plane ``z = 1/2``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import (
    DEDUP_TOL,
    TOL,
    ConvexPolygon2D,
    HalfSpace,
    enumerate_polytope_vertices,
    hull_halfspaces,
)
from .simplex import lp_feasible_arrays

MAX_CLASSICAL_LEVELS = 12


class DegenerateHyperplaneError(ValueError):
    """Too few affinely independent nontrivial extremal effects to fix a hyperplane."""


class StateSpaceUnavailable(ValueError):
    """The operation needs states but the theory was given by its effects only."""


@dataclass(frozen=True)
class Hyperplane:
    """``{e : normal . e = offset}`` with a unit normal."""

    normal: tuple[float, ...]
    offset: float
    residual: float = 0.0

    def contains(self, e, tol: float = TOL) -> bool:
        return abs(float(np.dot(self.normal, e)) - self.offset) <= tol


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Theory:
    """A state space together with its (maximal, unless effect-space-first) effect space.

    ``extremal_states`` is ``None`` for theories specified directly by their
    extremal effects; in that case effect membership uses ``effect_facets``.
    """

    name: str
    d: int
    extremal_states: Optional[np.ndarray]
    unit: np.ndarray
    zero: np.ndarray
    extremal_effects: np.ndarray
    reflecting_hyperplane: Optional[Hyperplane] = None
    effect_facets: Optional[tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)
    presentation: Optional[dict] = field(default=None, repr=False)

    @property
    def has_states(self) -> bool:
        return self.extremal_states is not None

    def nontrivial_effects(self) -> np.ndarray:
        X = self.extremal_effects
        far = (np.abs(X - self.zero).max(axis=1) > DEDUP_TOL) & (np.abs(X - self.unit).max(axis=1) > DEDUP_TOL)
        return X[far]

    def effect_constraints(self) -> tuple[np.ndarray, np.ndarray]:
        """``(A, b)`` with ``A e <= b`` exactly describing the effect space."""
        if self.has_states:
            W = self.extremal_states
            return np.vstack([W, -W]), np.concatenate([np.ones(len(W)), np.zeros(len(W))])
        return self.effect_facets

    def index_of(self, e, tol: float = DEDUP_TOL) -> Optional[int]:
        hits = np.flatnonzero(np.abs(self.extremal_effects - np.asarray(e)).max(axis=1) <= tol)
        return int(hits[0]) if len(hits) else None


def probability(e, w) -> float:
    e = np.asarray(e, dtype=float)
    w = np.asarray(w, dtype=float)
    if e.shape != w.shape:
        raise ValueError(f"dimension mismatch: effect {e.shape} vs state {w.shape}")
    return float(e @ w)


def effect_complement(t: Theory, e) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    if e.shape != t.unit.shape:
        raise ValueError(f"dimension mismatch: effect {e.shape} vs theory dimension {t.d}")
    return t.unit - e


def is_effect(t: Theory, e, tol: float = TOL) -> bool:
    e = np.asarray(e, dtype=float)
    if e.shape != (t.d,):
        return False
    A, b = t.effect_constraints()
    return bool(np.all(A @ e <= b + tol))


def theory_from_states(name, states, unit, presentation=None, effects=None) -> Theory:
    states = _frozen(states)
    unit = _frozen(unit)
    d = len(unit)
    bad = np.abs(states @ unit - 1.0) > TOL
    if bad.any():
        raise ValueError("unit effect does not evaluate to 1 on every state")
    t = Theory(name, d, states, unit, _frozen(np.zeros(d)), _frozen(np.zeros((0, d))),
               presentation=presentation)
    effects = _frozen(extremal_effects(t) if effects is None else effects)
    object.__setattr__(t, "extremal_effects", effects)
    object.__setattr__(t, "reflecting_hyperplane", hyperplane_or_none(t))
    return t


def hyperplane_or_none(t: Theory) -> Optional[Hyperplane]:
    try:
        return find_reflecting_hyperplane(t)
    except DegenerateHyperplaneError:
        return None


def extremal_effects(t: Theory) -> np.ndarray:
    """Vertices of ``{e : 0 <= e . w <= 1 for every extremal state w}``."""
    if not t.has_states:
        raise StateSpaceUnavailable(f"{t.name} has no state space to enumerate from")
    A, b = t.effect_constraints()
    hs = [HalfSpace(tuple(row), bi) for row, bi in zip(A, b)]
    return enumerate_polytope_vertices(hs, t.d) + 0.0


def polygon_states(n: int) -> np.ndarray:
    ang = 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(ang), np.sin(ang), np.ones(n)])


def build_regular_polygon_theory(n: int) -> Theory:
    """Regular ``n``-gon state space with pure states at angles ``2k pi / n`` on ``z = 1``."""
    if int(n) != n or n < 3:
        raise ValueError(f"polygon theory needs n >= 3, got {n}")
    return theory_from_states(f"polygon-{n}", polygon_states(int(n)), (0.0, 0.0, 1.0), {"polygon_n": int(n)})


def build_classical_theory(n: int) -> Theory:
    if int(n) != n or n < 2:
        raise ValueError(f"classical theory needs n >= 2 levels, got {n}")
    if n > MAX_CLASSICAL_LEVELS:
        raise ValueError(f"classical theory limited to n <= {MAX_CLASSICAL_LEVELS} ({2 ** n} extremal effects)")
    n = int(n)
    states = _frozen(np.eye(n))
    effects = _frozen(np.array(list(itertools.product((0.0, 1.0), repeat=n))))
    t = Theory(f"classical-{n}", n, states, _frozen(np.ones(n)), _frozen(np.zeros(n)), effects)
    object.__setattr__(t, "reflecting_hyperplane", hyperplane_or_none(t))
    return t


# Square bit in its native four-level presentation.  Row order and effect
# labels are chosen so square_bit_probability_table gives the standard table.
SQUARE_BIT_STATES_4 = np.array([
    [3, -1, 1, 1],
    [1, 1, -1, 3],
    [1, 1, 3, -1],
    [-1, 3, 1, 1],
]) / 4.0
SQUARE_BIT_EFFECTS_4 = np.array([
    [1, 0, 0, 1],
    [0, 1, 1, 0],
    [0, 1, 0, 1],
    [1, 0, 1, 0],
], dtype=float)

# (x, y, z) = EFFECT_TO_NORMAL @ e4 on the subspace e1 + e2 = e3 + e4
SQUARE_BIT_EFFECT_TO_NORMAL = np.array([
    [0.5, -0.5, 0.0, 0.0],
    [0.0, 0.0, 0.5, -0.5],
    [0.5, 0.5, 0.0, 0.0],
])
SQUARE_BIT_STATE_TO_NORMAL = np.array([
    [1.0, -1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, -1.0],
    [1.0, 1.0, 1.0, 1.0],
])


def square_bit_effect_to_normal(e4) -> np.ndarray:
    e4 = np.asarray(e4, dtype=float)
    if abs(e4[0] + e4[1] - e4[2] - e4[3]) > TOL:
        raise ValueError("square-bit effects satisfy e1 + e2 = e3 + e4")
    return SQUARE_BIT_EFFECT_TO_NORMAL @ e4


def square_bit_effect_from_normal(e) -> np.ndarray:
    x, y, z = e
    return np.array([z + x, z - x, z + y, z - y])


def square_bit_state_to_normal(w4) -> np.ndarray:
    return SQUARE_BIT_STATE_TO_NORMAL @ np.asarray(w4, dtype=float)


def square_bit_state_from_normal(w) -> np.ndarray:
    sx, sy, _ = w
    return np.array([0.25 + sx / 2, 0.25 - sx / 2, 0.25 + sy / 2, 0.25 - sy / 2])


def build_square_bit() -> Theory:
    states = np.array([square_bit_state_to_normal(w) for w in SQUARE_BIT_STATES_4])
    effects = np.array([square_bit_effect_to_normal(e) for e in SQUARE_BIT_EFFECTS_4])
    presentation = {
        "states_4": SQUARE_BIT_STATES_4.copy(),
        "effects_4": SQUARE_BIT_EFFECTS_4.copy(),
        "labeled_effects": effects,
        "effect_to_normal": SQUARE_BIT_EFFECT_TO_NORMAL.copy(),
        "state_to_normal": SQUARE_BIT_STATE_TO_NORMAL.copy(),
    }
    return theory_from_states("square-bit", states, (0.0, 0.0, 1.0), presentation)


def square_bit_probability_table(t: Theory) -> np.ndarray:
    """4x6 table of ``<e, w^i>`` with columns ``o, e1, e2, e3, e4, u``."""
    if t.presentation is None or "labeled_effects" not in t.presentation:
        raise ValueError(f"{t.name} is not a square-bit theory")
    cols = np.vstack([t.zero, t.presentation["labeled_effects"], t.unit])
    return t.extremal_states @ cols.T


def closed_form_extremal_effects(n: int) -> np.ndarray:
    """Closed-form extremal effects of the ``n``-gon theory (zero, nontrivial, unit)."""
    if n < 3:
        raise ValueError("n >= 3")
    rows = [np.zeros(3)]
    theta = 2 * np.pi * np.arange(n) / n
    if n % 2:
        c = math.cos((n - 1) * math.pi / n)
        s = 1.0 / (1.0 - c)
        for th in theta:
            rows.append(s * np.array([math.cos(th), math.sin(th), -c]))
        for th in theta:
            rows.append(s * np.array([-math.cos(th), -math.sin(th), 1.0]))
    else:
        tn = math.tan(math.pi / n)
        for th in theta:
            rows.append(0.5 * np.array([math.cos(th) + tn * math.sin(th), -math.sin(th) + tn * math.cos(th), 1.0]))
    rows.append(np.array([0.0, 0.0, 1.0]))
    return np.array(rows)


def build_displaced_hexagon(delta: float) -> Theory:
    """Hexagon effect space with the ``k = 0`` / ``k = 3`` pair pushed off ``z = 1/2`` by ``+-delta``."""
    if not 0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    base = closed_form_extremal_effects(6)
    effects = base.copy()
    # rows: 0 zero, 1..6 on-plane k = 0..5, 7 unit
    effects[1, 2] += delta
    effects[4, 2] -= delta
    facets = hull_halfspaces(effects)
    A = np.array([f.normal for f in facets])
    b = np.array([f.offset for f in facets])
    t = Theory(f"displaced-hexagon-{delta:g}", 3, None, _frozen((0.0, 0.0, 1.0)), _frozen(np.zeros(3)),
               _frozen(effects), effect_facets=(_frozen(A), _frozen(b)), presentation={"delta": float(delta)})
    object.__setattr__(t, "reflecting_hyperplane", hyperplane_or_none(t))
    return t


def theory_from_effects(name: str, effects, unit) -> Theory:
    effects = _frozen(effects)
    facets = hull_halfspaces(effects)
    A = np.array([f.normal for f in facets])
    b = np.array([f.offset for f in facets])
    unit = _frozen(unit)
    t = Theory(name, len(unit), None, unit, _frozen(np.zeros(len(unit))), effects,
               effect_facets=(_frozen(A), _frozen(b)))
    object.__setattr__(t, "reflecting_hyperplane", hyperplane_or_none(t))
    return t


def find_reflecting_hyperplane(t: Theory) -> Optional[Hyperplane]:
    """Hyperplane through ``u/2`` holding every nontrivial extremal effect, or ``None``.

    Least-squares fit over the centred nontrivial extremals; accepted when the
    largest residual is below ``TOL``.
    """
    X = t.nontrivial_effects()
    center = t.unit / 2
    D = X - center
    sv = np.linalg.svd(D, compute_uv=False) if len(D) else np.zeros(0)
    rank = int(np.sum(sv > 1e-9))
    if rank < t.d - 1:
        raise DegenerateHyperplaneError(
            f"{t.name}: nontrivial extremals span only {rank} directions around the center")
    _, _, vt = np.linalg.svd(D, full_matrices=True)
    normal = vt[-1]
    residual = float(np.max(np.abs(D @ normal)))
    if residual >= TOL:
        return None
    pivot = int(np.argmax(np.abs(normal)))
    if normal[pivot] < 0:
        normal = -normal
    normal = normal + 0.0
    return Hyperplane(tuple(float(v) for v in normal), float(normal @ center), residual)


def in_convex_hull(points, p, tol: float = TOL) -> bool:
    """LP test ``p in conv(points)``, equalities relaxed by ``tol``."""
    P = np.asarray(points, dtype=float)
    p = np.asarray(p, dtype=float)
    k, d = P.shape
    M = np.vstack([P.T, np.ones(k)])
    rhs = np.append(p, 1.0)
    A = np.vstack([M, -M, -np.eye(k)])
    b = np.concatenate([rhs + tol, -rhs + tol, np.zeros(k)])
    ok, _ = lp_feasible_arrays(A, b)
    return ok


def is_state_space_point_symmetric(t: Theory, tol: float = TOL) -> bool:
    """Whether the reflection of every extremal state through the state centroid is a state."""
    if not t.has_states:
        raise StateSpaceUnavailable(f"{t.name} has no explicit state space")
    W = t.extremal_states
    c = W.mean(axis=0)
    return all(in_convex_hull(W, 2 * c - w, tol) for w in W)


def is_edge(t: Theory, e1, e2) -> bool:
    """Whether the segment between two extremal effects is a one-dimensional face.

    For extremal endpoints, the midpoint admits a decomposition with weight on
    some other extremal effect exactly when the hull of the other extremals
    meets the line through ``e1`` and ``e2``.
    """
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    X = t.extremal_effects
    keep = (np.abs(X - e1).max(axis=1) > DEDUP_TOL) & (np.abs(X - e2).max(axis=1) > DEDUP_TOL)
    others = X[keep]
    if len(others) == 0:
        return True
    k = len(others)
    # variables: weights (k) then line parameter s;  sum w x - s (e2 - e1) = e1
    M = np.hstack([others.T, -(e2 - e1)[:, None]])
    ones = np.append(np.ones(k), 0.0)
    eq = np.vstack([M, ones])
    rhs = np.append(e1, 1.0)
    nonneg = np.hstack([-np.eye(k), np.zeros((k, 1))])
    A = np.vstack([eq, -eq, nonneg])
    b = np.concatenate([rhs + TOL, -rhs + TOL, np.zeros(k)])
    ok, _ = lp_feasible_arrays(A, b)
    return not ok


def _plane_basis(normal: np.ndarray) -> np.ndarray:
    if abs(abs(normal[-1]) - 1.0) < TOL:
        return np.eye(len(normal))[:-1]
    _, _, vt = np.linalg.svd(normal[None, :])
    return vt[1:]


def unbiased_cross_section(t: Theory) -> ConvexPolygon2D:
    """Slice of the effect polytope by its reflecting hyperplane, in plane coordinates."""
    hp = t.reflecting_hyperplane
    if hp is None:
        raise ValueError(f"{t.name} has no reflecting hyperplane")
    if t.d != 3:
        raise ValueError("cross-section is defined for three-dimensional effect spaces")
    normal = np.asarray(hp.normal)
    X = t.extremal_effects
    side = X @ normal - hp.offset
    pts = list(X[np.abs(side) <= TOL])
    for i, j in itertools.combinations(range(len(X)), 2):
        if side[i] * side[j] < 0 and abs(side[i]) > TOL and abs(side[j]) > TOL:
            s = side[i] / (side[i] - side[j])
            pts.append(X[i] + s * (X[j] - X[i]))
    basis = _plane_basis(normal)
    return ConvexPolygon2D.from_points(np.array(pts) @ basis.T)


def fit_affine_map(src, dst, fixed: Optional[tuple[int, int]] = None):
    """Best affine map sending the point set ``src`` onto ``dst`` over all matchings.

    Returns ``(M, perm, residual)`` where ``M`` is the ``(d+1)x(d+1)`` augmented
    matrix acting on row vectors ``[x, 1]`` and ``dst[perm[i]]`` is the image of
    ``src[i]``.  ``fixed=(i, j)`` forces ``src[i] -> dst[j]``.
    """
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    if src.shape != dst.shape:
        raise ValueError("point sets must have equal shapes")
    m, d = src.shape
    S = np.hstack([src, np.ones((m, 1))])
    best = None
    for perm in itertools.permutations(range(m)):
        if fixed is not None and perm[fixed[0]] != fixed[1]:
            continue
        Y = dst[list(perm)]
        coef, *_ = np.linalg.lstsq(S, Y, rcond=None)
        res = float(np.max(np.abs(S @ coef - Y)))
        if best is None or res < best[2]:
            M = np.zeros((d + 1, d + 1))
            M[:, :d] = coef
            M[d, d] = 1.0
            best = (M, perm, res)
    return best
