"""Coexistence of effect pairs.

Three independent routes are provided:

* ``coexist_criterion_even_polygon`` evaluates the closed-form family of
  ``n**2`` linear inequalities for unbiased effects of an even polygon theory;
* ``coexist_oracle`` decides the definition directly (existence of effects
  ``g1, g2, g3`` with ``g1 + g2 = e``, ``g1 + g3 = f`` and
  ``g1 + g2 + g3 <= u``) by linear feasibility;
* ``busch_coexistent`` is the qubit criterion for unbiased effects.

Planar unbiased effects are passed as ``(x, y)``; the implied third coordinate
is 1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import (
    TOL,
    ConvexPolygon2D,
    HalfPlane2D,
    Vec2,
    contains_point,
    intersect_halfplanes,
    polygon_area,
    regular_constraint_halfplanes,
    regular_constraint_polygon,
)
from .simplex import FeasibilityProblem, lp_feasible_arrays
from .theory import Theory, effect_complement, is_effect

BUSCH_NORM_TOL = 1e-12


class OddPolygonError(ValueError):
    """The closed-form criterion only holds for even polygons."""


class OutsideUnbiasedPolygon(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CoexistenceVerdict:
    coexistent: bool
    witness: Optional[tuple[np.ndarray, np.ndarray, np.ndarray]] = None
    binding: Optional[list] = None
    slack: Optional[float] = None


@dataclass(frozen=True)
class BuschEffectPair:
    """Bloch vectors of two unbiased qubit effects ``(I + lambda . sigma) / 2``."""

    lambda1: tuple[float, ...]
    lambda2: tuple[float, ...]

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            v = tuple(float(c) for c in getattr(self, name))
            if len(v) not in (2, 3):
                raise ValueError(f"{name} must have 2 or 3 components")
            if math.sqrt(sum(c * c for c in v)) > 1 + BUSCH_NORM_TOL:
                raise ValueError(f"{name} has Bloch norm > 1")
            object.__setattr__(self, name, v)
        if len(self.lambda1) != len(self.lambda2):
            raise ValueError("Bloch vectors must have equal length")


@dataclass(frozen=True, eq=False)
class RegionReport:
    n: int
    fixed_effect: Vec2
    region: ConvexPolygon2D
    area: float
    clipped_to: ConvexPolygon2D


def unbiased(e2) -> np.ndarray:
    """Lift planar coordinates onto the plane ``z = 1/2``."""
    x, y = (float(c) for c in e2)
    return np.array([x, y, 0.5])


def _directions(n: int) -> np.ndarray:
    a = 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(a), np.sin(a)])


def _check_even(n: int) -> None:
    if int(n) != n or n < 4:
        raise ValueError(f"need an even n >= 4, got {n}")
    if n % 2:
        raise OddPolygonError(f"closed-form criterion requires an even polygon, got n={n}")


def _check_unbiased(n: int, p, label: str) -> np.ndarray:
    p = np.asarray(tuple(p), dtype=float)
    if p.shape != (2,) or not np.all(np.isfinite(p)):
        raise ValueError(f"{label} must be a finite planar point")
    if np.max(_directions(n) @ p) > 0.5 + TOL:
        raise OutsideUnbiasedPolygon(f"{label}={tuple(p)} lies outside the unbiased {n}-gon")
    return p


def criterion_lhs(n: int, e, f) -> np.ndarray:
    """``n x n`` matrix of left-hand sides indexed by ``(k1, k2)``.

    Entry ``(k1, k2)`` is ``(f - e) . s_k1 + (f + e) . s_k2`` with
    ``s_k = (cos 2 pi k / n, sin 2 pi k / n)``; coexistence requires every
    entry to be at most 1.
    """
    S = _directions(n)
    e = np.asarray(e, dtype=float)
    f = np.asarray(f, dtype=float)
    return (S @ (f - e))[:, None] + (S @ (f + e))[None, :]


def criterion_verdict(n: int, e, f) -> CoexistenceVerdict:
    _check_even(n)
    e = _check_unbiased(n, e, "e")
    f = _check_unbiased(n, f, "f")
    lhs = criterion_lhs(n, e, f)
    k1, k2 = np.unravel_index(int(np.argmax(lhs)), lhs.shape)
    slack = 1.0 - float(lhs[k1, k2])
    return CoexistenceVerdict(slack >= -TOL, binding=[int(k1), int(k2)], slack=slack)


def coexist_criterion_even_polygon(n: int, e, f) -> bool:
    return criterion_verdict(n, e, f).coexistent


def _g1_constraints(t: Theory, e: np.ndarray, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Constraints on ``g1`` after substituting ``g2 = e - g1`` and ``g3 = f - g1``."""
    if t.has_states:
        W = t.extremal_states
        A = np.vstack([-W, W, W, -W])
        b = np.concatenate([
            np.zeros(len(W)),         # <g1, w> >= 0
            W @ e,                    # <g2, w> >= 0
            W @ f,                    # <g3, w> >= 0
            1.0 - W @ (e + f),        # <g1 + g2 + g3, w> <= 1
        ])
        return A, b
    F, c = t.effect_facets
    rest = t.unit - e - f
    A = np.vstack([F, -F, -F, F])
    b = np.concatenate([c, c - F @ e, c - F @ f, c - F @ rest])
    return A, b


def coexistence_problem(t: Theory, e, f) -> FeasibilityProblem:
    """The feasibility system for ``g1``; a solution certifies coexistence."""
    A, b = _g1_constraints(t, np.asarray(e, dtype=float), np.asarray(f, dtype=float))
    return FeasibilityProblem.from_arrays(A, b)


def coexist_oracle(t: Theory, e, f) -> CoexistenceVerdict:
    e = np.asarray(e, dtype=float)
    f = np.asarray(f, dtype=float)
    for label, v in (("e", e), ("f", f)):
        if not is_effect(t, v):
            raise ValueError(f"{label}={tuple(v)} is not an effect of {t.name}")
    A, b = _g1_constraints(t, e, f)
    ok, g1 = lp_feasible_arrays(A, b)
    if not ok:
        return CoexistenceVerdict(False)
    active = np.flatnonzero(np.abs(A @ g1 - b) <= 1e-9)
    return CoexistenceVerdict(True, witness=(g1, e - g1, f - g1), binding=[int(i) for i in active])


def verdict_is_valid(t: Theory, v: CoexistenceVerdict, e, f, tol: float = 1e-9) -> bool:
    """Check a witness: marginal sums and all four outcomes being effects."""
    if not v.coexistent or v.witness is None:
        return False
    g1, g2, g3 = v.witness
    g4 = t.unit - g1 - g2 - g3
    sums_ok = np.allclose(g1 + g2, e, atol=tol, rtol=0) and np.allclose(g1 + g3, f, atol=tol, rtol=0)
    return bool(sums_ok and all(is_effect(t, g, 1e-7) for g in (g1, g2, g3, g4)))


def _region_halfplanes(n: int, e: np.ndarray) -> list[HalfPlane2D]:
    """The ``n**2`` criterion halfplanes in ``f``, reduced to the tightest per direction.

    ``(s_k1 + s_k2) . f <= 1 + (s_k1 - s_k2) . e``; every normal points along a
    multiple of ``pi / n``, so directions can be bucketed exactly.
    """
    S = _directions(n)
    normals = (S[:, None, :] + S[None, :, :]).reshape(-1, 2)
    offsets = (1.0 + (S @ e)[:, None] - (S @ e)[None, :]).ravel()
    length = np.hypot(normals[:, 0], normals[:, 1])
    # k2 = k1 + n/2 gives 0 <= 1 + 2 e . s_k1, which holds inside the unbiased polygon
    degenerate = length < 1e-12
    normals, offsets, length = normals[~degenerate], offsets[~degenerate], length[~degenerate]
    unit = normals / length[:, None]
    scaled = offsets / length
    keys = np.mod(np.rint(np.arctan2(unit[:, 1], unit[:, 0]) / (np.pi / n)).astype(int), 2 * n)
    best: dict[int, int] = {}
    for i, k in enumerate(keys):
        if k not in best or scaled[i] < scaled[best[k]]:
            best[k] = i
    return [HalfPlane2D(tuple(unit[i]), float(scaled[i])) for k, i in sorted(best.items())]


def coexistence_region(n: int, e) -> RegionReport:
    """All unbiased ``f`` coexistent with the fixed unbiased ``e``."""
    _check_even(n)
    e = _check_unbiased(n, e, "e")
    bound = regular_constraint_polygon(n, 0.5)
    region = intersect_halfplanes(_region_halfplanes(n, e), bound)
    return RegionReport(n, Vec2(float(e[0]), float(e[1])), region, polygon_area(region), bound)


def probe_agreement(report: RegionReport, grid: int = 50) -> dict:
    """Compare polygon membership with the direct criterion on a ``grid x grid`` lattice."""
    bound = report.clipped_to
    lo = bound.vertices.min(axis=0)
    hi = bound.vertices.max(axis=0)
    e = np.array(tuple(report.fixed_effect))
    checked = agree = boundary = 0
    S = _directions(report.n)
    for x in np.linspace(lo[0], hi[0], grid):
        for y in np.linspace(lo[1], hi[1], grid):
            f = np.array([x, y])
            if np.max(S @ f) > 0.5:
                continue
            slack = 1.0 - float(criterion_lhs(report.n, e, f).max())
            if abs(slack) <= 1e-6:
                boundary += 1
                continue
            checked += 1
            agree += contains_point(report.region, f) == (slack >= 0)
    return {"checked": checked, "agree": agree, "boundary": boundary}


def busch_coexistent(p: BuschEffectPair) -> bool:
    a = np.asarray(p.lambda1)
    b = np.asarray(p.lambda2)
    return 0.5 * float(np.linalg.norm(a + b)) + 0.5 * float(np.linalg.norm(a - b)) <= 1.0 + TOL


def qubit_effect_to_normal(alpha: float, r) -> np.ndarray:
    """Planar qubit effect ``(alpha I + r . sigma) / 2`` in normal coordinates ``(r_x/2, r_y/2, alpha/2)``.

    The probability ``(alpha + r_s . r) / 2`` then equals the dot product with
    the state ``(r_s, 1)``.
    """
    r = np.asarray(r, dtype=float)
    if r.shape == (3,):
        if abs(r[2]) > TOL:
            raise ValueError("only effects in the span of sigma_x, sigma_y have a planar image")
        r = r[:2]
    norm = float(np.linalg.norm(r))
    if norm > 1 + BUSCH_NORM_TOL or not norm - TOL <= alpha <= 2 - norm + TOL:
        raise ValueError("not a qubit effect: need |r| <= 1 and |r| <= alpha <= 2 - |r|")
    return np.array([r[0] / 2, r[1] / 2, alpha / 2])


def busch_planar_region_membership(e, f) -> bool:
    e = np.asarray(tuple(e), dtype=float)
    f = np.asarray(tuple(f), dtype=float)
    for label, v in (("e", e), ("f", f)):
        if np.linalg.norm(v) > 0.5 + BUSCH_NORM_TOL:
            raise ValueError(f"{label} lies outside the radius-1/2 disk")
    return float(np.linalg.norm(e + f) + np.linalg.norm(e - f)) <= 1.0 + TOL


def ellipse_area(e) -> float:
    """Area of the planar qubit region for fixed ``e``: foci ``+-e``, semi-major 1/2."""
    r2 = float(np.dot(tuple(e), tuple(e)))
    return math.pi * 0.5 * math.sqrt(max(0.25 - r2, 0.0))


def quantum_limit_gap(n: int, e) -> float:
    e = np.asarray(tuple(e), dtype=float)
    if not np.linalg.norm(e) < 0.5:
        raise ValueError("need |e| < 1/2")
    ref = ellipse_area(e)
    return abs(coexistence_region(n, e).area - ref) / ref


def _require_nontrivial_extremal(t: Theory, e) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    if t.index_of(e) is None:
        raise ValueError(f"{tuple(e)} is not an extremal effect of {t.name}")
    if np.allclose(e, t.zero, atol=1e-9) or np.allclose(e, t.unit, atol=1e-9):
        raise ValueError("zero and unit effects are trivial")
    return e


def extremal_coexistence_set(t: Theory, e) -> np.ndarray:
    """Corners ``o, e, u - e, u`` of the parallelogram of effects coexistent with extremal ``e``."""
    if t.d != 3:
        raise ValueError("the parallelogram characterization is stated for d = 3")
    e = _require_nontrivial_extremal(t, e)
    return np.array([t.zero, e, effect_complement(t, e), t.unit])


def parallelogram_coordinates(t: Theory, e, f) -> tuple[float, float, float]:
    """``(s, t, residual)`` for the least-squares fit ``f = s e + t (u - e)``."""
    e = np.asarray(e, dtype=float)
    B = np.column_stack([e, effect_complement(t, e)])
    coef, *_ = np.linalg.lstsq(B, np.asarray(f, dtype=float), rcond=None)
    residual = float(np.max(np.abs(B @ coef - f)))
    return float(coef[0]), float(coef[1]), residual


def in_extremal_coexistence_set(t: Theory, e, f, tol: float = 1e-9) -> bool:
    _require_nontrivial_extremal(t, e)
    s, r, residual = parallelogram_coordinates(t, e, f)
    return residual <= tol and -tol <= s <= 1 + tol and -tol <= r <= 1 + tol


def sample_effect(t: Theory, rng: np.random.Generator, max_tries: int = 100_000) -> np.ndarray:
    """Uniform sample from the effect polytope by rejection from its bounding box."""
    lo = t.extremal_effects.min(axis=0)
    hi = t.extremal_effects.max(axis=0)
    for _ in range(max_tries):
        p = rng.uniform(lo, hi)
        if is_effect(t, p, 0.0):
            return p
    raise RuntimeError("rejection sampler exhausted its budget")


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Per-sample generator keyed by ``(seed, index)`` so results ignore evaluation order."""
    return np.random.default_rng([int(seed), int(index)])


def coexistence_volume_fraction(t: Theory, e, samples: int = 10_000, seed: int = 0) -> float:
    if t.d != 3:
        raise ValueError("volume estimate is implemented for three-dimensional effect spaces")
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    e = np.asarray(e, dtype=float)
    hits = 0
    for i in range(samples):
        f = sample_effect(t, sample_rng(seed, i))
        hits += coexist_oracle(t, e, f).coexistent
    return hits / samples


def lower_set_slice(t: Theory, e, l: float) -> ConvexPolygon2D:
    """Planar section ``z = l`` of ``{g : o <= g <= e}`` for unbiased ``e`` of an even polygon theory.

    Equals ``R_l(0) & R_{1/2 - l}(e_xy)`` in the notation of regular constraint
    polygons with apothem ``l``.
    """
    n = (t.presentation or {}).get("polygon_n")
    if n is None or n % 2:
        raise ValueError("lower-set slices are implemented for even polygon theories")
    e = np.asarray(e, dtype=float)
    if abs(e[2] - 0.5) > TOL:
        raise ValueError("e must be unbiased (z = 1/2)")
    if not 0 <= l <= 0.5:
        raise ValueError(f"slice height must lie in [0, 1/2], got {l}")
    bound = regular_constraint_polygon(n, l)
    return intersect_halfplanes(regular_constraint_halfplanes(n, 0.5 - l, e[:2]), bound)
