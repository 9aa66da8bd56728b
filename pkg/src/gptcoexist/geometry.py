"""Planar and low-dimensional convex geometry.

Polygons are stored as ``(k, 2)`` float arrays in counterclockwise order with
collinear and duplicate vertices removed.  ``k`` may be 0 (empty), 1 (a point)
or 2 (a segment); degenerate polygons are ordinary values here.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Predicate tolerance and vertex merge radius.
TOL = 1e-9
DEDUP_TOL = 1e-7


class EmptyPolytopeError(ValueError):
    """The halfspace system has no feasible point."""


class UnboundedPolytopeError(ValueError):
    """The halfspace system admits a nonzero recession direction."""


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite Vec2 component: ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y], dtype=dtype or float)


@dataclass(frozen=True)
class HalfPlane2D:
    """The closed halfplane ``{p : normal . p <= offset}``."""

    normal: tuple[float, float]
    offset: float

    def __post_init__(self):
        nx, ny = (float(v) for v in self.normal)
        object.__setattr__(self, "normal", (nx, ny))
        object.__setattr__(self, "offset", float(self.offset))
        if not math.hypot(nx, ny) > 0:
            raise ValueError("halfplane normal must be nonzero")


@dataclass(frozen=True)
class HalfSpace:
    """The closed halfspace ``{x : normal . x <= offset}`` in any dimension."""

    normal: tuple[float, ...]
    offset: float

    def __post_init__(self):
        normal = tuple(float(v) for v in self.normal)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))
        if len(normal) < 1:
            raise ValueError("halfspace needs at least one coordinate")
        if not math.sqrt(sum(v * v for v in normal)) > 0:
            raise ValueError("halfspace normal must be nonzero")

    @property
    def dim(self) -> int:
        return len(self.normal)


def halfspace_arrays(halfspaces: Sequence[HalfSpace]) -> tuple[np.ndarray, np.ndarray]:
    """Stack halfspaces into ``(A, b)`` with ``A x <= b``."""
    if not halfspaces:
        raise ValueError("empty halfspace list")
    A = np.array([h.normal for h in halfspaces], dtype=float)
    b = np.array([h.offset for h in halfspaces], dtype=float)
    return A, b


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _dedup(points: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in points:
        if all(abs(p[0] - q[0]) > tol or abs(p[1] - q[1]) > tol for q in kept):
            kept.append(p)
    return np.array(kept, dtype=float).reshape(-1, 2)


def convex_hull_2d(points) -> np.ndarray:
    """Monotone-chain hull, counterclockwise, collinear points dropped."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite polygon vertex")
    pts = _dedup(pts)
    if len(pts) <= 1:
        return pts
    order = sorted(range(len(pts)), key=lambda i: (pts[i, 0], pts[i, 1]))
    pts = pts[order]
    scale = max(1.0, float(np.abs(pts).max()))
    eps = TOL * scale * scale

    def chain(seq):
        out: list[np.ndarray] = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= eps:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:
        # all points coincide up to collinearity: keep the extreme pair
        return np.array([pts[0], pts[-1]])
    return _dedup(np.array(hull))


@dataclass(frozen=True, eq=False)
class ConvexPolygon2D:
    """A convex polygon given by its counterclockwise vertex list."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 2)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_points(cls, points) -> "ConvexPolygon2D":
        return cls(convex_hull_2d(points))

    @classmethod
    def empty(cls) -> "ConvexPolygon2D":
        return cls(np.zeros((0, 2)))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def translated(self, t) -> "ConvexPolygon2D":
        return ConvexPolygon2D(self.vertices + np.asarray(tuple(t), dtype=float))

    def halfplanes(self) -> list[HalfPlane2D]:
        """Edge halfplanes of a nondegenerate polygon."""
        v = self.vertices
        if len(v) < 3:
            raise ValueError("halfplane form needs at least three vertices")
        out = []
        for a, b in zip(v, np.roll(v, -1, axis=0)):
            normal = (b[1] - a[1], a[0] - b[0])
            out.append(HalfPlane2D(normal, normal[0] * a[0] + normal[1] * a[1]))
        return out

    def __repr__(self) -> str:
        pts = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in self.vertices)
        return f"ConvexPolygon2D([{pts}])"


def clip_halfplane(poly: ConvexPolygon2D, hp: HalfPlane2D) -> ConvexPolygon2D:
    """Intersect ``poly`` with a closed halfplane (one Sutherland-Hodgman pass)."""
    v = poly.vertices
    if len(v) == 0:
        return poly
    n = np.asarray(hp.normal)
    tol = TOL * float(np.hypot(*n))
    s = v @ n - hp.offset
    inside = s <= tol
    if inside.all():
        return poly
    if not inside.any():
        return ConvexPolygon2D.empty()
    out = []
    k = len(v)
    for i in range(k):
        j = (i + 1) % k
        if inside[i]:
            out.append(v[i])
        if inside[i] != inside[j]:
            t = s[i] / (s[i] - s[j])
            out.append(v[i] + t * (v[j] - v[i]))
    return ConvexPolygon2D.from_points(out)


def intersect_halfplanes(hps: Iterable[HalfPlane2D], bound: ConvexPolygon2D) -> ConvexPolygon2D:
    if bound.is_empty:
        raise ValueError("bounding polygon must be nonempty")
    poly = bound
    for hp in hps:
        poly = clip_halfplane(poly, hp)
        if poly.is_empty:
            break
    return poly


def minkowski_sum(p: ConvexPolygon2D, q: ConvexPolygon2D) -> ConvexPolygon2D:
    if p.is_empty or q.is_empty:
        return ConvexPolygon2D.empty()
    sums = (p.vertices[:, None, :] + q.vertices[None, :, :]).reshape(-1, 2)
    return ConvexPolygon2D.from_points(sums)


def polygon_area(poly: ConvexPolygon2D) -> float:
    v = poly.vertices
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    a = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    return abs(a)


def support(poly: ConvexPolygon2D, u) -> float:
    """Support function ``max_{p in poly} u . p``."""
    if poly.is_empty:
        return -math.inf
    return float(np.max(poly.vertices @ np.asarray(u, dtype=float)))


def _segment_distance(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.hypot(*(a + t * ab - p)))


def contains_point(poly: ConvexPolygon2D, pt, tol: float = TOL) -> bool:
    """Closed membership test, boundary inclusive up to ``tol``."""
    v = poly.vertices
    p = np.asarray(tuple(pt), dtype=float)
    if len(v) == 0:
        return False
    if len(v) == 1:
        return float(np.hypot(*(v[0] - p))) <= tol
    if len(v) == 2:
        return _segment_distance(p, v[0], v[1]) <= tol
    nxt = np.roll(v, -1, axis=0)
    edge = nxt - v
    lengths = np.hypot(edge[:, 0], edge[:, 1])
    cross = edge[:, 0] * (p[1] - v[:, 1]) - edge[:, 1] * (p[0] - v[:, 0])
    return bool(np.all(cross >= -tol * lengths))


def regular_constraint_polygon(n: int, l: float, x0=(0.0, 0.0)) -> ConvexPolygon2D:
    """Regular ``n``-gon ``{x : e_k . (x - x0) <= l}`` with normals at angles 2k pi/n.

    Vertices sit between consecutive normals, at angles ``(2k+1) pi / n`` and
    circumradius ``l / cos(pi/n)``.
    """
    if int(n) != n or n < 3:
        raise ValueError(f"need an integer n >= 3, got {n}")
    if not l >= 0:
        raise ValueError(f"apothem must be nonnegative, got {l}")
    c = np.asarray(tuple(x0), dtype=float)
    if l == 0:
        return ConvexPolygon2D(c.reshape(1, 2))
    r = l / math.cos(math.pi / n)
    ang = (2 * np.arange(n) + 1) * math.pi / n
    pts = c + r * np.column_stack([np.cos(ang), np.sin(ang)])
    return ConvexPolygon2D.from_points(pts)


def regular_constraint_halfplanes(n: int, l: float, x0=(0.0, 0.0)) -> list[HalfPlane2D]:
    cx, cy = tuple(x0)
    out = []
    for k in range(n):
        a = 2 * k * math.pi / n
        nx, ny = math.cos(a), math.sin(a)
        out.append(HalfPlane2D((nx, ny), l + nx * cx + ny * cy))
    return out


def _dedup_rows(points: np.ndarray, tol: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in points:
        if all(np.max(np.abs(p - q)) > tol for q in kept):
            kept.append(p)
    return np.array(kept).reshape(-1, points.shape[1])


def enumerate_polytope_vertices(halfspaces: Sequence[HalfSpace], d: int) -> np.ndarray:
    """All vertices of the bounded polytope ``{x : A x <= b}`` for ``d`` in 2..4.

    Every ``d``-subset of constraints is solved as an equality system; solutions
    satisfying all constraints are kept and merged within ``DEDUP_TOL``.
    """
    from .simplex import lp_feasible_arrays

    if d not in (2, 3, 4):
        raise ValueError(f"vertex enumeration supports d in 2..4, got {d}")
    A, b = halfspace_arrays(halfspaces)
    if A.shape[1] != d:
        raise ValueError(f"halfspaces have dimension {A.shape[1]}, expected {d}")
    norms = np.linalg.norm(A, axis=1)
    A, b = A / norms[:, None], b / norms

    combos = np.array(list(itertools.combinations(range(len(A)), d)), dtype=int)
    vertices = np.zeros((0, d))
    if len(combos):
        M = A[combos]
        rhs = b[combos]
        ok = np.abs(np.linalg.det(M)) > 1e-10
        if ok.any():
            sol = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
            feasible = np.all(sol @ A.T <= b + TOL, axis=1)
            vertices = _dedup_rows(sol[feasible], DEDUP_TOL)

    if len(vertices) == 0:
        found, _ = lp_feasible_arrays(A, b)
        if not found:
            raise EmptyPolytopeError("halfspace system is infeasible")
        raise UnboundedPolytopeError("feasible region has no vertex (contains a line)")
    # recession cone {r : A r <= 0} must be trivial; any nonzero r can be
    # scaled so that some coordinate is >= 1 in absolute value
    for j in range(d):
        for sign in (1.0, -1.0):
            row = np.zeros(d)
            row[j] = -sign
            found, _ = lp_feasible_arrays(np.vstack([A, row]), np.append(np.zeros(len(A)), -1.0))
            if found:
                raise UnboundedPolytopeError(f"recession direction along axis {j}")
    order = np.lexsort(vertices.T[::-1])
    return vertices[order]


def hull_halfspaces(points) -> list[HalfSpace]:
    """Facet halfspaces of the convex hull of a full-dimensional point set (d <= 4)."""
    P = np.asarray(points, dtype=float)
    m, d = P.shape
    if not 2 <= d <= 4:
        raise ValueError(f"hull facets supported for d in 2..4, got {d}")
    if m <= d or np.linalg.matrix_rank(P[1:] - P[0], tol=1e-9) < d:
        raise ValueError("point set is not full-dimensional")
    facets: list[tuple[np.ndarray, float]] = []
    for idx in itertools.combinations(range(m), d):
        base = P[list(idx)]
        diffs = base[1:] - base[0]
        _, sv, vt = np.linalg.svd(diffs, full_matrices=True)
        if len(sv) == d - 1 and sv[-1] < 1e-9:
            continue
        normal = vt[-1]
        offset = float(normal @ base[0])
        side = P @ normal - offset
        if np.all(side <= TOL):
            pass
        elif np.all(side >= -TOL):
            normal, offset = -normal, -offset
        else:
            continue
        if any(np.allclose(normal, f[0], atol=1e-9) and abs(offset - f[1]) < 1e-9 for f in facets):
            continue
        facets.append((normal, offset))
    return [HalfSpace(tuple(nrm), off) for nrm, off in facets]
