"""Phase-one simplex for small dense feasibility problems.

Solves ``exists x : A x <= b`` with free ``x``.  Free variables are split as
``x = x_plus - x_minus``; rows with negative right-hand side get an artificial
column.  Pivoting follows Bland's smallest-index rule, so the method cannot
cycle and the result is deterministic for a fixed input.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import HalfSpace, halfspace_arrays

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-9
WITNESS_TOL = 1e-7


class DegenerateLPError(RuntimeError):
    """Numerical breakdown: the solver could not certify either answer."""


@dataclass(frozen=True)
class FeasibilityProblem:
    num_vars: int
    constraints: Sequence[HalfSpace] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for c in self.constraints:
            if c.dim != self.num_vars:
                raise ValueError(f"constraint of dimension {c.dim} in a {self.num_vars}-variable problem")

    @classmethod
    def from_arrays(cls, A, b) -> "FeasibilityProblem":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        return cls(A.shape[1], [HalfSpace(tuple(row), float(bi)) for row, bi in zip(A, np.ravel(b))])


def lp_feasible(prob: FeasibilityProblem) -> tuple[bool, Optional[np.ndarray]]:
    """Return ``(True, witness)`` if the constraints are jointly satisfiable, else ``(False, None)``."""
    if not prob.constraints:
        return True, np.zeros(prob.num_vars)
    A, b = halfspace_arrays(prob.constraints)
    return lp_feasible_arrays(A, b)


def lp_feasible_arrays(A, b, max_iter: Optional[int] = None) -> tuple[bool, Optional[np.ndarray]]:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    m, n = A.shape
    if len(b) != m:
        raise ValueError("A and b disagree on the number of constraints")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError("non-finite constraint data")

    # row scaling keeps pivots comparable across constraints
    scale = np.maximum(np.abs(A).max(axis=1), np.abs(b))
    scale[scale == 0] = 1.0
    A = A / scale[:, None]
    b = b / scale

    neg = b < 0
    n_art = int(neg.sum())
    sign = np.where(neg, -1.0, 1.0)
    # columns: x_plus | x_minus | slack | artificial | rhs
    ncols = 2 * n + m + n_art
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :n] = A * sign[:, None]
    T[:m, n:2 * n] = -A * sign[:, None]
    T[:m, 2 * n:2 * n + m] = np.diag(sign)
    T[:m, -1] = b * sign
    basis = np.arange(2 * n, 2 * n + m)
    art_rows = np.flatnonzero(neg)
    for j, r in enumerate(art_rows):
        T[r, 2 * n + m + j] = 1.0
        basis[r] = 2 * n + m + j
    # phase-one objective row: reduced costs of sum(artificials)
    if n_art:
        T[m, :] = -T[art_rows].sum(axis=0)
        T[m, 2 * n + m:ncols] = 0.0

    limit = max_iter if max_iter is not None else 50 * (m + n) + 100
    for _ in range(limit):
        if n_art == 0:
            break
        cost = T[m, :ncols]
        entering = np.flatnonzero(cost < -PIVOT_TOL)
        if len(entering) == 0:
            break
        c = int(entering[0])
        col = T[:m, c]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if len(rows) == 0:
            raise DegenerateLPError("phase-one objective unbounded below")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        r = int(tied[np.argmin(basis[tied])])
        T[r] /= T[r, c]
        col = T[:, c].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        basis[r] = c
    else:
        raise DegenerateLPError(f"no convergence within {limit} pivots")

    infeasibility = -T[m, -1] if n_art else 0.0
    if infeasibility > FEAS_TOL:
        return False, None

    values = np.zeros(ncols)
    values[basis] = T[:m, -1]
    x = values[:n] - values[n:2 * n]
    violation = float(np.max(A @ x - b)) if m else 0.0
    if violation > WITNESS_TOL:
        raise DegenerateLPError(f"phase one ended feasible but witness violates a row by {violation:.3g}")
    return True, x
