import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gptcoexist.coexistence import coexistence_problem
from gptcoexist.geometry import HalfSpace
from gptcoexist.simplex import DegenerateLPError, FeasibilityProblem, lp_feasible, lp_feasible_arrays
from gptcoexist.theory import build_square_bit


def test_interval_feasible():
    ok, x = lp_feasible(FeasibilityProblem(1, [HalfSpace((-1,), 0), HalfSpace((1,), 1)]))
    assert ok and -1e-9 <= x[0] <= 1 + 1e-9


def test_crossed_interval_infeasible():
    ok, x = lp_feasible(FeasibilityProblem(1, [HalfSpace((-1,), -1), HalfSpace((1,), 0)]))
    assert not ok and x is None


def test_square_bit_extremal_pair_infeasible():
    t = build_square_bit()
    ok, _ = lp_feasible(coexistence_problem(t, [0.5, 0.5, 0.5], [0.5, -0.5, 0.5]))
    assert not ok


def test_no_constraints_is_feasible():
    ok, x = lp_feasible(FeasibilityProblem(3))
    assert ok and x.shape == (3,)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        FeasibilityProblem(2, [HalfSpace((1.0,), 0.0)])


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        lp_feasible_arrays([[np.inf]], [1.0])


def test_iteration_cap_reports_degenerate():
    A = [[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]]
    b = [-1.0, -1.0, 3.0]
    with pytest.raises(DegenerateLPError):
        lp_feasible_arrays(A, b, max_iter=0)


def test_deterministic_witness():
    A = np.array([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0], [1.0, -2.0]])
    b = np.array([-0.2, -0.1, 1.0, 0.3])
    _, x1 = lp_feasible_arrays(A, b)
    _, x2 = lp_feasible_arrays(A, b)
    assert np.array_equal(x1, x2)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_agrees_with_sampling_on_box_and_cuts(seed):
    rng = np.random.default_rng(seed)
    lo = rng.uniform(-1, 0, 2)
    hi = lo + rng.uniform(0.1, 1, 2)
    cuts = rng.normal(size=(rng.integers(1, 4), 2))
    offs = rng.uniform(-1, 1, len(cuts))
    A = np.vstack([np.eye(2), -np.eye(2), cuts])
    b = np.concatenate([hi, -lo, offs])
    ok, x = lp_feasible_arrays(A, b)

    # dense grid over the box decides the analytic answer unless it is marginal
    g = np.stack(np.meshgrid(np.linspace(lo[0], hi[0], 201), np.linspace(lo[1], hi[1], 201)), -1).reshape(-1, 2)
    margin = (offs[None, :] - g @ cuts.T).min(axis=1) / np.linalg.norm(cuts, axis=1).max()
    best = margin.max()
    if best > 1e-6:
        assert ok
        assert np.all(A @ x <= b + 1e-7)
    elif best < -0.02:
        # grid spacing is below 0.01, so a feasible point would be within reach
        assert not ok
