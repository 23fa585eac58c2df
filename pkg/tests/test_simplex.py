import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from lpa_lab.simplex import prune_rows, solve_covering_lp


def test_small_covering_problem():
    # min x + 2y  s.t. x + y >= 1, x - y >= -0.5
    res = solve_covering_lp([1.0, 2.0], [[1, 1], [1, -1]], [1.0, -0.5])
    assert res.value == pytest.approx(1.0)
    np.testing.assert_allclose(res.x, [1.0, 0.0], atol=1e-12)


def test_degenerate_rows_do_not_cycle():
    A = np.array([[1, 1, 0], [1, 1, 0], [0, 1, 1], [1, 0, 1], [1, 1, 1]], dtype=float)
    b = np.array([1, 1, 1, 1, 1.5])
    res = solve_covering_lp([1, 1, 1], A, b)
    assert res.value == pytest.approx(1.5)
    assert (A @ res.x >= b - 1e-10).all()


def test_prune_drops_implied_rows():
    A = np.array([[1.0, 1.0], [2.0, 1.0], [1.0, 1.0], [1.0, 0.0]])
    b = np.array([1.0, 1.0, 1.0, -1.0])
    kept = prune_rows(A, b)
    assert list(kept) == [0]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_matches_reference_lp(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 8), rng.integers(1, 6)
    A = rng.normal(size=(m, n))
    A[0] = np.abs(A[0]) + 0.1  # keeps the problem feasible and bounded
    b = rng.normal(size=m)
    c = rng.uniform(0.1, 2.0, n)
    ref = linprog(c, A_ub=-A, b_ub=-b, bounds=[(0, None)] * n, method="highs")
    if ref.status != 0:
        return
    res = solve_covering_lp(c, A, b)
    assert res.value == pytest.approx(ref.fun, abs=1e-9)
    assert (A @ res.x >= b - 1e-9).all()
