"""Small dense simplex for covering LPs.

Solves ``min c.s  s.t.  A s >= b, s >= 0`` with ``c >= 0``, which is the shape
of every payout-minimization problem here: the objective weights are
probabilities. The dual ``max b.u  s.t.  A^T u <= c, u >= 0`` then starts from
the all-slack basis, so no phase one is needed; the primal solution is read
off the reduced costs of the dual slacks. Pivoting follows Bland's rule,
which cannot cycle on degenerate bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible

PIVOT_TOL = 1e-11
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    value: float
    kept_rows: np.ndarray  # indices of rows surviving the dominance prune
    pivots: int
    min_residual: float


def prune_rows(A: np.ndarray, b: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Indices of rows of ``A s >= b`` not implied by another row under ``s >= 0``.

    Row i is implied by row j when ``A[i] >= A[j]`` componentwise and
    ``b[i] <= b[j]``. Rows with ``A[i] >= 0`` and ``b[i] <= 0`` hold trivially.
    Identical rows keep their first occurrence.
    """
    m = A.shape[0]
    if m == 0:
        return np.arange(0)
    trivial = (A >= -tol).all(axis=1) & (b <= tol)
    # dom[i, j]: row j implies row i
    dom = (A[:, None, :] >= A[None, :, :] - tol).all(axis=2) & (b[:, None] <= b[None, :] + tol)
    np.fill_diagonal(dom, False)
    same = dom & dom.T
    # among mutually-implying rows keep the lowest index
    strict = dom & ~same
    earlier_twin = np.triu(same, k=0).T  # same[j, i] with j < i
    drop = trivial | strict.any(axis=1) | earlier_twin.any(axis=1)
    return np.flatnonzero(~drop)


def solve_covering_lp(c, A, b, prune: bool = True, max_pivots: int = 10_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    n = c.size
    if (c < -PIVOT_TOL).any():
        raise ValueError("objective weights must be nonnegative")
    if A.size == 0:
        A = np.zeros((0, n))
    keep = prune_rows(A, b) if prune else np.arange(A.shape[0])
    Ak, bk = A[keep], b[keep]
    m = Ak.shape[0]

    # Dual tableau: n rows (one per primal variable), columns u_0..u_{m-1}, w_0..w_{n-1}, rhs.
    T = np.zeros((n + 1, m + n + 1))
    T[:n, :m] = Ak.T
    T[:n, m:m + n] = np.eye(n)
    T[:n, -1] = np.maximum(c, 0.0)
    T[n, :m] = -bk
    basis = list(range(m, m + n))

    pivots = 0
    while True:
        reduced = T[n, :-1]
        candidates = np.flatnonzero(reduced < -PIVOT_TOL)
        if candidates.size == 0:
            break
        col = int(candidates[0])
        column = T[:n, col]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            raise Infeasible("payout constraints cannot all be met (dual unbounded)")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        row = int(min(tied, key=lambda r: basis[r]))
        T[row] /= T[row, col]
        for r in range(n + 1):
            if r != row and T[r, col] != 0.0:
                T[r] -= T[r, col] * T[row]
        basis[row] = col
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex exceeded pivot limit")

    x = np.maximum(T[n, m:m + n], 0.0)
    residual = A @ x - b if A.shape[0] else np.zeros(0)
    min_res = float(residual.min()) if residual.size else 0.0
    if min_res < -RESIDUAL_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
        raise RuntimeError(f"simplex solution violates a constraint by {-min_res:.3e}")
    return LPResult(x=x, value=float(c @ x), kept_rows=keep, pivots=pivots, min_residual=min_res)
