"""Small dense two-phase simplex for min c.x s.t. A x >= b, x >= 0.

Bland's smallest-index rule throughout, so the method cannot cycle.  Sized for
bound LPs with at most a few hundred variables; everything is dense numpy.
Row duals are recovered from the reduced costs of the surplus columns.
"""

from dataclasses import dataclass

import numpy as np

OPTIMAL = "OPTIMAL"
INFEASIBLE = "INFEASIBLE"
UNBOUNDED = "UNBOUNDED"

_PIVOT_TOL = 1e-10
_COST_TOL = 1e-9


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray          # structural variables
    objective: float
    duals: np.ndarray      # one multiplier per >= row, nonnegative at optimum


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _reduced_costs(T, basis, cost):
    cb = cost[basis]
    return cost - cb @ T[:, :-1]


def _run_phase(T, basis, cost, banned):
    """Iterate Bland pivots until optimal or unbounded."""
    while True:
        r = _reduced_costs(T, basis, cost)
        enter = -1
        for j in range(len(cost)):
            if j not in banned and r[j] < -_COST_TOL:
                enter = j
                break
        if enter < 0:
            return OPTIMAL
        # ratio test; ties broken by smallest basis variable index (Bland)
        leave, best = -1, np.inf
        for i in range(T.shape[0]):
            a = T[i, enter]
            if a > _PIVOT_TOL:
                ratio = T[i, -1] / a
                if ratio < best - _PIVOT_TOL or (ratio < best + _PIVOT_TOL
                                                 and (leave < 0 or basis[i] < basis[leave])):
                    leave, best = i, min(best, ratio)
        if leave < 0:
            return UNBOUNDED
        _pivot(T, basis, leave, enter)


def solve(c, A, b):
    """Solve min c.x subject to A x >= b, x >= 0."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    nrows, ncols = A.shape if A.ndim == 2 else (0, len(c))
    if nrows == 0:
        return SimplexResult(OPTIMAL, np.zeros(len(c)), 0.0, np.zeros(0))

    # flip rows so every right-hand side is nonnegative before adding artificials
    A = A.copy()
    b = b.copy()
    surplus_sign = np.full(nrows, -1.0)
    for i in range(nrows):
        if b[i] < 0:
            A[i] *= -1.0
            b[i] *= -1.0
            surplus_sign[i] = 1.0

    n_total = ncols + nrows + nrows  # structural, surplus, artificial
    T = np.zeros((nrows, n_total + 1))
    T[:, :ncols] = A
    for i in range(nrows):
        T[i, ncols + i] = surplus_sign[i]
        T[i, ncols + nrows + i] = 1.0
    T[:, -1] = b
    basis = list(range(ncols + nrows, n_total))

    # phase 1: drive artificials to zero
    cost1 = np.zeros(n_total)
    cost1[ncols + nrows:] = 1.0
    status = _run_phase(T, basis, cost1, banned=set())
    if status != OPTIMAL or cost1[basis] @ T[:, -1] > 1e-7:
        return SimplexResult(INFEASIBLE, np.zeros(ncols), np.nan, np.zeros(nrows))

    # pivot any leftover zero-level artificials out of the basis
    artificial = set(range(ncols + nrows, n_total))
    drop_rows = []
    for i in range(nrows):
        if basis[i] in artificial:
            col = next((j for j in range(ncols + nrows) if abs(T[i, j]) > _PIVOT_TOL), None)
            if col is None:
                drop_rows.append(i)  # redundant row
            else:
                _pivot(T, basis, i, col)
    if drop_rows:
        keep = [i for i in range(nrows) if i not in drop_rows]
        T = T[keep]
        basis = [basis[i] for i in keep]

    # phase 2 on the real objective, artificials banned
    cost2 = np.zeros(n_total)
    cost2[:ncols] = c
    status = _run_phase(T, basis, cost2, banned=artificial)
    if status != OPTIMAL:
        return SimplexResult(UNBOUNDED, np.zeros(ncols), -np.inf, np.zeros(nrows))

    x = np.zeros(ncols)
    for i, var in enumerate(basis):
        if var < ncols:
            x[var] = T[i, -1]
    r = _reduced_costs(T, basis, cost2)
    # dual of row i is the reduced cost of its surplus column (sign-adjusted
    # for rows that were flipped)
    duals_full = np.zeros(nrows)
    for i in range(nrows):
        duals_full[i] = -surplus_sign[i] * r[ncols + i]
    return SimplexResult(OPTIMAL, x, float(c @ x), duals_full)
