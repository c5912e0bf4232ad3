import numpy as np
import pytest

from slotbandits import simplex


def test_one_by_one():
    res = simplex.solve([1.0], [[1.0]], [1.0])
    assert res.status == simplex.OPTIMAL
    assert res.objective == pytest.approx(1.0)
    assert res.x[0] == pytest.approx(1.0)
    assert res.duals[0] == pytest.approx(1.0)


def test_redundant_row():
    # same constraint twice; second row is redundant after phase 1
    res = simplex.solve([1.0, 2.0], [[1.0, 1.0], [1.0, 1.0]], [1.0, 1.0])
    assert res.status == simplex.OPTIMAL
    assert res.objective == pytest.approx(1.0)


def test_known_two_variable():
    # min 2x + 3y s.t. x + y >= 4, x + 3y >= 6: optimum at (3, 1), value 9
    res = simplex.solve([2.0, 3.0], [[1.0, 1.0], [1.0, 3.0]], [4.0, 6.0])
    assert res.objective == pytest.approx(9.0)
    assert res.x == pytest.approx([3.0, 1.0])


def test_matches_scipy_on_random_lps():
    from scipy.optimize import linprog

    rng = np.random.default_rng(0)
    solved = 0
    for _ in range(60):
        nrows = int(rng.integers(1, 5))
        ncols = int(rng.integers(1, 8))
        A = rng.uniform(0.0, 2.0, size=(nrows, ncols))
        A[rng.random(A.shape) < 0.3] = 0.0
        if not (A.max(axis=1) > 0).all():
            continue  # keep rows satisfiable
        b = np.ones(nrows)
        c = rng.uniform(0.0, 3.0, size=ncols)
        res = simplex.solve(c, A, b)
        ref = linprog(c, A_ub=-A, b_ub=-b, bounds=(0, None), method="highs")
        assert res.status == simplex.OPTIMAL
        assert ref.status == 0
        assert res.objective == pytest.approx(ref.fun, abs=1e-7)
        solved += 1
    assert solved >= 40


def test_primal_dual_certificates():
    rng = np.random.default_rng(4)
    for _ in range(40):
        nrows = int(rng.integers(1, 5))
        ncols = int(rng.integers(nrows, 9))
        A = rng.uniform(0.1, 2.0, size=(nrows, ncols))
        b = np.ones(nrows)
        c = rng.uniform(0.1, 3.0, size=ncols)
        res = simplex.solve(c, A, b)
        assert res.status == simplex.OPTIMAL
        slack = A @ res.x - b
        assert (res.x >= -1e-9).all()
        assert (slack >= -1e-9).all()            # primal feasibility
        assert (res.duals >= -1e-9).all()        # dual feasibility (sign)
        reduced = c - res.duals @ A
        assert (reduced >= -1e-9).all()          # dual feasibility (costs)
        assert (np.abs(slack * res.duals) <= 1e-8).all()     # complementary slackness
        assert (np.abs(res.x * reduced) <= 1e-8).all()
        assert res.objective == pytest.approx(res.duals @ b, abs=1e-8)  # strong duality
