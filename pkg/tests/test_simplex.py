import numpy as np
import pytest
from scipy.optimize import linprog

from indexconst import simplex
from indexconst.errors import SolverError


def _random_lp(rng, m, n):
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0, 1, n) * (rng.uniform(size=n) < 0.6)
    b = A @ x0
    c = rng.normal(size=n)
    return c, A, b


def test_matches_highs_on_random_lps():
    rng = np.random.default_rng(1)
    for _ in range(100):
        m, n = int(rng.integers(2, 8)), int(rng.integers(8, 20))
        c, A, b = _random_lp(rng, m, n)
        ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        res = simplex.solve(c, A, b)
        if ref.status == 3:
            assert res.status == simplex.UNBOUNDED
            continue
        assert ref.status == 0
        assert res.status == simplex.OPTIMAL
        assert res.objective == pytest.approx(ref.fun, abs=1e-7 * max(1, abs(ref.fun)))
        np.testing.assert_allclose(A @ res.x, b, atol=1e-8)
        assert res.x.min() >= -1e-12
        # dual feasibility and strong duality
        assert np.all(c - A.T @ res.duals >= -1e-8)
        assert b @ res.duals == pytest.approx(res.objective, abs=1e-7 * max(1, abs(ref.fun)))


def test_infeasible():
    A = np.array([[1.0, 1.0]])
    res = simplex.solve([1.0, 1.0], A, [-1.0])
    assert res.status == simplex.INFEASIBLE


def test_unbounded():
    A = np.array([[1.0, -1.0]])
    res = simplex.solve([-1.0, 0.0], A, [1.0])
    assert res.status == simplex.UNBOUNDED


def test_negative_rhs_duals():
    # flipping rows in phase 1 must not flip the reported duals
    c = np.array([1.0, 2.0, 0.0])
    A = np.array([[-1.0, -1.0, 1.0]])
    res = simplex.solve(c, A, [-3.0])
    assert res.objective == pytest.approx(3.0)
    assert res.duals[0] == pytest.approx(-1.0)
    assert -3.0 * res.duals[0] == pytest.approx(res.objective)


def test_beale_cycling_example():
    # Beale's example cycles under naive Dantzig pricing
    c = np.array([-0.75, 150, -0.02, 6, 0, 0, 0])
    A = np.array([
        [0.25, -60, -0.04, 9, 1, 0, 0],
        [0.5, -90, -0.02, 3, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 1],
    ])
    b = np.array([0.0, 0.0, 1.0])
    res = simplex.solve(c, A, b, basis=[4, 5, 6], degenerate_limit=2)
    assert res.status == simplex.OPTIMAL
    assert res.objective == pytest.approx(-0.05)


def test_iteration_cap_raises():
    rng = np.random.default_rng(4)
    c, A, b = _random_lp(rng, 6, 30)
    with pytest.raises(SolverError):
        simplex.solve(c, A, b, max_iter=1)


def test_deterministic():
    rng = np.random.default_rng(9)
    c, A, b = _random_lp(rng, 5, 15)
    r1, r2 = simplex.solve(c, A, b), simplex.solve(c, A, b)
    np.testing.assert_array_equal(r1.x, r2.x)
    np.testing.assert_array_equal(r1.basis, r2.basis)


def test_perturbation_keeps_duals_feasible():
    rng = np.random.default_rng(12)
    m, n = 4, 12
    A = np.hstack([rng.normal(size=(m, n)), np.eye(m)])
    c = np.concatenate([rng.uniform(0, 1, n), np.zeros(m)])
    b = np.zeros(m)
    b[0] = 1.0
    A[0, :n] = np.abs(A[0, :n])
    basis = list(range(n, n + m))
    ref = simplex.solve(c, A, b, basis=basis)
    res = simplex.solve(c, A, b, basis=basis, perturb=1e-8)
    assert np.all(c - A.T @ res.duals >= -1e-9)
    assert b @ res.duals == pytest.approx(ref.objective, abs=1e-6)
