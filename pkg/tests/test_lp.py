import numpy as np
import pytest
from scipy.optimize import linprog

from rikit.errors import DimensionMismatch, IterationLimit
from rikit.lp import LPProblem, lp_solve


def test_single_variable():
    sol = lp_solve(LPProblem([1.0], [[1.0]], [3.0]))
    assert sol.status == "optimal" and sol.value == pytest.approx(3.0)


def test_monotone_example():
    sol = lp_solve(LPProblem([1.0, 1.0], [[1, 0], [0, 1]], [1.0, 2.0], monotone=True))
    assert sol.value == pytest.approx(4.0)
    assert sol.solution[0] >= sol.solution[1] - 1e-12
    assert sol.solution == pytest.approx([2.0, 2.0])


def test_infeasible():
    # x >= 1 and -x >= 0
    sol = lp_solve(LPProblem([1.0], [[1.0], [-1.0]], [1.0, 0.0]))
    assert sol.status == "infeasible" and not sol.feasible


def test_unbounded():
    sol = lp_solve(LPProblem([-1.0], [[1.0]], [1.0]))
    assert sol.status == "unbounded"


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        LPProblem([1.0, 1.0], [[1.0]], [1.0])
    with pytest.raises(DimensionMismatch):
        LPProblem([1.0], [[1.0], [1.0]], [1.0])


def test_iteration_limit():
    rng = np.random.default_rng(3)
    a = rng.uniform(0, 1, (30, 20))
    with pytest.raises(IterationLimit):
        lp_solve(LPProblem(rng.uniform(0.1, 1, 20), a, rng.uniform(0.5, 1, 30)), max_iter=1)


def _highs(c, a, b, monotone):
    n = c.size
    a_ub, b_ub = -a, -b
    if monotone:
        d = np.zeros((n - 1, n))
        d[np.arange(n - 1), np.arange(n - 1)] = -1.0
        d[np.arange(n - 1), np.arange(1, n)] = 1.0
        a_ub, b_ub = np.vstack([a_ub, d]), np.concatenate([b_ub, np.zeros(n - 1)])
    return linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs")


@pytest.mark.parametrize("seed", range(20))
def test_random_vs_highs(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(5, 40)), int(rng.integers(3, 30))
    a = rng.uniform(0, 1, (m, n)) * (rng.random((m, n)) < 0.6)
    a[np.arange(m), rng.integers(0, n, m)] += 0.1  # every row coverable
    b = rng.uniform(0, 2, m)
    c = rng.uniform(0.05, 2, n)
    monotone = bool(seed % 2)
    sol = lp_solve(LPProblem(c, a, b, monotone))
    ref = _highs(c, a, b, monotone)
    assert ref.status == 0 and sol.status == "optimal"
    assert sol.value == pytest.approx(ref.fun, rel=1e-9, abs=1e-12)
    x = sol.solution
    assert np.all(x >= -1e-12)
    assert np.all(a @ x >= b - 1e-9 * max(1.0, np.abs(b).max()))
    assert sol.max_constraint_violation <= 1e-9 * max(1.0, np.abs(b).max())
    if monotone:
        assert np.all(np.diff(x) <= 1e-12)


def test_degenerate_covering():
    # many identical rows: stresses the ratio test and anti-cycling
    a = np.tile([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]], (15, 1))
    b = np.ones(30)
    sol = lp_solve(LPProblem([1.0, 1.0, 1.0], a, b))
    assert sol.value == pytest.approx(1.0)
