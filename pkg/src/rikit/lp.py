"""Dense two-phase simplex for small covering LPs.

    minimise c.x  subject to  A x >= b,  x >= 0  (optionally x_1 >= ... >= x_n)

Monotone problems are solved in the variables y_k = x_k - x_{k+1} >= 0,
i.e. x = U y with U upper triangular of ones, which turns the ordering into
plain nonnegativity.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IterationLimit

PIVOT_TOL = 1e-9
# Harris ratio-test relaxation (scaled units)
HARRIS_TOL = 1e-9
COST_TOL = 1e-10
FEAS_TOL = 1e-9
# degenerate pivots tolerated under Dantzig's rule before switching to Bland
STALL_LIMIT = 50
# pivots between recomputations of the tableau from the original data
REINVERT_EVERY = 40


@dataclass(frozen=True, eq=False)
class LPProblem:
    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray
    monotone: bool = False

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        a = np.atleast_2d(np.asarray(self.constraint_matrix, dtype=float))
        b = np.asarray(self.rhs, dtype=float).ravel()
        if a.shape != (b.size, c.size):
            raise DimensionMismatch(f"matrix {a.shape} vs {b.size} rows and {c.size} columns")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("LP data must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraint_matrix", a)
        object.__setattr__(self, "rhs", b)


@dataclass(frozen=True, eq=False)
class LPSolution:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: float
    solution: np.ndarray
    max_constraint_violation: float
    iterations: int = 0

    @property
    def feasible(self):
        return self.status == "optimal"


class _Tableau:
    def __init__(self, a, b, basis):
        m, n = a.shape
        self.t = np.zeros((m + 1, n + 1))
        self.t[:m, :n] = a
        self.t[:m, n] = b
        self.a0 = np.hstack([a, b[:, None]])
        self.basis = list(basis)
        self.iterations = 0
        self.cost = np.zeros(n)

    def reinvert(self):
        """Rebuild the tableau as B^-1 [A | b] to shed accumulated round-off."""
        m = len(self.basis)
        big_b = self.a0[:, self.basis]
        try:
            self.t[:m] = np.linalg.solve(big_b, self.a0)
        except np.linalg.LinAlgError:
            return
        self.set_cost(self.cost)

    def set_cost(self, cost):
        self.cost = np.asarray(cost, dtype=float)
        m = len(self.basis)
        self.t[m, :-1] = cost
        self.t[m, -1] = 0.0
        for i, j in enumerate(self.basis):
            if self.t[m, j] != 0.0:
                self.t[m] -= self.t[m, j] * self.t[i]

    def pivot(self, r, e):
        t = self.t
        t[r] /= t[r, e]
        col = t[:, e].copy()
        col[r] = 0.0
        t -= np.outer(col, t[r])
        self.basis[r] = e
        self.iterations += 1

    def run(self, allowed, max_iter):
        """Optimise the current cost row over columns ``allowed``."""
        t = self.t
        m = len(self.basis)
        bland = False
        stall = 0
        last = t[m, -1]
        while True:
            red = t[m, :-1]
            cand = np.flatnonzero(allowed & (red < -COST_TOL))
            if cand.size == 0:
                return "optimal"
            e = int(cand[0]) if bland else int(cand[np.argmin(red[cand])])
            col = t[:m, e]
            pos = col > PIVOT_TOL
            if not pos.any():
                return "unbounded"
            rhs = t[:m, -1]
            # Harris two-pass test: relax the bounds, then take the largest
            # pivot among rows within the relaxed step
            relaxed = np.full(m, math.inf)
            relaxed[pos] = (np.maximum(rhs[pos], 0.0) + HARRIS_TOL) / col[pos]
            theta = relaxed.min()
            ratios = np.full(m, math.inf)
            ratios[pos] = np.maximum(rhs[pos], 0.0) / col[pos]
            ties = np.flatnonzero(ratios <= theta)
            if bland:
                exact = ratios[ties].min()
                ties = ties[ratios[ties] <= exact + 1e-12 * max(1.0, exact)]
                r = int(ties[np.argmin(np.array(self.basis)[ties])])
            else:
                r = int(ties[np.argmax(col[ties])])
            self.pivot(r, e)
            if self.iterations % REINVERT_EVERY == 0:
                self.reinvert()
            if self.iterations > max_iter:
                raise IterationLimit(f"simplex exceeded {max_iter} pivots")
            if t[m, -1] > last + 1e-14 * max(1.0, abs(last)):
                last = t[m, -1]
                stall = 0
            else:
                stall += 1
                if stall >= STALL_LIMIT:
                    bland = True


def _scale(a, b):
    """Row then column equilibration; returns scaled data and factors."""
    rs = np.abs(a).max(axis=1)
    rs = np.where(rs > 0, rs, 1.0)
    a = a / rs[:, None]
    b = b / rs
    cs = np.abs(a).max(axis=0)
    cs = np.where(cs > 0, cs, 1.0)
    return a / cs[None, :], b, rs, cs


def _solve_std(c, a, b, max_iter):
    """min c.y, a y >= b, y >= 0 (no ordering)."""
    m, n = a.shape
    a_s, b_s, rs, cs = _scale(a, b)
    c_s = c / cs
    # rows with b <= 0 are flipped so their surplus column can start basic
    flip = b_s <= 0
    sign = np.where(flip, -1.0, 1.0)
    need_art = np.flatnonzero(~flip)
    k = need_art.size
    big = np.zeros((m, n + m + k))
    big[:, :n] = a_s * sign[:, None]
    big[:, n:n + m] = -np.diag(sign)
    big[need_art, n + m + np.arange(k)] = 1.0
    rhs = b_s * sign
    basis = np.empty(m, dtype=int)
    basis[flip] = n + np.flatnonzero(flip)
    basis[need_art] = n + m + np.arange(k)
    tab = _Tableau(big, rhs, basis)
    total = n + m + k
    allowed = np.ones(total, dtype=bool)
    if k:
        cost1 = np.zeros(total)
        cost1[n + m:] = 1.0
        tab.set_cost(cost1)
        status = tab.run(allowed, max_iter)
        if -tab.t[m, -1] > FEAS_TOL * max(1.0, np.abs(rhs).max()):
            return "infeasible", None, tab.iterations
        # drive artificials out of the basis
        for i in range(m):
            if tab.basis[i] >= n + m:
                row = tab.t[i, :n + m]
                nz = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                if nz.size:
                    tab.pivot(i, int(nz[0]))
        allowed[n + m:] = False
    cost2 = np.zeros(total)
    cost2[:n] = c_s
    tab.set_cost(cost2)
    status = tab.run(allowed, max_iter)
    if status == "unbounded":
        return "unbounded", None, tab.iterations
    y = np.zeros(total)
    bas = np.array(tab.basis)
    y[bas] = tab.t[:m, -1]
    # polish the basic solution with a direct solve
    real = bas < n + m
    try:
        cols = bas[real]
        sol, *_ = np.linalg.lstsq(big[:, cols], rhs, rcond=None)
        y_pol = np.zeros(total)
        y_pol[cols] = np.maximum(sol, 0.0)
        if np.abs(big[:, :n + m] @ y_pol[:n + m] - rhs).max() <= np.abs(
                big[:, :n + m] @ y[:n + m] - rhs).max() + 1e-15:
            y = y_pol
    except np.linalg.LinAlgError:
        pass
    return "optimal", np.maximum(y[:n], 0.0) / cs, tab.iterations


def _solve_dual(c, a, b, max_iter):
    """Same problem through its dual max b.z, A^T z <= c, z >= 0.

    With c >= 0 the slack basis is feasible, so no phase one is needed and
    the tableau has one row per primal variable. The primal solution is
    read off the reduced costs of the slack columns, then polished on the
    active set.
    """
    m, n = a.shape
    a_s, b_s, rs, cs = _scale(a, b)
    c_s = c / cs
    big = np.hstack([a_s.T, np.eye(n)])
    tab = _Tableau(big, c_s, m + np.arange(n))
    cost = np.concatenate([-b_s, np.zeros(n)])
    tab.set_cost(cost)
    status = tab.run(np.ones(m + n, dtype=bool), max_iter)
    if status == "unbounded":
        return "infeasible", None, tab.iterations
    y = np.maximum(tab.t[n, m:m + n], 0.0)
    # complementary slackness: basic duals mark tight primal rows
    bas = np.array(tab.basis)
    tight = bas[bas < m]
    support = np.flatnonzero(y > 0)
    if tight.size and support.size:
        sol, *_ = np.linalg.lstsq(a_s[np.ix_(tight, support)], b_s[tight], rcond=None)
        y_pol = np.zeros(n)
        y_pol[support] = np.maximum(sol, 0.0)
        if np.maximum(b_s - a_s @ y_pol, 0).max() <= np.maximum(b_s - a_s @ y, 0).max():
            y = y_pol
    return "optimal", y / cs, tab.iterations


def lp_solve(p, max_iter=None):
    c, a, b = p.objective, p.constraint_matrix, p.rhs
    m, n = a.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    if p.monotone:
        c_w, a_w = np.cumsum(c), np.cumsum(a, axis=1)
    else:
        c_w, a_w = c, a
    solver = _solve_dual if np.all(c_w >= 0) else _solve_std
    status, y, iters = solver(c_w, a_w, b, max_iter)
    if status != "optimal":
        val = math.inf if status == "infeasible" else -math.inf
        return LPSolution(status, val, np.full(n, math.nan), math.inf, iters)
    x = np.cumsum(y[::-1])[::-1] if p.monotone else y
    viol = np.maximum(b - a @ x, 0.0)
    scale = max(1.0, float(np.abs(b).max())) if b.size else 1.0
    return LPSolution("optimal", float(c @ x), x, float(viol.max() / scale) if viol.size else 0.0, iters)
