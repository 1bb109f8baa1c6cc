"""Dense revised simplex for ``min c.x  s.t.  A x = b, x >= 0``.

Built for the shape of the design LP's dual: few rows (about 2n + 4) and tens
of thousands of columns.  The basis matrix is re-factored every iteration,
which is cheap at that row count and keeps the iterates accurate.

Pricing is Dantzig's rule (most negative reduced cost).  After a run of
degenerate pivots the solver switches to Bland's rule (lowest eligible
index on both entering and leaving side), which cannot cycle, and returns to
Dantzig after the next pivot that makes progress.  Both rules are
deterministic, so identical inputs give identical outputs.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from .errors import SolverError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class SimplexResult:
    status: str
    x: Optional[np.ndarray]
    objective: Optional[float]
    duals: Optional[np.ndarray]
    basis: np.ndarray
    iterations: int
    phase1_iterations: int
    bland_pivots: int


class _Tableau:
    """Basis bookkeeping shared by both phases."""

    def __init__(self, A, b, cost, basis, tol, max_iter, degenerate_limit):
        self.A = A
        self.b = b
        self.cost = cost
        self.basis = np.array(basis, dtype=np.int64)
        self.tol = tol
        self.max_iter = max_iter
        self.degenerate_limit = degenerate_limit
        self.iterations = 0
        self.bland_pivots = 0

    def factor(self):
        self.lu = linalg.lu_factor(self.A[:, self.basis], check_finite=False)
        x_b = linalg.lu_solve(self.lu, self.b, check_finite=False)
        return np.maximum(x_b, 0.0)

    def duals(self):
        return linalg.lu_solve(self.lu, self.cost[self.basis], trans=1, check_finite=False)

    def run(self):
        """Pivot to optimality; return OPTIMAL or UNBOUNDED."""
        degenerate_run = 0
        while True:
            x_b = self.factor()
            pi = self.duals()
            reduced = self.cost - self.A.T @ pi
            reduced[self.basis] = 0.0
            bland = degenerate_run >= self.degenerate_limit
            candidates = np.flatnonzero(reduced < -self.tol)
            if candidates.size == 0:
                return OPTIMAL
            if self.iterations >= self.max_iter:
                raise SolverError(
                    f"simplex hit the iteration cap ({self.max_iter}) "
                    f"with {self.bland_pivots} Bland pivots")
            if bland:
                enter = int(candidates[0])
                self.bland_pivots += 1
            else:
                enter = int(candidates[np.argmin(reduced[candidates])])
            col = linalg.lu_solve(self.lu, self.A[:, enter], check_finite=False)
            rows = np.flatnonzero(col > self.tol)
            if rows.size == 0:
                return UNBOUNDED
            ratios = x_b[rows] / col[rows]
            step = ratios.min()
            tied = rows[ratios <= step + self.tol * max(1.0, step)]
            if bland:
                leave = int(tied[np.argmin(self.basis[tied])])
            else:
                leave = int(tied[np.argmax(col[tied])])
            self.basis[leave] = enter
            self.iterations += 1
            degenerate_run = degenerate_run + 1 if step <= self.tol else 0


def solve(c, A, b, basis=None, tol=1e-9, max_iter=50_000, degenerate_limit=50,
          perturb=0.0):
    """Solve a standard-form LP.

    ``basis`` may name a feasible starting basis (column indices); otherwise
    phase 1 adds one artificial column per row and minimizes their sum.
    The returned ``duals`` are the simplex multipliers ``B^-T c_B``.

    With ``perturb > 0`` and a starting basis, ``b`` is replaced by
    ``b + B_0 eps`` (``eps_i`` distinct, of size ``perturb``) so that the
    start is non-degenerate.  ``x`` and ``objective`` then refer to the
    perturbed problem; the duals still satisfy ``A^T pi <= c`` and are
    optimal for the perturbed right-hand side.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    phase1_iters = 0
    bland = 0
    sign = np.ones(m)
    given_basis = basis is not None

    if basis is None:
        sign = np.where(b < 0, -1.0, 1.0)
        A = A * sign[:, None]
        b = b * sign
        aux = np.hstack([A, np.eye(m)])
        aux_cost = np.concatenate([np.zeros(n), np.ones(m)])
        tab = _Tableau(aux, b, aux_cost, np.arange(n, n + m), tol, max_iter, degenerate_limit)
        tab.run()
        x_b = tab.factor()
        phase1_iters = tab.iterations
        bland = tab.bland_pivots
        infeas = float(aux_cost[tab.basis] @ x_b)
        if infeas > tol * max(1.0, np.abs(b).max()):
            return SimplexResult(INFEASIBLE, None, None, None, tab.basis, phase1_iters,
                                 phase1_iters, bland)
        basis = _drive_out_artificials(tab, n)
        if basis is None:
            raise SolverError("redundant equality rows are not supported")
        max_iter = max_iter - phase1_iters

    if perturb > 0.0 and given_basis:
        eps = perturb * (1.0 + np.arange(m) / m)
        b = b + A[:, np.asarray(basis)] @ eps

    tab = _Tableau(A, b, c, basis, tol, max_iter, degenerate_limit)
    status = tab.run()
    x_b = tab.factor()
    total = tab.iterations + phase1_iters
    bland += tab.bland_pivots
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED, None, None, None, tab.basis, total, phase1_iters, bland)
    x = np.zeros(n)
    x[tab.basis] = x_b
    return SimplexResult(OPTIMAL, x, float(c @ x), sign * tab.duals(), tab.basis, total,
                         phase1_iters, bland)


def _drive_out_artificials(tab, n):
    """Replace zero-level artificial basics by original columns."""
    basis = tab.basis.copy()
    for row in np.flatnonzero(basis >= n):
        tab.basis = basis
        tab.factor()
        # row `row` of B^-1 A restricted to original, non-basic columns
        unit = np.zeros(len(basis))
        unit[row] = 1.0
        tableau_row = linalg.lu_solve(tab.lu, unit, trans=1, check_finite=False) @ tab.A[:, :n]
        tableau_row[basis[basis < n]] = 0.0
        j = int(np.argmax(np.abs(tableau_row)))
        if abs(tableau_row[j]) <= tab.tol:
            return None
        basis[row] = j
    return basis
