"""
Dense two-phase tableau simplex with Bland's rule.

Solves  min c @ x  s.t.  A_ub @ x <= b_ub,  A_eq @ x == b_eq,  x >= 0.

The problems handed to it come from the Charnes-Cooper construction and have a
few dozen variables at most, so a dense numpy tableau is plenty.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from renewal_opt.config import DEFAULTS, get_tolerance
from renewal_opt.exceptions import OracleError, ValidationError

logger = logging.getLogger("renewal_opt.oracle.simplex")

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """LP in the form accepted by ``simplex_solve``; absent blocks may be None."""

    c: np.ndarray
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None

    @property
    def num_vars(self) -> int:
        return len(self.c)


@dataclass(frozen=True)
class SimplexResult:
    status: str
    x: Optional[np.ndarray]
    objective: Optional[float]
    iterations: int


class _Tableau:
    """
    Rows 0..m-1 hold [B^-1 A | B^-1 b]; the last row holds the reduced costs
    and, in its last column, minus the current objective value.
    """

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: List[int], tol: float):
        m, n = A.shape
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = A
        self.T[:m, n] = b
        self.basis = list(basis)
        self.tol = tol
        self.iterations = 0

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def set_costs(self, cost: np.ndarray) -> None:
        n = self.T.shape[1] - 1
        self.T[-1, :n] = cost
        self.T[-1, n] = 0.0
        for i, j in enumerate(self.basis):
            if self.T[-1, j] != 0.0:
                self.T[-1] -= self.T[-1, j] * self.T[i]

    def pivot(self, i: int, j: int) -> None:
        self.T[i] /= self.T[i, j]
        col = self.T[:, j].copy()
        col[i] = 0.0
        self.T -= np.outer(col, self.T[i])
        self.basis[i] = j
        self.iterations += 1
        logger.debug(f"pivot row {i} col {j}, objective {-self.T[-1, -1]}")

    def run(self, opt_tol: float, allowed: int, max_iter: int) -> str:
        """Bland's rule on the first ``allowed`` columns until optimal or unbounded."""
        while True:
            if self.iterations >= max_iter:
                error_msg = f"simplex exceeded {max_iter} pivots"
                logger.error(error_msg)
                raise OracleError(error_msg)
            reduced = self.T[-1, :allowed]
            candidates = np.flatnonzero(reduced < -opt_tol)
            if len(candidates) == 0:
                return OPTIMAL
            j = int(candidates[0])
            column = self.T[: self.m, j]
            rows = np.flatnonzero(column > self.tol)
            if len(rows) == 0:
                return UNBOUNDED
            ratios = self.T[rows, -1] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + self.tol * max(1.0, abs(best))]
            # Bland: among tied rows leave the smallest basic variable index
            i = int(min(ties, key=lambda r: self.basis[r]))
            self.pivot(i, j)

    def drop_row(self, i: int) -> None:
        self.T = np.delete(self.T, i, axis=0)
        del self.basis[i]


def _standardize(lp: LinearProgram):
    n = lp.num_vars
    c = np.asarray(lp.c, dtype=np.float64)
    A_ub = np.zeros((0, n)) if lp.A_ub is None else np.asarray(lp.A_ub, dtype=np.float64).reshape(-1, n)
    b_ub = np.zeros(0) if lp.b_ub is None else np.asarray(lp.b_ub, dtype=np.float64).reshape(-1)
    A_eq = np.zeros((0, n)) if lp.A_eq is None else np.asarray(lp.A_eq, dtype=np.float64).reshape(-1, n)
    b_eq = np.zeros(0) if lp.b_eq is None else np.asarray(lp.b_eq, dtype=np.float64).reshape(-1)
    if len(b_ub) != A_ub.shape[0] or len(b_eq) != A_eq.shape[0]:
        error_msg = "LP right-hand sides do not match constraint rows"
        logger.error(error_msg)
        raise ValidationError(error_msg)

    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    # slack columns for the inequality rows
    A = np.zeros((m_ub + m_eq, n + m_ub))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    b = np.concatenate([b_ub, b_eq])
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    cost = np.concatenate([c, np.zeros(m_ub)])
    return A, b, cost


def simplex_solve(
    lp: LinearProgram,
    feasibility_tol: Optional[float] = None,
    optimality_tol: Optional[float] = None,
    max_iter: int = DEFAULTS["SIMPLEX_MAX_ITER"],
) -> SimplexResult:
    """
    Solve the LP.

    Phase 1 minimizes the sum of one artificial variable per row; a positive
    optimum (beyond ``feasibility_tol``) means infeasible. Artificials left in
    the basis at zero level are pivoted out, or their row is dropped as
    redundant, before phase 2 runs on the original costs.
    """
    if feasibility_tol is None:
        feasibility_tol = get_tolerance("FEASIBILITY_TOL")
    if optimality_tol is None:
        optimality_tol = get_tolerance("OPTIMALITY_TOL")
    A, b, cost = _standardize(lp)
    m, n = A.shape
    n_orig = lp.num_vars

    # 1. phase 1 on [A | I]
    tab = _Tableau(np.hstack([A, np.eye(m)]), b, basis=list(range(n, n + m)), tol=feasibility_tol)
    tab.set_costs(np.concatenate([np.zeros(n), np.ones(m)]))
    tab.run(optimality_tol, allowed=n + m, max_iter=max_iter)
    phase1 = -tab.T[-1, -1]
    if phase1 > feasibility_tol:
        logger.info(f"simplex: infeasible, phase-1 objective {phase1}")
        return SimplexResult(INFEASIBLE, None, None, tab.iterations)

    # 2. drive artificials out of the basis
    i = 0
    while i < tab.m:
        if tab.basis[i] >= n:
            candidates = np.flatnonzero(np.abs(tab.T[i, :n]) > feasibility_tol)
            if len(candidates):
                tab.pivot(i, int(candidates[0]))
            else:
                tab.drop_row(i)
                continue
        i += 1

    # 3. phase 2 on the original costs, artificial columns barred from entering
    tab.T = np.delete(tab.T, np.s_[n : n + m], axis=1)
    tab.set_costs(cost)
    status = tab.run(optimality_tol, allowed=n, max_iter=max_iter)
    if status == UNBOUNDED:
        logger.info("simplex: unbounded")
        return SimplexResult(UNBOUNDED, None, None, tab.iterations)

    x = np.zeros(n)
    for row, j in enumerate(tab.basis):
        x[j] = tab.T[row, -1]
    x = np.maximum(x, 0.0)[:n_orig]
    objective = float(np.dot(lp.c, x))
    return SimplexResult(OPTIMAL, x, objective, tab.iterations)
