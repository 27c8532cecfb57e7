"""Dense two-phase tableau simplex for small linear programs.

Solves  min c.x  subject to  A x = b,  x >= 0.

Pivoting uses Dantzig's rule (most negative reduced cost) and switches
permanently to Bland's rule after a run of non-improving pivots, which
rules out cycling while keeping the common case fast.  Problem sizes in
this package are a few hundred rows and columns, so a dense tableau is
the right tool: every verdict we need (feasible / infeasible to a fixed
tolerance) comes straight off the optimal basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import LpInfeasible, LpUnbounded, NumericalError

__all__ = ["SimplexResult", "simplex_min"]

RCOST_TOL = 1e-9  # reduced cost below -RCOST_TOL enters the basis
PIVOT_TOL = 1e-10  # tableau entries above this are eligible pivots
STALL_LIMIT = 64  # non-improving pivots before Bland's rule takes over
FLOOR_TOL = 1e-11  # stop once the objective is this close to a known bound


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    objective: float
    iterations: int


def _pivot(T: np.ndarray, red: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    red -= red[col] * T[row]


def _run(T, red, basis, allowed, max_iter, it_start, bland, lock_from=None, floor=None):
    """Drive the tableau to optimality; returns (iterations, bland_mode).

    Variables with index >= lock_from are barred from re-entering the
    basis once they leave (used for phase-1 artificials).  When a lower
    bound ``floor`` on the objective is known (phase 1, and feasibility
    LPs whose objective is a nonnegative slack), the loop stops as soon
    as the objective reaches it; this sidesteps the long degenerate
    walks an optimal face can otherwise demand from Bland's rule.
    """
    it = it_start
    stall = 0
    best = -red[-1]
    while True:
        if floor is not None and -red[-1] <= floor + FLOOR_TOL * (1.0 + abs(floor)):
            return it, bland
        rc = red[:-1]
        if bland:
            cand = np.flatnonzero(allowed & (rc < -RCOST_TOL))
            if cand.size == 0:
                return it, bland
            col = int(cand[0])
        else:
            masked = np.where(allowed, rc, np.inf)
            col = int(np.argmin(masked))
            if masked[col] >= -RCOST_TOL:
                return it, bland
        eligible = T[:, col] > PIVOT_TOL
        ratios = np.full(T.shape[0], np.inf)
        ratios[eligible] = T[eligible, -1] / T[eligible, col]
        row = int(np.argmin(ratios))
        if not np.isfinite(ratios[row]):
            raise LpUnbounded("objective unbounded below")
        # break ratio ties on the smallest basis index (part of Bland's rule)
        ties = np.flatnonzero(ratios <= ratios[row] + PIVOT_TOL * (1.0 + abs(ratios[row])))
        if ties.size > 1:
            row = int(ties[np.argmin(basis[ties])])
        leaving = basis[row]
        _pivot(T, red, row, col)
        basis[row] = col
        if lock_from is not None and leaving >= lock_from:
            allowed[leaving] = False
        it += 1
        if it > max_iter:
            raise NumericalError(
                f"simplex iteration limit exceeded ({max_iter} pivots, "
                f"objective {-red[-1]:.6e})"
            )
        obj = -red[-1]
        if obj < best - 1e-12 * (1.0 + abs(best)):
            best = obj
            stall = 0
        else:
            stall += 1
            if stall >= STALL_LIMIT:
                bland = True


def simplex_min(
    c, A, b, max_iter: int | None = None, objective_floor: float | None = None
) -> SimplexResult:
    """Minimize c.x over {A x = b, x >= 0}.

    ``objective_floor`` is an optional known lower bound on the optimum;
    the solve stops early once the objective reaches it.  Raises
    LpInfeasible / LpUnbounded for those outcomes and NumericalError
    when the pivot budget runs out.
    """
    A = np.array(A, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("inconsistent LP dimensions")
    if max_iter is None:
        max_iter = max(2000, 50 * (m + n))

    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificial basis, minimize the sum of artificials
    T = np.hstack([A, np.eye(m), b[:, None]])
    basis = np.arange(n, n + m)
    red = np.concatenate([-A.sum(axis=0), np.zeros(m), [b.sum()]])
    red[-1] *= -1.0
    allowed = np.ones(n + m, dtype=bool)
    it, bland = _run(T, red, basis, allowed, max_iter, 0, bland=False, lock_from=n, floor=0.0)

    if -red[-1] > 1e-9 * (1.0 + float(np.abs(b).max(initial=0.0))):
        raise LpInfeasible(f"phase-1 optimum {-red[-1]:.6e} > 0")

    # drive leftover artificials out of the basis; drop redundant rows
    keep = np.ones(m, dtype=bool)
    for row in range(m):
        if basis[row] < n:
            continue
        cols = np.flatnonzero(np.abs(T[row, :n]) > RCOST_TOL)
        if cols.size:
            _pivot(T, red, row, int(cols[0]))
            basis[row] = int(cols[0])
        else:
            keep[row] = False
    T = np.hstack([T[keep][:, :n], T[keep][:, -1:]])
    basis = basis[keep]

    # phase 2: original objective
    red = np.empty(n + 1)
    red[:n] = c - c[basis] @ T[:, :n]
    red[-1] = -float(c[basis] @ T[:, -1])
    allowed = np.ones(n, dtype=bool)
    it, _ = _run(T, red, basis, allowed, max_iter, it, bland, floor=objective_floor)

    x = np.zeros(n)
    x[basis] = T[:, -1]
    return SimplexResult(x=x, objective=float(c @ x), iterations=it)
