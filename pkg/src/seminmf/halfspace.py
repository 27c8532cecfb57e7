"""Open half-space containment tests and the shifted-feasibility bisection.

A set of nonzero vectors lies in the interior of a common half space
exactly when the system  c.z >= 1  (one inequality per vector) has a
solution.  ``lp_feasibility`` settles that system by minimizing the
uniform slack t in  c.z >= 1 - t,  t >= 0: the system is feasible iff
the optimum t is zero (up to tolerance), and the optimal z is a witness.

``bisection_epsilon`` searches for the smallest shift eps >= 0 such that
the columns of B + eps (entrywise) admit such a witness, by bisection on
eps over [0, eps_plus] with eps_plus = max(0, -min(B)), where the upper
endpoint is always feasible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .linalg import as_matrix
from .simplex import simplex_min

__all__ = [
    "HalfspaceCertificate",
    "BisectionResult",
    "lp_feasibility",
    "halfspace_feasible",
    "bisection_epsilon",
]

MARGIN_TOL = 1e-9  # slack above this means "no witness exists"
ZERO_TOL = 1e-12  # default relative cutoff for treating a column as zero


@dataclass(frozen=True)
class HalfspaceCertificate:
    """Outcome of a half-space interior containment test.

    When ``feasible``, ``z`` satisfies  c.z >= 1 - 1e-9  for every tested
    column c and ``margin`` is the smallest such product (``inf`` when no
    nonzero column was tested).  When infeasible, ``z`` and ``margin``
    are None: the minimized slack stayed above tolerance, so no witness
    exists.
    """

    feasible: bool
    z: np.ndarray | None = None
    margin: float | None = None


@dataclass(frozen=True)
class BisectionResult:
    """Smallest feasible shift found by ``bisection_epsilon``.

    ``trace`` records every (eps, feasible) evaluation in order; the
    bracketing of the search keeps all infeasible entries below all
    feasible ones.
    """

    epsilon_star: float
    y_star: np.ndarray
    epsilon_plus: float
    lp_calls: int
    trace: tuple[tuple[float, bool], ...] = ()


def lp_feasibility(columns, max_iter: int | None = None) -> HalfspaceCertificate:
    """Decide whether all columns lie in the interior of a common half space.

    ``columns`` is an m-by-p matrix whose p columns must all be nonzero.
    Solves  min t  subject to  c_j.z >= b_j - t,  t >= 0  on the
    unit-normalized columns.  The optimum separates cleanly: any witness
    can be scaled until t = 0, while infeasibility forces some product
    nonpositive and hence t >= min b.  The right-hand sides carry a
    deterministic spread (b_j slightly above 1) so the infeasible
    optimum vertex is not degenerate, which keeps the pivot count small.
    The returned witness is rescaled so the minimum product over the
    original columns is 1.
    """
    C = as_matrix(columns, "columns")
    m, p = C.shape
    if p == 0:
        return HalfspaceCertificate(feasible=True, z=np.ones(m), margin=np.inf)
    norms = np.linalg.norm(C, axis=0)
    if np.any(norms == 0.0):
        raise ValueError("lp_feasibility requires nonzero columns")
    Cn = C / norms

    # variables: z+ (m), z- (m), t (1), slack s (p)
    # constraint j:  c_j.(z+ - z-) + t - s_j = b_j,   minimize t
    A = np.hstack([Cn.T, -Cn.T, np.ones((p, 1)), -np.eye(p)])
    b = 1.0 + 1e-3 * (np.arange(p) + 1.0) / p
    cost = np.zeros(2 * m + 1 + p)
    cost[2 * m] = 1.0
    # objective floor 0 lets the solve stop the moment feasibility is proven
    res = simplex_min(cost, A, b, max_iter=max_iter, objective_floor=0.0)
    t_star = res.x[2 * m]

    if t_star > 0.5:
        return HalfspaceCertificate(feasible=False)

    z = (res.x[:m] - res.x[m : 2 * m]) / norms.min()
    margin = float(np.min(C.T @ z))
    if margin <= 0.0:
        raise NumericalError(
            f"half-space witness failed verification: slack {t_star:.3e} "
            f"but margin {margin:.3e}"
        )
    z = z / margin
    return HalfspaceCertificate(feasible=True, z=z, margin=float(np.min(C.T @ z)))


def _nonzero_columns(M: np.ndarray, zero_tol: float) -> np.ndarray:
    """Indices of columns whose 2-norm exceeds zero_tol * max|M|."""
    scale = float(np.max(np.abs(M), initial=0.0))
    norms = np.linalg.norm(M, axis=0)
    return np.flatnonzero(norms > zero_tol * scale)


def halfspace_feasible(M, zero_tol: float = ZERO_TOL) -> HalfspaceCertificate:
    """Containment test for the nonzero columns of M.

    Columns with 2-norm at most ``zero_tol`` times the largest absolute
    entry of M count as zero and are excluded; with no columns left the
    test is vacuously feasible.
    """
    M = as_matrix(M, "M")
    if zero_tol < 0:
        raise ValueError("zero_tol must be nonnegative")
    keep = _nonzero_columns(M, zero_tol)
    if keep.size == 0:
        return HalfspaceCertificate(feasible=True, z=np.ones(M.shape[0]), margin=np.inf)
    return lp_feasibility(M[:, keep])


def _shifted_certificate(B: np.ndarray, eps: float, zero_tol: float):
    """Certificate for the columns of B + eps; returns (cert, used_lp)."""
    shifted = B + eps
    keep = _nonzero_columns(shifted, zero_tol)
    if keep.size == 0:
        return HalfspaceCertificate(feasible=True, z=np.ones(B.shape[0]), margin=np.inf), False
    return lp_feasibility(shifted[:, keep]), True


def _scaled_ones_witness(B: np.ndarray, eps: float, zero_tol: float) -> np.ndarray:
    """Witness y proportional to the all-ones vector, valid when B + eps >= 0."""
    shifted = B + eps
    keep = _nonzero_columns(shifted, zero_tol)
    if keep.size == 0:
        return np.ones(B.shape[0])
    sums = shifted[:, keep].sum(axis=0)
    return np.ones(B.shape[0]) / sums.min()


def bisection_epsilon(B, rel_prec: float = 1e-3, zero_tol: float = ZERO_TOL) -> BisectionResult:
    """Bisection on the shift eps for the relaxed containment problem.

    Checks eps = 0 first and returns immediately when feasible.
    Otherwise bisects on [0, eps_plus] until the bracket width drops to
    ``rel_prec * eps_plus``, returning the smallest feasible eps
    evaluated together with its witness.  At the default precision this
    takes at most ten bisection solves after the eps = 0 check.
    """
    B = as_matrix(B, "B")
    if B.size == 0:
        raise ValueError("B must be nonempty")
    if rel_prec <= 0:
        raise ValueError("rel_prec must be positive")
    eps_plus = float(max(0.0, -B.min()))
    lp_calls = 0
    trace: list[tuple[float, bool]] = []

    cert0, used = _shifted_certificate(B, 0.0, zero_tol)
    lp_calls += int(used)
    trace.append((0.0, cert0.feasible))
    if cert0.feasible:
        return BisectionResult(0.0, cert0.z, eps_plus, lp_calls, tuple(trace))

    # B + eps_plus >= 0 entrywise, so a scaled all-ones witness works there
    eps_lo, eps_hi = 0.0, eps_plus
    y_hi = _scaled_ones_witness(B, eps_plus, zero_tol)
    trace.append((eps_plus, True))
    while eps_hi - eps_lo > rel_prec * eps_plus:
        mid = 0.5 * (eps_lo + eps_hi)
        cert, used = _shifted_certificate(B, mid, zero_tol)
        lp_calls += int(used)
        trace.append((mid, cert.feasible))
        if cert.feasible:
            eps_hi, y_hi = mid, cert.z
        else:
            eps_lo = mid

    # bracketing invariant: no infeasible evaluation above a feasible one
    inf_eps = [e for e, ok in trace if not ok]
    feas_eps = [e for e, ok in trace if ok]
    if inf_eps and feas_eps and max(inf_eps) >= min(feas_eps):
        raise NumericalError("bisection bracket lost monotone ordering")

    return BisectionResult(float(eps_hi), y_hi, eps_plus, lp_calls, tuple(trace))
