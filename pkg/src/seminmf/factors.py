"""Exact factorization constructions and the semi-nonnegative rank.

Three building blocks:

* ``lift_rank_plus_one`` turns any product A @ B into a factorization
  with one extra inner dimension whose right factor is nonnegative,
  by appending the balancing column -A.sum(axis=1) and shifting each
  column of B just enough to clear its most negative entry.

* ``exact_semi_nmf_same_rank`` keeps the inner dimension: given a
  witness y with B.T y > 0 on the nonzero columns, a rank-one row
  correction  V = B + alpha x^T  (x = B.T y) makes V nonnegative, and
  U absorbs the inverse correction through the Sherman-Morrison
  identity so that U @ V = A @ B exactly.

* ``semi_rank`` combines both: the semi-nonnegative rank of a matrix is
  its rank when the nonzero columns of a rank-revealing right factor
  fit in an open half space, and rank + 1 otherwise, and an exact
  nonnegative-right factorization is produced either way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .halfspace import HalfspaceCertificate, lp_feasibility
from .linalg import as_matrix, frob

__all__ = [
    "Factorization",
    "SemiRankReport",
    "make_factorization",
    "lift_rank_plus_one",
    "sign_flip",
    "exact_semi_nmf_same_rank",
    "semi_rank",
]

# numerical-rank cutoff: sigma_i <= max(m, n) * sigma_1 * RANK_RTOL is zero
RANK_RTOL = 1e-10
ZERO_COL_TOL = 1e-12
X_FLOOR = 1e-12  # floor on x entries before dividing in the alpha step


@dataclass(frozen=True)
class Factorization:
    """A pair (U, V) with V >= 0 and its Frobenius error against a source matrix.

    ``clamped`` records the largest magnitude of negative roundoff dust
    that was zeroed out of V at construction time.
    """

    U: np.ndarray
    V: np.ndarray
    frob_error: float
    clamped: float = 0.0


def make_factorization(M, U, V, clamp_tol: float = 1e-12) -> Factorization:
    """Build a Factorization, clamping negative dust in V to zero.

    Entries of V below ``-clamp_tol * max(1, max|V|)`` are treated as a
    bug in the caller and rejected.
    """
    M = as_matrix(M, "M")
    U = as_matrix(U, "U")
    V = as_matrix(V, "V")
    scale = max(1.0, float(np.max(np.abs(V), initial=0.0)))
    low = float(V.min(initial=0.0))
    if low < -clamp_tol * scale:
        raise ValueError(f"V has a negative entry {low:.3e} beyond roundoff dust")
    clamped = max(0.0, -low)
    V = np.maximum(V, 0.0)
    return Factorization(U=U, V=V, frob_error=frob(M - U @ V), clamped=clamped)


def lift_rank_plus_one(A, B) -> Factorization:
    """Exact factorization of A @ B with nonnegative right factor and rank + 1 width.

    U = [A, -A e];  V stacks B over a zero row and shifts each column j by
    max(0, -min_i B_ij), which cancels in the product because the columns
    of U sum to zero.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape[1] != B.shape[0]:
        raise ValueError("A and B are not conformable")
    k, n = B.shape
    U = np.hstack([A, -A.sum(axis=1, keepdims=True)])
    shift = np.maximum(0.0, -B.min(axis=0, initial=0.0))
    V = np.vstack([B, np.zeros((1, n))]) + shift
    return make_factorization(A @ B, U, V)


def sign_flip(A, B):
    """Negate matched (column of A, row of B) pairs to push B's rows positive.

    Row i flips when min_j B_ij <= min_j(-B_ij); the product A @ B is
    unchanged exactly.  Returns new arrays.
    """
    A = as_matrix(A, "A").copy()
    B = as_matrix(B, "B").copy()
    if A.shape[1] != B.shape[0]:
        raise ValueError("A and B are not conformable")
    for i in range(B.shape[0]):
        if B.shape[1] and B[i].min() <= (-B[i]).min():
            B[i] = -B[i]
            A[:, i] = -A[:, i]
    return A, B


def exact_semi_nmf_same_rank(A, B, y) -> Factorization:
    """Rank-preserving exact factorization A @ B = U @ V with V >= 0.

    Requires x = B.T y > 0 on the nonzero columns of B (y comes from a
    half-space certificate) and every row of B to have a positive
    maximum (arrange with ``sign_flip`` first).  Columns of B below the
    zero tolerance map to exactly zero columns of V.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    y = np.asarray(y, dtype=np.float64)
    r, n = B.shape
    if A.shape[1] != r or y.shape != (r,):
        raise ValueError("A, B, y have inconsistent shapes")
    if r == 0:
        return make_factorization(A @ B, A.copy(), B.copy())

    keep = np.linalg.norm(B, axis=0) > ZERO_COL_TOL * float(np.max(np.abs(B), initial=0.0))
    if B[:, keep].size and B[:, keep].max(axis=1).min() <= 0.0:
        raise ValueError("every row of B needs a positive maximum; sign_flip first")
    x = B.T @ y
    if keep.any() and x[keep].min() <= 0.0:
        raise ValueError("witness y does not satisfy B.T y > 0 on nonzero columns")

    alpha = np.zeros(r)
    if keep.any():
        xk = np.maximum(x[keep], X_FLOOR)
        alpha = np.maximum(0.0, (-B[:, keep] / xk).max(axis=1))
    ya = float(y @ alpha)
    if abs(1.0 + ya) < 1e-12:
        raise NumericalError(f"rank-one correction breakdown: y.alpha = {ya:.3e}")

    V = B + np.outer(alpha, x)
    V[:, ~keep] = 0.0
    U = A - np.outer(A @ alpha, y) / (1.0 + ya)
    return make_factorization(A @ B, U, V)


def _witness_candidates(B, y, keep):
    """The witness itself, then deterministic retreats inside the feasibility cone.

    The rank-one correction is singular exactly when y.alpha = -1, which
    happens when a single all-nonpositive column attains every row's
    alpha maximum.  Witnesses are non-unique: pulling y against another
    negative column reshuffles the per-row maxima and escapes the
    breakdown.  A fixed-seeded jitter sweep backs that up.
    """
    yield y
    Bk = B[:, keep] if keep.any() else B
    x = Bk.T @ y

    # targeted: shrink the product on each column that carries negativity
    for j in range(Bk.shape[1]):
        if Bk[:, j].min() >= 0.0:
            continue
        w = Bk[:, j]
        denom = Bk.T @ w
        pos = denom > 1e-12
        if not pos.any():
            continue
        tmax = 0.9 * float(np.min(x[pos] / denom[pos]))
        for frac in (1.0, 0.5, 0.25):
            cand = y - frac * tmax * w
            if (Bk.T @ cand).min(initial=1.0) > 0.0:
                yield cand

    rng = np.random.Generator(np.random.PCG64(0x5EB1))
    scale = float(np.linalg.norm(y)) or 1.0
    for sigma in (0.01, 0.05, 0.2, 0.5):
        for _ in range(32):
            cand = y * (1.0 + sigma * rng.standard_normal()) + (
                sigma * scale * rng.standard_normal(y.shape)
            )
            if (Bk.T @ cand).min(initial=1.0) > 0.0:
                yield cand


def _exact_same_rank_robust(A, B, y, keep):
    """Rank-preserving construction with witness-jitter retry on breakdown."""
    ab_norm = frob(A @ B)
    tol = 1e-9 * max(ab_norm, 1e-300)
    last_exc = None
    best = None
    for cand in _witness_candidates(B, y, keep):
        try:
            fact = exact_semi_nmf_same_rank(A, B, cand)
        except (ValueError, NumericalError) as exc:
            last_exc = exc
            continue
        if fact.frob_error <= tol:
            return fact
        if best is None or fact.frob_error < best.frob_error:
            best = fact
    if best is not None:
        return best
    raise NumericalError(
        f"rank-preserving construction failed for every witness candidate: {last_exc}"
    )


@dataclass(frozen=True)
class SemiRankReport:
    """Rank, semi-nonnegative rank, the half-space certificate that
    separates the two cases, and an exact factorization of the input."""

    rank: int
    semi_rank: int
    certificate: HalfspaceCertificate
    factorization: Factorization


def semi_rank(M, zero_tol: float = ZERO_COL_TOL) -> SemiRankReport:
    """Semi-nonnegative rank of M with an exact witnessing factorization.

    The rank is the numerical rank from the SVD.  The certificate tests
    the rank-revealing right factor restricted to the nonzero columns of
    M; when it is feasible the factorization keeps the same inner
    dimension, otherwise the lift adds one.
    """
    M = as_matrix(M, "M")
    m, n = M.shape
    Uf, S, Vt = np.linalg.svd(M, full_matrices=False)
    cutoff = max(m, n) * RANK_RTOL * (S[0] if S.size else 0.0)
    r = int(np.sum(S > cutoff))

    if r == 0:
        cert = HalfspaceCertificate(feasible=True, z=np.ones(0), margin=np.inf)
        fact = Factorization(U=np.zeros((m, 0)), V=np.zeros((0, n)), frob_error=frob(M))
        return SemiRankReport(rank=0, semi_rank=0, certificate=cert, factorization=fact)

    A = Uf[:, :r] * S[:r]
    B = Vt[:r, :]
    A, B = sign_flip(A, B)

    scale = float(np.max(np.abs(M)))
    keep = np.linalg.norm(M, axis=0) > zero_tol * scale
    keep &= np.linalg.norm(B, axis=0) > 0.0
    cert = (
        lp_feasibility(B[:, keep])
        if keep.any()
        else HalfspaceCertificate(feasible=True, z=np.ones(r), margin=np.inf)
    )

    if cert.feasible:
        Bc = B.copy()
        Bc[:, ~keep] = 0.0
        inner = _exact_same_rank_robust(A, Bc, cert.z, keep)
        rs = r
    else:
        inner = lift_rank_plus_one(A, B)
        rs = r + 1
    V = inner.V.copy()
    V[:, ~keep] = 0.0
    fact = Factorization(
        U=inner.U, V=V, frob_error=frob(M - inner.U @ V), clamped=inner.clamped
    )
    return SemiRankReport(rank=r, semi_rank=rs, certificate=cert, factorization=fact)
