"""Half-space certificate and bisection tests."""

import numpy as np
import pytest

from seminmf.halfspace import bisection_epsilon, halfspace_feasible, lp_feasibility
from seminmf.linalg import random_gaussian

TIGHT_2x3 = np.array([[1.0, 0.0, -1.0], [0.0, 1.0, -1.0]])  # spans the whole plane
BOUNDARY_2x3 = np.array([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]])  # two antipodal columns


def check_witness(M, cert, zero_tol=1e-12):
    scale = np.abs(M).max(initial=0.0)
    keep = np.linalg.norm(M, axis=0) > zero_tol * scale
    if keep.any():
        assert np.min(M[:, keep].T @ cert.z) >= 1.0 - 1e-9


class TestHalfspaceFeasible:
    def test_plane_spanning_columns_infeasible(self):
        assert not halfspace_feasible(TIGHT_2x3).feasible

    def test_antipodal_boundary_infeasible(self):
        assert not halfspace_feasible(BOUNDARY_2x3).feasible

    def test_positive_matrix_feasible(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            M = rng.random((4, 7)) + 0.01
            cert = halfspace_feasible(M)
            assert cert.feasible
            check_witness(M, cert)

    def test_zero_matrix_vacuous(self):
        cert = halfspace_feasible(np.zeros((3, 4)))
        assert cert.feasible and cert.margin == np.inf

    def test_column_scaling_invariance(self):
        rng = np.random.default_rng(3)
        for seed in range(8):
            M = random_gaussian(3, 6, seed=seed)
            scales = rng.uniform(0.2, 5.0, size=6)
            assert (
                halfspace_feasible(M).feasible
                == halfspace_feasible(M * scales).feasible
            )

    def test_zero_column_append_invariance(self):
        for seed in range(8):
            M = random_gaussian(3, 6, seed=seed)
            M_aug = np.hstack([M, np.zeros((3, 2))])
            assert halfspace_feasible(M).feasible == halfspace_feasible(M_aug).feasible

    def test_full_column_rank_feasible_on_right_factor(self):
        # a matrix of rank n has a positive vector in its row space, and
        # a rank-revealing right factor must certify it
        for seed in range(10):
            M = random_gaussian(9, 5, seed=seed)
            _, _, Vt = np.linalg.svd(M, full_matrices=False)
            assert halfspace_feasible(Vt).feasible


class TestLpFeasibility:
    def test_single_column(self):
        c = np.array([[3.0], [4.0]])
        cert = lp_feasibility(c)
        assert cert.feasible
        assert float(c[:, 0] @ cert.z) >= 1.0 - 1e-9

    def test_antipodal_infeasible(self):
        C = np.array([[1.0, -1.0], [2.0, -2.0]])
        assert not lp_feasibility(C).feasible

    def test_rejects_zero_column(self):
        with pytest.raises(ValueError, match="nonzero"):
            lp_feasibility(np.array([[1.0, 0.0], [0.0, 0.0]]))

    def test_unit_vectors_within_half_plane(self):
        rng = np.random.default_rng(11)
        angles = rng.uniform(0.0, 2.8, size=20)  # span < pi
        C = np.vstack([np.cos(angles), np.sin(angles)])
        cert = lp_feasibility(C)
        assert cert.feasible
        # angular-gap oracle: wrap-around gap exceeds pi
        s = np.sort(angles)
        gaps = np.append(np.diff(s), 2 * np.pi - (s[-1] - s[0]))
        assert gaps.max() > np.pi
        check_witness(C, cert)

    def test_witness_margin_normalized(self):
        C = np.array([[2.0, 1.0], [0.5, 3.0]])
        cert = lp_feasibility(C)
        assert cert.margin == pytest.approx(1.0, abs=1e-9)


class TestBisection:
    def test_nonnegative_b_returns_zero(self):
        B = np.random.default_rng(4).random((3, 6)) + 0.1
        res = bisection_epsilon(B)
        assert res.epsilon_star == 0.0
        assert res.lp_calls == 1

    def test_plane_spanning_fixture(self):
        res = bisection_epsilon(TIGHT_2x3)
        assert res.epsilon_star > 0.0
        assert res.epsilon_plus == 1.0
        assert res.lp_calls <= 11

    def test_witness_at_epsilon_star(self):
        for seed in range(6):
            B = random_gaussian(3, 8, seed=seed)
            res = bisection_epsilon(B)
            shifted = B + res.epsilon_star
            keep = np.linalg.norm(shifted, axis=0) > 1e-12 * np.abs(shifted).max()
            if keep.any():
                assert np.min(shifted[:, keep].T @ res.y_star) >= 1.0 - 1e-9

    def test_endpoint_feasible_with_scaled_ones(self):
        for seed in range(6):
            B = random_gaussian(4, 6, seed=seed)
            eps_plus = max(0.0, -B.min())
            shifted = B + eps_plus
            keep = np.linalg.norm(shifted, axis=0) > 1e-12 * np.abs(shifted).max()
            y = np.ones(4) / shifted[:, keep].sum(axis=0).min()
            assert np.min(shifted[:, keep].T @ y) >= 1.0 - 1e-12

    def test_trace_bracketing(self):
        for seed in range(6):
            B = random_gaussian(4, 10, seed=seed)
            res = bisection_epsilon(B)
            inf_eps = [e for e, ok in res.trace if not ok]
            feas_eps = [e for e, ok in res.trace if ok]
            if inf_eps and feas_eps:
                assert max(inf_eps) < min(feas_eps)

    def test_interval_width_at_default_precision(self):
        B = random_gaussian(5, 12, seed=42)
        res = bisection_epsilon(B)
        if res.epsilon_star > 0:
            inf_eps = [e for e, ok in res.trace if not ok]
            assert res.epsilon_star - max(inf_eps) <= 1e-3 * res.epsilon_plus + 1e-15

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="nonempty"):
            bisection_epsilon(np.zeros((0, 3)))
