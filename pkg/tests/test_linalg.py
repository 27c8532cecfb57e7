"""Kernel tests: truncated SVD, least squares, seeded RNG."""

import numpy as np
import pytest

from seminmf.linalg import (
    as_matrix,
    best_rank_error,
    least_squares_left,
    random_gaussian,
    random_uniform,
    truncated_svd,
)


class TestAsMatrix:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="NaN or Inf"):
            as_matrix([[1.0, np.nan]])

    def test_rejects_inf(self):
        with pytest.raises(ValueError, match="NaN or Inf"):
            as_matrix([[np.inf, 1.0]])

    def test_rejects_1d(self):
        with pytest.raises(ValueError, match="2-D"):
            as_matrix([1.0, 2.0])


class TestTruncatedSvd:
    def test_diagonal_values(self):
        trip = truncated_svd(np.diag([3.0, 2.0, 1.0]), 2)
        np.testing.assert_allclose(trip.S, [3.0, 2.0])
        M = np.diag([3.0, 2.0, 1.0])
        resid = np.linalg.norm(M - trip.A @ np.diag(trip.S) @ trip.B)
        assert resid == pytest.approx(1.0, rel=1e-12)

    def test_zero_matrix(self):
        trip = truncated_svd(np.zeros((4, 5)), 1)
        np.testing.assert_allclose(trip.S, [0.0])
        assert np.linalg.norm(trip.A @ np.diag(trip.S) @ trip.B) == 0.0

    def test_residual_matches_gram_eigenvalues(self):
        # independent oracle: eigendecomposition of M'M gives sigma_i^2
        M = random_gaussian(20, 30, seed=42)
        k = 5
        trip = truncated_svd(M, k)
        resid = np.linalg.norm(M - trip.A @ np.diag(trip.S) @ trip.B)
        eigs = np.sort(np.linalg.eigvalsh(M @ M.T))[::-1]
        expected = np.sqrt(np.sum(eigs[k:]))
        assert resid == pytest.approx(expected, rel=1e-8)

    def test_orthonormality(self):
        M = random_gaussian(15, 10, seed=3)
        trip = truncated_svd(M, 4)
        np.testing.assert_allclose(trip.A.T @ trip.A, np.eye(4), atol=1e-8)
        np.testing.assert_allclose(trip.B @ trip.B.T, np.eye(4), atol=1e-8)
        assert np.all(np.diff(trip.S) <= 0) and np.all(trip.S >= 0)

    def test_pythagoras(self):
        for seed in range(5):
            M = random_gaussian(12, 9, seed=seed)
            for k in (1, 3, 7):
                trip = truncated_svd(M, k)
                resid2 = np.linalg.norm(M - trip.A @ np.diag(trip.S) @ trip.B) ** 2
                total = resid2 + np.sum(trip.S**2)
                assert total == pytest.approx(np.linalg.norm(M) ** 2, rel=1e-6)

    def test_scale_left(self):
        M = random_gaussian(6, 8, seed=0)
        trip = truncated_svd(M, 2).scale_left()
        assert trip.scaled
        np.testing.assert_allclose(
            trip.A @ trip.B,
            truncated_svd(M, 2).A @ np.diag(truncated_svd(M, 2).S) @ truncated_svd(M, 2).B,
        )

    @pytest.mark.parametrize("k", [0, 4, -1])
    def test_k_out_of_range(self, k):
        with pytest.raises(ValueError, match="out of range"):
            truncated_svd(np.eye(3), k)


class TestBestRankError:
    def test_full_rank_request(self):
        assert best_rank_error(np.eye(3), 3) == 0.0

    def test_diagonal(self):
        assert best_rank_error(np.diag([3.0, 2.0, 1.0]), 1) == pytest.approx(np.sqrt(5.0))


class TestLeastSquaresLeft:
    def test_identity(self):
        V = np.eye(4)
        X = least_squares_left(V, V)
        np.testing.assert_allclose(X, np.eye(4), atol=1e-12)

    def test_scalar_multiple(self):
        V = random_gaussian(3, 7, seed=2)
        X = least_squares_left(2.0 * V, V)
        np.testing.assert_allclose(X, 2.0 * np.eye(3), atol=1e-10)

    def test_gradient_and_random_probe_dominance(self):
        M = random_gaussian(10, 15, seed=7)
        V = random_gaussian(3, 15, seed=8)
        X = least_squares_left(M, V)
        grad = (X @ V - M) @ V.T
        assert np.linalg.norm(grad) <= 1e-8 * np.linalg.norm(M) * np.linalg.norm(V)
        resid = np.linalg.norm(M - X @ V)
        rng = np.random.default_rng(7)
        for _ in range(1000):
            cand = X + 0.1 * rng.standard_normal(X.shape)
            assert resid <= np.linalg.norm(M - cand @ V) + 1e-12


    def test_rank_deficient_min_norm(self):
        # duplicated rows make V rank deficient; the minimizer must be
        # orthogonal to every perturbation that leaves X V unchanged
        base = random_gaussian(2, 10, seed=5)
        V = np.vstack([base, base[0]])
        M = random_gaussian(4, 10, seed=6)
        X = least_squares_left(M, V)
        grad = (X @ V - M) @ V.T
        assert np.linalg.norm(grad) <= 1e-8 * np.linalg.norm(M) * np.linalg.norm(V)
        null_dir = np.array([1.0, 0.0, -1.0])  # (row0 - row2) of V is zero
        np.testing.assert_allclose(null_dir @ V, 0, atol=1e-12)
        # minimum-norm solution has no component along the null direction
        np.testing.assert_allclose(X @ null_dir, 0, atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="column mismatch"):
            least_squares_left(np.ones((2, 3)), np.ones((2, 4)))


class TestRandom:
    def test_uniform_range(self):
        U = random_uniform(2, 2, seed=9)
        assert np.all(U >= 0.0) and np.all(U < 1.0)

    def test_gaussian_moments(self):
        G = random_gaussian(1000, 1, seed=10)
        assert abs(G.mean()) < 0.1
        assert abs(G.var() - 1.0) < 0.15

    def test_determinism(self):
        a = random_uniform(5, 4, seed=11)
        b = random_uniform(5, 4, seed=11)
        assert np.array_equal(a, b)
        g1 = random_gaussian(5, 4, seed=11)
        g2 = random_gaussian(5, 4, seed=11)
        assert np.array_equal(g1, g2)

    def test_seeds_differ(self):
        assert not np.array_equal(random_uniform(4, 4, seed=1), random_uniform(4, 4, seed=2))

    @pytest.mark.parametrize("m,n", [(0, 3), (3, 0), (-1, 2)])
    def test_bad_dims(self, m, n):
        with pytest.raises(ValueError):
            random_uniform(m, n, seed=0)

    def test_bad_seed(self):
        with pytest.raises(ValueError, match="64-bit"):
            random_uniform(2, 2, seed=-1)
