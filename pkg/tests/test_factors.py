"""Exact construction tests: lift, sign flip, rank-preserving correction, semi rank."""

import numpy as np
import pytest

from seminmf.factors import (
    exact_semi_nmf_same_rank,
    lift_rank_plus_one,
    make_factorization,
    semi_rank,
    sign_flip,
)
from seminmf.halfspace import halfspace_feasible
from seminmf.linalg import random_gaussian, random_uniform

TIGHT_2x3 = np.array([[1.0, 0.0, -1.0], [0.0, 1.0, -1.0]])
ASYM_3x3 = np.array([[-1.0, 0.0, -1.0], [0.0, -1.0, -1.0], [1.0, 1.0, 2.0]])


class TestMakeFactorization:
    def test_clamps_dust(self):
        M = np.ones((2, 2))
        V = np.array([[1.0, -1e-13], [0.0, 1.0]])
        fact = make_factorization(M, np.eye(2), V)
        assert fact.V.min() == 0.0
        assert fact.clamped == pytest.approx(1e-13)

    def test_rejects_genuine_negative(self):
        with pytest.raises(ValueError, match="negative"):
            make_factorization(np.ones((2, 2)), np.eye(2), np.array([[1.0, -0.5], [0.0, 1.0]]))


class TestLift:
    def test_hand_worked_example(self):
        A = np.array([[1.0], [1.0]])
        B = np.array([[1.0, -1.0]])
        fact = lift_rank_plus_one(A, B)
        np.testing.assert_allclose(fact.U, [[1.0, -1.0], [1.0, -1.0]])
        np.testing.assert_allclose(fact.V, [[1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_allclose(fact.U @ fact.V, A @ B, atol=1e-15)

    def test_nonnegative_b_gets_no_shift(self):
        A = random_gaussian(4, 2, seed=1)
        B = random_uniform(2, 5, seed=2)
        fact = lift_rank_plus_one(A, B)
        np.testing.assert_allclose(fact.V[:2], B)
        np.testing.assert_allclose(fact.V[2], 0.0)

    def test_exact_product_and_nonnegativity(self):
        A = random_gaussian(5, 3, seed=3)
        B = random_gaussian(3, 8, seed=4)
        fact = lift_rank_plus_one(A, B)
        assert fact.V.min() >= 0.0
        assert fact.frob_error <= 1e-10 * np.linalg.norm(A @ B)

    def test_property_sweep(self):
        # exactness and nonnegativity across many shapes (acceptance-grade)
        rng = np.random.default_rng(0)
        for _ in range(200):
            m, k, n = rng.integers(1, 21, size=3)
            A = rng.standard_normal((m, k))
            B = rng.standard_normal((k, n))
            fact = lift_rank_plus_one(A, B)
            assert fact.V.min() >= 0.0
            assert fact.frob_error <= 1e-10 * max(np.linalg.norm(A @ B), 1e-30)


class TestSignFlip:
    def test_negative_row_flips(self):
        A = np.ones((2, 1))
        B = np.array([[-1.0, -2.0]])
        A2, B2 = sign_flip(A, B)
        np.testing.assert_array_equal(B2, [[1.0, 2.0]])
        np.testing.assert_array_equal(A2, -A)

    def test_positive_row_unchanged(self):
        A = np.ones((2, 1))
        B = np.array([[1.0, 2.0]])
        A2, B2 = sign_flip(A, B)
        np.testing.assert_array_equal(B2, B)
        np.testing.assert_array_equal(A2, A)

    def test_product_exactly_preserved(self):
        for seed in range(10):
            A = random_gaussian(6, 4, seed=seed)
            B = random_gaussian(4, 9, seed=seed + 100)
            A2, B2 = sign_flip(A, B)
            assert np.array_equal(A2 @ B2, A @ B)

    def test_rows_end_with_positive_max(self):
        for seed in range(10):
            B = random_gaussian(5, 7, seed=seed)
            _, B2 = sign_flip(np.eye(5), B)
            assert np.all(B2.max(axis=1) > 0)


class TestExactSameRank:
    def test_nonnegative_b_identity(self):
        A = random_gaussian(5, 3, seed=5)
        B = random_uniform(3, 7, seed=6) + 0.05
        y = np.ones(3) / B.sum(axis=0).min() * 1.01  # positive-margin witness
        fact = exact_semi_nmf_same_rank(A, B, y)
        np.testing.assert_allclose(fact.V, B, atol=1e-12)
        np.testing.assert_allclose(fact.U, A, atol=1e-12)

    def test_fixture_rank2(self):
        rep = semi_rank(ASYM_3x3)
        assert rep.semi_rank == 2
        assert rep.factorization.frob_error <= 1e-9

    def test_random_semi_nonnegative_exact(self):
        rng = np.random.default_rng(7)
        M = rng.standard_normal((8, 3)) @ rng.random((3, 12))
        rep = semi_rank(M)
        assert rep.rank == 3 and rep.semi_rank == 3
        assert rep.factorization.frob_error <= 1e-8 * np.linalg.norm(M)
        assert rep.factorization.V.min() >= 0.0

    def test_y_alpha_strictly_above_minus_one(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            M = rng.standard_normal((6, 3)) @ rng.random((3, 10))
            from seminmf.linalg import truncated_svd

            trip = truncated_svd(M, 3).scale_left()
            A, B = sign_flip(trip.A, trip.B)
            cert = halfspace_feasible(B)
            assert cert.feasible
            alpha_parts = np.maximum(0.0, (-B / np.maximum(B.T @ cert.z, 1e-12)).max(axis=1))
            assert float(cert.z @ alpha_parts) > -1.0 + 1e-9

    def test_requires_positive_row_max(self):
        A = np.eye(2)
        B = np.array([[-1.0, -2.0], [1.0, 2.0]])
        with pytest.raises(ValueError, match="positive maximum"):
            exact_semi_nmf_same_rank(A, B, np.array([1.0, 1.0]))


class TestSemiRank:
    def test_plane_spanning_fixture(self):
        rep = semi_rank(TIGHT_2x3)
        assert (rep.rank, rep.semi_rank) == (2, 3)
        assert not rep.certificate.feasible
        assert rep.factorization.frob_error <= 1e-9
        assert rep.factorization.V.min() >= 0.0

    def test_transpose_asymmetry(self):
        assert semi_rank(ASYM_3x3).semi_rank == 2
        assert semi_rank(ASYM_3x3.T).semi_rank == 3

    def test_zero_matrix(self):
        rep = semi_rank(np.zeros((3, 5)))
        assert (rep.rank, rep.semi_rank) == (0, 0)
        assert rep.factorization.U.shape == (3, 0)
        assert rep.factorization.V.shape == (0, 5)
        assert rep.factorization.frob_error == 0.0

    def test_gap_is_zero_or_one(self):
        for seed in range(15):
            M = random_gaussian(4, 8, seed=seed)
            rep = semi_rank(M)
            assert rep.semi_rank - rep.rank in (0, 1)
            assert (rep.semi_rank == rep.rank) == rep.certificate.feasible

    def test_nonnegative_matrices_have_equal_ranks(self):
        for seed in range(15):
            M = random_uniform(5, 9, seed=seed)
            rep = semi_rank(M)
            assert rep.semi_rank == rep.rank
            assert rep.factorization.frob_error <= 1e-8 * np.linalg.norm(M)

    def test_full_column_rank_equals_n(self):
        for seed in range(15):
            M = random_gaussian(9, 4, seed=seed)
            rep = semi_rank(M)
            assert rep.rank == 4 and rep.semi_rank == 4

    def test_zero_columns_map_to_zero_columns(self):
        M = random_gaussian(4, 5, seed=99)
        M[:, 2] = 0.0
        rep = semi_rank(M)
        np.testing.assert_array_equal(rep.factorization.V[:, 2], 0.0)
        assert rep.factorization.frob_error <= 1e-8 * np.linalg.norm(M)

    def test_matrix_level_cross_check(self):
        # the verdict on the rank-revealing right factor must agree with
        # testing the matrix columns directly
        for seed in range(12):
            M = random_gaussian(5, 9, seed=seed)
            rep = semi_rank(M)
            assert halfspace_feasible(M).feasible == rep.certificate.feasible

    def test_perturbation_preserves_feasibility(self):
        # columns closer to M than their half-space margin stay feasible
        rng = np.random.default_rng(13)
        for seed in range(10):
            M = random_gaussian(6, 4, seed=seed) @ random_uniform(4, 10, seed=seed + 50)
            cert = halfspace_feasible(M)
            assert cert.feasible
            z = cert.z / np.linalg.norm(cert.z)
            margins = M.T @ z
            E = rng.standard_normal(M.shape)
            E *= 0.9 * margins / np.linalg.norm(E, axis=0)
            assert halfspace_feasible(M + E).feasible
