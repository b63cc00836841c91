import math

import numpy as np
import pytest

from smoothgm import (
    BadBlocks,
    NotPositiveDefinite,
    NotStationary,
    build_transition,
    cholesky,
    invert_spd,
    matrix_norms,
    power_iteration,
    residual_covariance,
    spectral_norm,
    stationary_covariance,
)
from smoothgm.matstat import ar_correlation, check_symmetric


def random_spd(d, rng, scale=1.0):
    Q = rng.standard_normal((d, d))
    M = Q @ Q.T / d + scale * np.eye(d)
    return (M + M.T) / 2


class TestCholesky:
    def test_identity(self):
        np.testing.assert_array_equal(cholesky(np.eye(3)), np.eye(3))

    def test_hand_example(self):
        L = cholesky(np.array([[4.0, 2.0], [2.0, 5.0]]))
        np.testing.assert_allclose(L, [[2.0, 0.0], [1.0, 2.0]], atol=1e-12)

    def test_indefinite_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            cholesky(np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_reconstruction(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            M = random_spd(6, rng)
            L = cholesky(M)
            err = np.linalg.norm(L @ L.T - M) / np.linalg.norm(M)
            assert err <= 1e-10
            assert np.all(np.triu(L, k=1) == 0)


class TestSpectralNorm:
    def test_band_closed_form(self):
        A = build_transition("band", 3, 0.5)
        assert spectral_norm(A.matrix) == pytest.approx(2 * 0.5 * math.cos(math.pi / 4), abs=1e-8)

    def test_diagonal(self):
        assert spectral_norm(np.diag([0.2, -0.6, 0.4])) == pytest.approx(0.6, abs=1e-12)

    def test_zero(self):
        assert spectral_norm(np.zeros((4, 4))) == 0.0

    def test_against_svd(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            M = rng.standard_normal((rng.integers(2, 9), rng.integers(2, 9)))
            expected = np.linalg.svd(M, compute_uv=False)[0]
            assert spectral_norm(M) == pytest.approx(expected, abs=1e-8)

    def test_band_grid_closed_form(self):
        """||band(d, rho)||_2 = 2|rho| cos(pi/(d+1)) across the grid."""
        for d in (3, 10, 50):
            for rho in (0.1, -0.1, 0.3, -0.3):
                A = np.zeros((d, d))
                off = np.arange(d - 1)
                A[off, off + 1] = rho
                A[off + 1, off] = rho
                expected = 2 * abs(rho) * math.cos(math.pi / (d + 1))
                assert spectral_norm(A) == pytest.approx(expected, abs=1e-8)

    def test_cap_returns_flag(self):
        res = power_iteration(np.diag([1.0, 0.999999]), rtol=1e-16, max_iter=3)
        assert not res.converged
        assert res.iterations == 3
        assert res.value == pytest.approx(1.0, abs=1e-3)
        with pytest.warns(RuntimeWarning, match="did not converge"):
            spectral_norm(np.diag([1.0, 0.999999]), rtol=1e-16, max_iter=3)


class TestSignEigenvalueSymmetry:
    """Geometric-decay blocks with rho and -rho share one eigenvalue multiset."""

    @pytest.mark.parametrize("d", [3, 5, 10])
    @pytest.mark.parametrize("rho", [0.2, 0.5, 0.8])
    def test_multisets_match(self, d, rho):
        pos = ar_correlation(d, rho) - np.eye(d)
        neg = ar_correlation(d, -rho) - np.eye(d)
        np.testing.assert_allclose(
            np.sort(np.linalg.eigvalsh(pos)), np.sort(np.linalg.eigvalsh(neg)), atol=1e-8
        )


class TestHadamardMonotonicity:
    """||(rho^|j-k|)||_2 is nondecreasing in rho on [0, 1)."""

    @pytest.mark.parametrize("d", [3, 5, 10])
    def test_monotone_grid(self, d):
        norms = [spectral_norm(ar_correlation(d, rho)) for rho in np.arange(0.0, 0.95, 0.1)]
        for a, b in zip(norms, norms[1:]):
            assert a <= b + 1e-10


class TestStationaryCovariance:
    def test_scalar_fixed_point(self):
        A = build_transition("diagonal", 3, 0.5)
        sigma = stationary_covariance(A, np.eye(3))
        np.testing.assert_allclose(sigma, np.eye(3) / 0.75, atol=1e-9)

    def test_zero_transition(self):
        psi = np.array([[2.0, 0.3], [0.3, 1.0]])
        np.testing.assert_allclose(stationary_covariance(np.zeros((2, 2)), psi), psi, atol=1e-12)

    def test_residual_oracle(self):
        A = build_transition("band", 2, 0.3)
        sigma = stationary_covariance(A, np.eye(2))
        residual = sigma - A.matrix @ sigma @ A.matrix.T - np.eye(2)
        assert np.abs(residual).max() <= 1e-10

    def test_nonstationary_rejected(self):
        with pytest.raises(NotStationary):
            stationary_covariance(1.5 * np.eye(2), np.eye(2))

    def test_round_trip_with_residual(self):
        """stationary_covariance then residual_covariance recovers Psi."""
        rng = np.random.default_rng(11)
        for _ in range(5):
            A = build_transition("random_sparse", 6, seed=int(rng.integers(1 << 30)))
            psi = random_spd(6, rng)
            sigma = stationary_covariance(A, psi)
            np.testing.assert_allclose(residual_covariance(A, sigma), psi, atol=1e-9)


class TestResidualCovariance:
    def test_zero_transition(self):
        sigma = np.array([[1.0, 0.2], [0.2, 2.0]])
        np.testing.assert_allclose(residual_covariance(np.zeros((2, 2)), sigma), sigma)

    def test_scaled_identity(self):
        np.testing.assert_allclose(
            residual_covariance(0.5 * np.eye(2), np.eye(2)), 0.75 * np.eye(2), atol=1e-12
        )

    def test_incompatible_pair_rejected(self):
        # Sigma is not the stationary covariance of any VAR(1) with this A
        A = np.array([[0.0, 0.9], [0.0, 0.0]])
        sigma = np.diag([0.01, 1.0])
        with pytest.raises(NotPositiveDefinite):
            residual_covariance(A, sigma)


class TestMatrixNorms:
    def test_identity(self):
        norms = matrix_norms(np.eye(3))
        assert norms["l1"] == 1.0
        assert norms["l2"] == pytest.approx(1.0, abs=1e-10)
        assert norms["max"] == 1.0
        assert norms["frobenius"] == pytest.approx(math.sqrt(3), abs=1e-12)

    def test_hand_example(self):
        norms = matrix_norms(np.array([[1.0, -2.0], [0.0, 3.0]]))
        assert norms["l1"] == 5.0
        assert norms["max"] == 3.0
        assert norms["frobenius"] == pytest.approx(math.sqrt(14), abs=1e-12)

    def test_zero(self):
        norms = matrix_norms(np.zeros((2, 2)))
        assert set(norms.values()) == {0.0}


class TestBuildTransition:
    def test_diagonal(self):
        A = build_transition("diagonal", 3, 0.4)
        np.testing.assert_array_equal(A.matrix, 0.4 * np.eye(3))
        assert A.norm == pytest.approx(0.4, abs=1e-10)

    def test_band_nonstationary_rejected(self):
        # 2 * 0.6 * cos(pi/11) = 1.151... >= 1
        with pytest.raises(NotStationary):
            build_transition("band", 10, 0.6)

    def test_block_ar_pattern(self):
        A = build_transition("block_ar", 10, 0.3, blocks=[3, 3, 4])
        M = A.matrix
        assert np.all(np.diag(M) == 0)
        assert M[0, 1] == 0.3 and M[0, 2] == pytest.approx(0.09)
        assert M[3, 4] == 0.3 and M[3, 5] == pytest.approx(0.09)
        assert M[6, 9] == pytest.approx(0.3 ** 3)
        # no coupling across blocks
        assert np.all(M[:3, 3:] == 0) and np.all(M[3:6, 6:] == 0)

    def test_block_ar_rescaled_pattern(self):
        # raw rho=0.5 blocks [3,3,4] exceed norm 1; pattern survives rescaling
        with pytest.raises(NotStationary):
            build_transition("block_ar", 10, 0.5, blocks=[3, 3, 4])
        A = build_transition("block_ar", 10, 0.5, blocks=[3, 3, 4], target_norm=0.95)
        M = A.matrix
        assert A.norm == pytest.approx(0.95, abs=1e-8)
        assert M[0, 2] / M[0, 1] == pytest.approx(0.5)
        assert M[6, 9] / M[6, 8] == pytest.approx(0.5)
        assert np.all(np.diag(M) == 0)

    def test_bad_blocks(self):
        with pytest.raises(BadBlocks):
            build_transition("block_ar", 10, 0.5, blocks=[3, 3])

    def test_random_sparse_target_norm(self):
        A = build_transition("random_sparse", 12, seed=5)
        assert A.norm == pytest.approx(0.5, abs=1e-8)
        M = A.matrix
        np.testing.assert_allclose(M, M.T)
        assert np.all(np.diag(M) == 0)

    def test_random_sparse_deterministic(self):
        A = build_transition("random_sparse", 8, seed=42)
        B = build_transition("random_sparse", 8, seed=42)
        np.testing.assert_array_equal(A.matrix, B.matrix)
        C = build_transition("random_sparse", 8, seed=43)
        assert np.any(A.matrix != C.matrix)

    def test_custom_with_scale(self):
        base = np.array([[0.0, 1.0], [1.0, 0.0]])
        A = build_transition("custom", 2, matrix=base, scale=0.45)
        np.testing.assert_allclose(A.matrix, 0.45 * base)

    def test_target_norm_rescale(self):
        A = build_transition("band", 10, 0.6, target_norm=0.95)
        assert A.norm == pytest.approx(0.95, abs=1e-8)


class TestInvertSpd:
    def test_identity(self):
        np.testing.assert_allclose(invert_spd(np.eye(4)), np.eye(4), atol=1e-12)

    def test_diagonal(self):
        np.testing.assert_allclose(invert_spd(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]), atol=1e-12)

    def test_residual(self):
        rng = np.random.default_rng(21)
        M = random_spd(5, rng)
        inv = invert_spd(M)
        assert np.abs(M @ inv - np.eye(5)).max() <= 1e-8

    def test_not_pd(self):
        with pytest.raises(NotPositiveDefinite):
            invert_spd(np.zeros((3, 3)))


class TestCheckSymmetric:
    def test_rejects_rectangular(self):
        with pytest.raises(ValueError, match="square"):
            check_symmetric(np.zeros((2, 3)))

    def test_accepts_within_tolerance(self):
        M = np.array([[1.0, 0.5], [0.5 + 1e-14, 1.0]])
        check_symmetric(M)
