import numpy as np
import pytest

from smoothgm import (
    AllWeightsZero,
    KernelSpec,
    Panel,
    TooFewObservations,
    smoothed_covariance,
    subject_covariance,
)

UNIFORM = KernelSpec("uniform")


class TestPanel:
    def test_sorted_on_construction(self):
        panel = Panel(labels=[0.8, 0.2], observations=(np.ones((2, 3)), np.zeros((4, 3))))
        np.testing.assert_array_equal(panel.labels, [0.2, 0.8])
        assert panel.observations[0].shape == (4, 3)
        assert panel.dim == 3 and panel.n_subjects == 2

    def test_stable_for_duplicates(self):
        a, b = np.ones((2, 2)), 2 * np.ones((3, 2))
        panel = Panel(labels=[0.5, 0.5], observations=(a, b))
        np.testing.assert_array_equal(panel.observations[0], a)
        np.testing.assert_array_equal(panel.observations[1], b)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="dimension"):
            Panel(labels=[0.1, 0.2], observations=(np.ones((2, 3)), np.ones((2, 4))))

    def test_empty_subject_rejected(self):
        with pytest.raises(ValueError, match="observation"):
            Panel(labels=[0.1], observations=(np.ones((0, 3)),))

    def test_label_range(self):
        with pytest.raises(ValueError, match="labels"):
            Panel(labels=[1.2], observations=(np.ones((2, 2)),))


class TestSubjectCovariance:
    def test_rank_one(self):
        C = subject_covariance(np.array([[1.0, 2.0]]))
        np.testing.assert_array_equal(C, [[1.0, 2.0], [2.0, 4.0]])

    def test_two_observations(self):
        C = subject_covariance(np.array([[1.0, 0.0], [-1.0, 0.0]]))
        np.testing.assert_array_equal(C, [[1.0, 0.0], [0.0, 0.0]])

    def test_centered_divisor_T(self):
        X = np.array([[1.0], [3.0]])
        # centered residuals (-1, 1), divided by T=2 (not T-1)
        assert subject_covariance(X, center=True)[0, 0] == 1.0

    def test_centered_diag_nonnegative(self):
        rng = np.random.default_rng(5)
        C = subject_covariance(rng.standard_normal((20, 4)) + 3.0, center=True)
        assert np.all(np.diag(C) >= 0)

    def test_too_few_rows_for_centering(self):
        with pytest.raises(TooFewObservations):
            subject_covariance(np.ones((1, 2)), center=True)

    def test_exactly_symmetric(self):
        rng = np.random.default_rng(6)
        C = subject_covariance(rng.standard_normal((30, 7)))
        np.testing.assert_array_equal(C, C.T)


class TestSmoothedCovariance:
    def test_equal_subjects_convex_combination(self):
        obs = np.array([[1.0, 2.0], [2.0, -1.0], [0.0, 1.0]])
        panel = Panel(labels=[0.3, 0.5, 0.7], observations=(obs, obs.copy(), obs.copy()))
        S = smoothed_covariance(panel, 0.5, 0.4, UNIFORM, normalize=True)
        np.testing.assert_allclose(S.matrix, subject_covariance(obs), atol=1e-14)

    def test_single_subject_reduces_to_subject_covariance(self):
        rng = np.random.default_rng(8)
        obs = rng.standard_normal((15, 3))
        panel = Panel(labels=[0.5], observations=(obs,))
        S = smoothed_covariance(panel, 0.5, 0.2, UNIFORM, normalize=True)
        np.testing.assert_allclose(S.matrix, subject_covariance(obs), atol=1e-14)

    def test_two_subject_unnormalized_mixture(self):
        """Weights 0.5/0.5 from the kernel example combine the two covariances."""
        rng = np.random.default_rng(9)
        obs_a, obs_b = rng.standard_normal((10, 2)), rng.standard_normal((12, 2))
        panel = Panel(labels=[0.4, 0.6], observations=(obs_a, obs_b))
        S = smoothed_covariance(panel, 0.5, 0.5, UNIFORM, normalize=False)
        expected = 0.5 * subject_covariance(obs_a) + 0.5 * subject_covariance(obs_b)
        np.testing.assert_allclose(S.matrix, expected, atol=1e-14)

    def test_normalized_is_psd(self):
        rng = np.random.default_rng(10)
        panel = Panel(
            labels=np.linspace(0, 1, 9),
            observations=tuple(rng.standard_normal((6, 5)) for _ in range(9)),
        )
        S = smoothed_covariance(panel, 0.3, 0.25, KernelSpec("epanechnikov"), normalize=True)
        assert np.linalg.eigvalsh(S.matrix).min() >= -1e-10
        np.testing.assert_array_equal(S.matrix, S.matrix.T)

    def test_locality_out_of_window_subject(self):
        """Adding a subject beyond the window leaves the normalized S unchanged."""
        rng = np.random.default_rng(12)
        blocks = tuple(rng.standard_normal((8, 3)) for _ in range(4))
        near = Panel(labels=[0.40, 0.45, 0.50, 0.55], observations=blocks)
        far = Panel(
            labels=[0.40, 0.45, 0.50, 0.55, 0.99],
            observations=blocks + (rng.standard_normal((8, 3)),),
        )
        S_near = smoothed_covariance(near, 0.5, 0.2, KernelSpec("triangular"), normalize=True)
        S_far = smoothed_covariance(far, 0.5, 0.2, KernelSpec("triangular"), normalize=True)
        np.testing.assert_allclose(S_far.matrix, S_near.matrix, atol=1e-14)

    def test_empty_window_propagates(self):
        panel = Panel(labels=[0.9], observations=(np.ones((3, 2)),))
        with pytest.raises(AllWeightsZero):
            smoothed_covariance(panel, 0.0, 0.2, UNIFORM)

    def test_metadata_carried(self):
        panel = Panel(labels=[0.5], observations=(np.ones((3, 2)),))
        S = smoothed_covariance(panel, 0.5, 0.25, UNIFORM, normalize=True)
        assert S.target_label == 0.5 and S.bandwidth == 0.25
        assert S.kernel is UNIFORM and S.normalized
