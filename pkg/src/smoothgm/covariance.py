"""Per-subject sample covariances and the kernel-smoothed estimator S(u0)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TooFewObservations
from .kernels import KernelSpec, compute_weights


@dataclass(frozen=True)
class Panel:
    """n labeled subjects, each a (T_i x d) observation matrix.

    Subjects are kept in nondecreasing label order (canonical form, enforced
    on construction with a stable sort so duplicate labels keep their input
    order). T_i may vary between subjects; d may not.
    """

    labels: np.ndarray
    observations: tuple

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=float)
        obs = tuple(np.asarray(x, dtype=float) for x in self.observations)
        if labels.ndim != 1 or labels.size != len(obs) or labels.size == 0:
            raise ValueError("need one observation block per label")
        if np.any(labels < 0.0) or np.any(labels > 1.0):
            raise ValueError("labels must lie in [0, 1]")
        dims = {x.shape[1] if x.ndim == 2 else -1 for x in obs}
        if len(dims) != 1 or -1 in dims:
            raise ValueError("all subjects must share one observation dimension d")
        if any(x.shape[0] < 1 for x in obs):
            raise ValueError("every subject needs at least one observation row")
        order = np.argsort(labels, kind="stable")
        object.__setattr__(self, "labels", labels[order])
        object.__setattr__(self, "observations", tuple(obs[i] for i in order))

    @property
    def n_subjects(self) -> int:
        return self.labels.size

    @property
    def dim(self) -> int:
        return self.observations[0].shape[1]

    def subjects(self):
        """Iterate (label, observations) pairs in canonical order."""
        return zip(self.labels.tolist(), self.observations)


@dataclass(frozen=True)
class SmoothedCovariance:
    """S(u0) together with the smoothing inputs that produced it."""

    matrix: np.ndarray
    target_label: float
    bandwidth: float
    kernel: KernelSpec
    normalized: bool = field(default=False)


def subject_covariance(observations, center=False) -> np.ndarray:
    """Second-moment matrix (1/T) sum_t x_t x_t^T of one subject.

    With center=True the column means are removed first; the divisor stays T
    (not T-1) either way. Result is exactly symmetric.
    """
    X = np.asarray(observations, dtype=float)
    if X.ndim != 2:
        raise ValueError("observations must be a T x d matrix")
    T = X.shape[0]
    if T < 1 or (center and T < 2):
        raise TooFewObservations(f"T={T} too small (center={center})")
    if center:
        X = X - X.mean(axis=0)
    C = (X.T @ X) / T
    return (C + C.T) / 2.0


def smoothed_covariance(panel, u0, h, kernel=KernelSpec(), normalize=False, center=False) -> SmoothedCovariance:
    """Kernel-smoothed covariance S(u0) = sum_i w_i(u0, h) Sigma_hat_i.

    Weights come from kernels.compute_weights; subjects with zero weight do
    not enter the sum, so adding out-of-window subjects cannot perturb the
    normalized result. Propagates AllWeightsZero when the window is empty.
    """
    wv = compute_weights(kernel, panel.labels, u0, h, normalize=normalize)
    d = panel.dim
    S = np.zeros((d, d))
    for w, obs in zip(wv.weights, panel.observations):
        if w == 0.0:
            continue
        S += w * subject_covariance(obs, center=center)
    return SmoothedCovariance(
        matrix=S,
        target_label=float(u0),
        bandwidth=float(h),
        kernel=kernel,
        normalized=normalize,
    )
