"""Compact-support smoothing kernels, label weights, and bandwidth rules.

All four built-in kernels are symmetric, nonnegative, supported on [-1, 1],
and integrate to one:

    uniform:       K(s) = 1/2
    triangular:    K(s) = 1 - |s|
    epanechnikov:  K(s) = 3 (1 - s^2) / 4
    cosine:        K(s) = pi cos(pi s / 2) / 4

Weights for a target label u0 with bandwidth h are

    w_i = c(u0) / (n h) * K((u_i - u0) / h),

where c(u0) = 2 when u0 sits on the boundary of [0, 1] and 1 otherwise.
Unnormalized weights follow this formula exactly; they only sum to one
asymptotically, so a normalized mode (divide by the sum) is offered for
finite panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AllWeightsZero

KERNEL_FAMILIES = ("uniform", "triangular", "epanechnikov", "cosine")


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus its smoothness exponent eta.

    eta defaults to 2, which all four built-in families satisfy; users may
    override it when supplying their own smoothness analysis.
    """

    family: str = "epanechnikov"
    eta: float = 2.0

    def __post_init__(self):
        fam = self.family.lower()
        if fam not in KERNEL_FAMILIES:
            raise ValueError(
                f"unknown kernel family {self.family!r}; expected one of {KERNEL_FAMILIES}"
            )
        object.__setattr__(self, "family", fam)
        if not self.eta > 0:
            raise ValueError("eta must be positive")


@dataclass(frozen=True)
class WeightVector:
    """Per-subject kernel weights for one target label."""

    weights: np.ndarray
    target_label: float
    bandwidth: float
    normalized: bool = field(default=False)


def eval_kernel(spec: KernelSpec, s) -> np.ndarray | float:
    """Evaluate the kernel at s (scalar or array); exactly 0 outside [-1, 1].

    Evaluation goes through |s| so K(s) == K(-s) holds bitwise.
    """
    s = np.abs(np.asarray(s, dtype=float))
    inside = s <= 1.0
    fam = spec.family
    if fam == "uniform":
        out = np.where(inside, 0.5, 0.0)
    elif fam == "triangular":
        out = np.where(inside, 1.0 - s, 0.0)
    elif fam == "epanechnikov":
        out = np.where(inside, 0.75 * (1.0 - s * s), 0.0)
    else:  # cosine
        out = np.where(inside, (math.pi / 4.0) * np.cos(math.pi * s / 2.0), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def boundary_constant(u0: float) -> float:
    """c(u0): 2 exactly at the endpoints of [0, 1], else 1.

    u0 is clamped to [0, 1] before the equality test.
    """
    u0 = min(max(float(u0), 0.0), 1.0)
    return 2.0 if u0 in (0.0, 1.0) else 1.0


def compute_weights(spec, labels, u0, h, normalize=False) -> WeightVector:
    """Kernel weights w_i = c(u0)/(n h) * K((u_i - u0)/h) over subject labels.

    Raises AllWeightsZero when every raw weight vanishes (no label inside the
    window); with normalize=True the weights are rescaled to sum to one.
    """
    labels = np.asarray(labels, dtype=float)
    if labels.ndim != 1 or labels.size == 0:
        raise ValueError("labels must be a nonempty 1-d vector")
    if np.any(labels < 0.0) or np.any(labels > 1.0):
        raise ValueError("labels must lie in [0, 1]")
    if not h > 0:
        raise ValueError("bandwidth h must be positive")
    n = labels.size
    c = boundary_constant(u0)
    raw = (c / (n * h)) * np.asarray(eval_kernel(spec, (labels - u0) / h))
    total = raw.sum()
    if total <= 0.0:
        raise AllWeightsZero(
            f"no label within bandwidth {h} of target {u0}; cannot estimate there"
        )
    if normalize:
        raw = raw / total
    return WeightVector(weights=raw, target_label=float(u0), bandwidth=float(h), normalized=normalize)


def theoretical_bandwidth_dependent(n, T, d, eta, xi=1.0, sigma_op=1.0, a_op=0.0) -> float:
    """Rate-balancing bandwidth for temporally dependent observations.

    Returns max{ (xi sigma_op / (1 - a_op) * sqrt(log d / (T n)))^(1/2),
                 n^(-2/(2+eta)) },
    with the hidden proportionality constant fixed at 1, so the result is a
    scale suggestion rather than an optimum.
    """
    if not 0.0 <= a_op < 1.0:
        raise ValueError("a_op must lie in [0, 1)")
    if xi < 1.0:
        raise ValueError("xi is a max/min diagonal ratio and must be >= 1")
    if sigma_op <= 0.0:
        raise ValueError("sigma_op must be positive")
    variance_term = math.sqrt(
        xi * sigma_op / (1.0 - a_op) * math.sqrt(math.log(d) / (T * n))
    )
    bias_term = n ** (-2.0 / (2.0 + eta))
    return max(variance_term, bias_term)


def theoretical_bandwidth_iid(n, T, d, eta) -> float:
    """Rate-balancing bandwidth under independent observations.

    Returns max{ (log d / (T n))^(1/3), n^(-2/(2+eta)) }, constant 1.
    """
    variance_term = (math.log(d) / (T * n)) ** (1.0 / 3.0)
    bias_term = n ** (-2.0 / (2.0 + eta))
    return max(variance_term, bias_term)
