"""Structure-recovery metrics, the naive baseline, and rate expressions.

Edges are always counted as unordered off-diagonal pairs. For a truth graph
with edge set E and an estimate with edge set E_hat,

    TPR = |E_hat & E| / |E|,
    FPR = |E_hat \\ E| / (d(d-1)/2 - |E|),

with an undefined rate (empty or complete truth) reported as NaN rather
than silently 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clime import GraphEstimate, Infeasible, PrecisionEstimate, estimate_precision, threshold_graph
from .covariance import subject_covariance, smoothed_covariance
from .errors import DimensionMismatch, NoSubjectAtLabel
from .kernels import KernelSpec
from .matstat import matrix_norms

METHODS = ("kse", "naive")
LABEL_MATCH_TOL = 1e-12


@dataclass(frozen=True)
class RocPoint:
    lam: float
    tpr: float
    fpr: float


@dataclass(frozen=True)
class RocCurve:
    """ROC points in descending-lambda order plus any skipped grid values."""

    points: tuple
    skipped: tuple = field(default=())


@dataclass(frozen=True)
class RateParams:
    """Quantities entering the dependent-data convergence rate."""

    xi: float = 1.0
    sigma_op: float = 1.0
    a_op: float = 0.0
    eta: float = 2.0

    def __post_init__(self):
        if self.xi < 1.0:
            raise ValueError("xi is a max/min ratio and must be >= 1")
        if not 0.0 <= self.a_op < 1.0:
            raise ValueError("a_op must lie in [0, 1)")
        if self.sigma_op <= 0.0:
            raise ValueError("sigma_op must be positive")


@dataclass(frozen=True)
class ExperimentReport:
    """Per-replicate results for one method."""

    method: str
    replicate: int
    roc: RocCurve
    auc: float
    errors: dict
    config_hash: str = ""


def tpr_fpr(estimated: GraphEstimate, truth: GraphEstimate):
    """True/false positive rates of an estimated graph against the truth.

    Rates with an empty denominator come back as NaN.
    """
    if estimated.dim != truth.dim:
        raise DimensionMismatch(f"d={estimated.dim} vs d={truth.dim}")
    d = truth.dim
    total_pairs = d * (d - 1) // 2
    est = estimated.edge_set()
    tru = truth.edge_set()
    tpr = len(est & tru) / len(tru) if tru else math.nan
    negatives = total_pairs - len(tru)
    fpr = len(est - tru) / negatives if negatives > 0 else math.nan
    return tpr, fpr


def naive_covariance(panel, u0) -> np.ndarray:
    """Sample covariance using only the subjects observed exactly at u0.

    Multiple subjects at u0 (possible with duplicate labels) contribute the
    average of their per-subject covariances. Raises NoSubjectAtLabel when
    none matches within 1e-12.
    """
    hits = [obs for label, obs in panel.subjects() if abs(label - u0) <= LABEL_MATCH_TOL]
    if not hits:
        raise NoSubjectAtLabel(f"no subject observed at label {u0}")
    acc = sum(subject_covariance(obs) for obs in hits)
    return acc / len(hits)


def roc_curve(panel, u0, h, kernel, grid, gamma, truth, method,
              normalize=False, center=False, tol=1e-9) -> RocCurve:
    """Sweep a descending lambda grid through the estimation pipeline.

    The covariance input is the kernel-smoothed estimate for method "kse"
    and the exact-label covariance for "naive". A lambda value whose CLIME
    program is infeasible is recorded under skipped rather than aborting.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) >= 0):
        raise ValueError("lambda grid must be strictly descending")
    method = str(method).lower()
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if method == "kse":
        S = smoothed_covariance(panel, u0, h, kernel, normalize=normalize, center=center).matrix
    else:
        S = naive_covariance(panel, u0)
    points, skipped = [], []
    for lam in grid:
        try:
            est = estimate_precision(S, lam, tol=tol)
        except Infeasible:
            skipped.append(float(lam))
            continue
        graph = threshold_graph(est, gamma)
        tpr, fpr = tpr_fpr(graph, truth)
        points.append(RocPoint(lam=float(lam), tpr=tpr, fpr=fpr))
    return RocCurve(points=tuple(points), skipped=tuple(skipped))


def _collapse_by_fpr(points):
    """(fpr, tpr) pairs with (0,0)/(1,1) anchors, FPR ties keeping max TPR."""
    best = {0.0: 0.0, 1.0: 1.0}
    for p in points:
        if math.isnan(p.fpr) or math.isnan(p.tpr):
            continue
        best[p.fpr] = max(best.get(p.fpr, 0.0), p.tpr)
    return sorted(best.items())


def auc(points) -> float:
    """Trapezoid area under the ROC points, anchored at (0,0) and (1,1)."""
    if isinstance(points, RocCurve):
        points = points.points
    if len(points) == 0:
        raise ValueError("need at least one ROC point")
    xy = _collapse_by_fpr(points)
    area = 0.0
    for (x0, y0), (x1, y1) in zip(xy, xy[1:]):
        area += 0.5 * (x1 - x0) * (y0 + y1)
    return area


def monotone_envelope(points):
    """Anchored (fpr, tpr) staircase with running-max TPR."""
    xy = _collapse_by_fpr(points)
    out, running = [], 0.0
    for x, y in xy:
        running = max(running, y)
        out.append((x, running))
    return out


def estimation_errors(estimate, truth) -> dict:
    """Matrix l1, l2 (spectral), and Frobenius norms of estimate - truth."""
    M = estimate.matrix if isinstance(estimate, PrecisionEstimate) else np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if M.shape != truth.shape:
        raise DimensionMismatch(f"{M.shape} vs {truth.shape}")
    norms = matrix_norms(M - truth)
    return {"l1": norms["l1"], "l2": norms["l2"], "frobenius": norms["frobenius"]}


def kappa(n, T, d, params: RateParams) -> float:
    """Max-norm convergence rate of S(u0) under temporal dependence."""
    variance = math.sqrt(
        params.xi * params.sigma_op / (1.0 - params.a_op) * math.sqrt(math.log(d) / (T * n))
    )
    return variance + n ** (-2.0 / (2.0 + params.eta))


def kappa_star(n, T, d, eta) -> float:
    """Max-norm convergence rate of S(u0) under independent observations."""
    return (math.log(d) / (T * n)) ** (1.0 / 3.0) + n ** (-2.0 / (2.0 + eta))
