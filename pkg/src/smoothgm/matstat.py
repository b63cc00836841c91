"""Dense symmetric linear algebra: Cholesky, spectral norm via power
iteration, stationary-covariance (Lyapunov) solves, matrix norms, and the
structured transition-matrix builders used by the simulation harness.

Everything works on plain float64 ndarrays; matrices required to be
symmetric are validated, never silently symmetrized.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BadBlocks, NotPositiveDefinite, NotStationary

SYMMETRY_RTOL = 1e-12
CHOLESKY_PIVOT_FLOOR = 1e-12
STATIONARITY_MARGIN = 1e-10

TRANSITION_STRUCTURES = ("diagonal", "band", "block_ar", "random_sparse", "custom")


def check_symmetric(M, name="matrix") -> np.ndarray:
    """Validate that M is a square symmetric float matrix and return it.

    Tolerance is relative: |M_jk - M_kj| <= 1e-12 * max(1, |M_jk|).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    bound = SYMMETRY_RTOL * np.maximum(1.0, np.abs(M))
    if np.any(np.abs(M - M.T) > bound):
        raise ValueError(f"{name} is not symmetric within tolerance {SYMMETRY_RTOL}")
    return M


def cholesky(M) -> np.ndarray:
    """Lower-triangular L with L L^T = M.

    Raises NotPositiveDefinite when a pivot falls at or below 1e-12 (absolute).
    """
    M = check_symmetric(M)
    d = M.shape[0]
    L = np.zeros((d, d))
    for j in range(d):
        pivot = M[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= CHOLESKY_PIVOT_FLOOR:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at column {j}")
        L[j, j] = math.sqrt(pivot)
        if j + 1 < d:
            L[j + 1 :, j] = (M[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


@dataclass(frozen=True)
class PowerIterationResult:
    value: float
    converged: bool
    iterations: int


def power_iteration(M, rtol=1e-10, max_iter=10_000, seed=0) -> PowerIterationResult:
    """Largest singular value of M by power iteration on M^T M.

    Stops when the eigen-residual ||Bv - lam v|| drops below rtol * lam
    (B = M^T M, lam the Rayleigh quotient); the start vector is drawn from a
    fixed seeded generator so results are deterministic. If the cap is hit
    the best estimate is returned with converged=False; when that happens
    because the two largest singular values nearly coincide, the Rayleigh
    value is still accurate to about their separation.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if M.size == 0 or not np.any(M):
        return PowerIterationResult(0.0, True, 0)
    B = M.T @ M
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    v = rng.standard_normal(B.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for k in range(1, max_iter + 1):
        w = B @ v
        lam = float(v @ w)
        residual = np.linalg.norm(w - lam * v)
        if residual <= rtol * max(lam, np.finfo(float).tiny):
            return PowerIterationResult(math.sqrt(max(lam, 0.0)), True, k)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            # start vector lay in the nullspace; redraw deterministically
            v = rng.standard_normal(B.shape[0])
            v /= np.linalg.norm(v)
            continue
        v = w / norm_w
    return PowerIterationResult(math.sqrt(max(lam, 0.0)), False, max_iter)


def spectral_norm(M, rtol=1e-10, max_iter=10_000) -> float:
    """Largest singular value of M; warns if power iteration hit its cap."""
    result = power_iteration(M, rtol=rtol, max_iter=max_iter)
    if not result.converged:
        warnings.warn(
            f"power iteration did not converge in {result.iterations} iterations; "
            "returning best estimate",
            RuntimeWarning,
            stacklevel=2,
        )
    return result.value


def matrix_norms(M) -> dict:
    """The matrix l1 (max column abs sum), l2 (spectral), entrywise max, and
    Frobenius norms of M, as a dict."""
    M = np.asarray(M, dtype=float)
    return {
        "l1": float(np.abs(M).sum(axis=0).max()) if M.size else 0.0,
        "l2": spectral_norm(M),
        "max": float(np.abs(M).max()) if M.size else 0.0,
        "frobenius": float(np.sqrt((M * M).sum())),
    }


@dataclass(frozen=True)
class TransitionMatrix:
    """A VAR(1) transition matrix with spectral norm < 1."""

    matrix: np.ndarray
    structure: str = "custom"
    rho: float = 0.0
    norm: float = field(init=False, default=0.0)

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("transition matrix must be square")
        object.__setattr__(self, "matrix", A)
        norm = spectral_norm(A)
        if norm > 1.0 - STATIONARITY_MARGIN:
            raise NotStationary(f"spectral norm {norm:.6f} >= 1")
        object.__setattr__(self, "norm", norm)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _as_matrix(A) -> np.ndarray:
    return A.matrix if isinstance(A, TransitionMatrix) else np.asarray(A, dtype=float)


def stationary_covariance(A, Psi, tol=1e-12, max_iter=100_000) -> np.ndarray:
    """Solve Sigma = A Sigma A^T + Psi by fixed-point iteration from Psi.

    Converges geometrically at rate ||A||_2^2; raises NotStationary when
    ||A||_2 >= 1 or the iteration cap is reached. The returned Sigma
    satisfies ||Sigma - A Sigma A^T - Psi||_max <= 1e-10.
    """
    A = _as_matrix(A)
    Psi = check_symmetric(Psi, "Psi")
    if spectral_norm(A) >= 1.0:
        raise NotStationary("||A||_2 >= 1; no stationary covariance exists")
    sigma = Psi.copy()
    for _ in range(max_iter):
        nxt = A @ sigma @ A.T + Psi
        delta = np.abs(nxt - sigma).max()
        sigma = nxt
        if delta < tol:
            break
    else:
        raise NotStationary(f"Lyapunov iteration did not converge in {max_iter} steps")
    sigma = (sigma + sigma.T) / 2.0
    residual = np.abs(sigma - A @ sigma @ A.T - Psi).max()
    if residual > 1e-10:
        raise NotStationary(f"Lyapunov residual {residual:.3e} exceeds 1e-10")
    return sigma


def residual_covariance(A, Sigma) -> np.ndarray:
    """Noise covariance Psi = Sigma - A Sigma A^T of a stationary VAR(1).

    Raises NotPositiveDefinite when the result fails Cholesky, which signals
    that (Sigma, A) is incompatible with a stationary VAR(1).
    """
    A = _as_matrix(A)
    Sigma = check_symmetric(Sigma, "Sigma")
    psi = Sigma - A @ Sigma @ A.T
    psi = (psi + psi.T) / 2.0
    cholesky(psi)  # validity check only
    return psi


def invert_spd(M) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky solves."""
    L = cholesky(M)
    d = L.shape[0]
    eye = np.eye(d)
    # forward substitution L Y = I, then back substitution L^T X = Y
    Y = np.zeros((d, d))
    for i in range(d):
        Y[i] = (eye[i] - L[i, :i] @ Y[:i]) / L[i, i]
    X = np.zeros((d, d))
    for i in range(d - 1, -1, -1):
        X[i] = (Y[i] - L[i + 1 :, i] @ X[i + 1 :]) / L[i, i]
    return (X + X.T) / 2.0


def ar_correlation(d, rho) -> np.ndarray:
    """Geometric-decay matrix with entries rho^|i-j| (ones on the diagonal)."""
    idx = np.arange(d)
    return np.asarray(rho, dtype=float) ** np.abs(idx[:, None] - idx[None, :])


def build_transition(
    structure,
    d,
    rho=0.0,
    blocks=None,
    target_norm=None,
    seed=0,
    matrix=None,
    scale=None,
) -> TransitionMatrix:
    """Construct a structured VAR(1) transition matrix.

    structure:
        diagonal       diag(rho, ..., rho)
        band           rho on |i-j| = 1, zero elsewhere
        block_ar       block diagonal, block entries rho^|i-j| off the diagonal
        random_sparse  symmetric Erdos-Renyi support (edge prob 3/d), values
                       Unif[0.5, 1] with random sign, rescaled to target_norm
                       (default 0.5)
        custom         caller-supplied matrix, optionally times scale

    target_norm, when given, rescales the raw matrix to that spectral norm.
    Raises NotStationary when the final spectral norm reaches 1, BadBlocks
    when block sizes do not sum to d.
    """
    structure = str(structure).lower()
    if structure not in TRANSITION_STRUCTURES:
        raise ValueError(f"unknown structure {structure!r}; expected {TRANSITION_STRUCTURES}")
    if structure == "diagonal":
        A = float(rho) * np.eye(d)
    elif structure == "band":
        A = np.zeros((d, d))
        off = np.arange(d - 1)
        A[off, off + 1] = rho
        A[off + 1, off] = rho
    elif structure == "block_ar":
        if blocks is None or sum(blocks) != d:
            raise BadBlocks(f"block sizes {blocks} must sum to d={d}")
        A = np.zeros((d, d))
        start = 0
        for size in blocks:
            A[start : start + size, start : start + size] = ar_correlation(size, rho) - np.eye(size)
            start += size
    elif structure == "random_sparse":
        if not isinstance(seed, np.random.SeedSequence):
            seed = np.random.SeedSequence(seed)
        rng = np.random.Generator(np.random.PCG64(seed))
        p = min(3.0 / d, 1.0)
        if target_norm is None:
            target_norm = 0.5
        for _ in range(100):
            upper = np.triu(rng.random((d, d)) < p, k=1)
            values = rng.uniform(0.5, 1.0, size=(d, d)) * np.where(
                rng.random((d, d)) < 0.5, -1.0, 1.0
            )
            A = np.where(upper, values, 0.0)
            A = A + A.T
            if np.any(A):
                break
        else:
            raise NotStationary("random sparse draw produced no edges after 100 attempts")
    else:  # custom
        if matrix is None:
            raise ValueError("custom structure requires an explicit matrix")
        A = np.asarray(matrix, dtype=float).copy()
        if scale is not None:
            A *= float(scale)
    if target_norm is not None:
        raw_norm = spectral_norm(A)
        if raw_norm == 0.0:
            raise ValueError("cannot rescale a zero matrix to a target norm")
        if not 0.0 < target_norm < 1.0:
            raise ValueError("target_norm must lie in (0, 1)")
        A = A * (target_norm / raw_norm)
    return TransitionMatrix(matrix=A, structure=structure, rho=float(rho))
