"""Label-indexed evolving precision paths and VAR(1) panel sampling.

Three generators produce precision matrices that evolve over the label
interval [0, 1]:

    simultaneous  fixed edges plus decay/grow edges that all ramp linearly
                  across the whole interval
    sequential    grow edges ramp one after another, each over a
                  1/n_grow-length window (closed on the right)
    random        an independent support drawn at every supplied label

Edge strengths are drawn once per edge from a uniform range (default
[-0.3, -0.1]). At every queried label the diagonal receives the sum of the
incident off-diagonal magnitudes plus a constant boost (default 0.25), so
the matrix is strictly diagonally dominant and hence positive definite.

All randomness flows through numpy Generators; panel sampling derives one
child stream per subject, so results are reproducible under any
parallelization over subjects or replicates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .covariance import Panel
from .errors import (
    BadPermutation,
    EdgeBudgetExceeded,
    NotPositiveDefinite,
    ResidualNotPD,
    UnknownLabel,
)
from .matstat import TransitionMatrix, cholesky, invert_spd, spectral_norm

SETTINGS = ("simultaneous", "sequential", "random", "constant")


@dataclass(frozen=True)
class SimConfig:
    """Shape and edge budget of one synthetic experiment."""

    d: int
    n: int
    T: int
    n_fix: int = 0
    n_grow: int = 0
    n_decay: int = 0
    n_ed: int = 0
    strength_range: tuple = (-0.3, -0.1)
    diag_boost: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if min(self.d, self.n, self.T) < 1:
            raise ValueError("d, n, T must be positive")
        pairs = self.d * (self.d - 1) // 2
        if self.n_fix + self.n_grow + self.n_decay > pairs:
            raise EdgeBudgetExceeded(
                f"{self.n_fix}+{self.n_grow}+{self.n_decay} edges exceed {pairs} pairs"
            )
        if self.n_ed > pairs:
            raise EdgeBudgetExceeded(f"n_ed={self.n_ed} exceeds {pairs} pairs")
        lo, hi = self.strength_range
        if not lo <= hi:
            raise ValueError("strength_range must be (lo, hi) with lo <= hi")


def equispaced_labels(n) -> np.ndarray:
    """n labels spread over [0, 1] inclusive (a single label sits at 0)."""
    if n == 1:
        return np.zeros(1)
    return np.arange(n) / (n - 1)


def _draw_pairs(d, count, rng):
    """count distinct unordered pairs, indices into the lexicographic list."""
    total = d * (d - 1) // 2
    chosen = rng.choice(total, size=count, replace=False)
    j = np.triu_indices(d, k=1)
    return np.column_stack([j[0][chosen], j[1][chosen]])


class PrecisionPath:
    """Evolving precision matrix Omega(u) with an exact edge ledger.

    Instances are immutable after construction and safe to share; queries
    run a Cholesky check so every returned matrix is certified positive
    definite.
    """

    def __init__(self, dim, setting, diag_boost, *, fixed=None, decay=None, grow=None,
                 per_label=None, constant=None):
        self.dim = int(dim)
        self.setting = setting
        self.diag_boost = float(diag_boost)
        self._fixed = fixed if fixed is not None else (np.empty((0, 2), int), np.empty(0))
        self._decay = decay if decay is not None else (np.empty((0, 2), int), np.empty(0))
        # grow: (pairs, strengths, ramp_start, ramp_end)
        self._grow = grow if grow is not None else (
            np.empty((0, 2), int), np.empty(0), np.empty(0), np.empty(0))
        self._per_label = per_label
        self._constant = constant

    @classmethod
    def constant_custom(cls, omega):
        """A u-independent path wrapping a caller-supplied PD matrix."""
        omega = np.asarray(omega, dtype=float)
        cholesky(omega)
        return cls(omega.shape[0], "constant", 0.0, constant=omega)

    def _edge_values(self, u):
        """(pairs, values) of every edge with a slot at label u."""
        if self._per_label is not None:
            key = float(u)
            if key not in self._per_label:
                raise UnknownLabel(
                    f"label {u} is not on the defining grid of this random path"
                )
            return self._per_label[key]
        parts_p, parts_v = [], []
        fp, fv = self._fixed
        parts_p.append(fp)
        parts_v.append(fv)
        dp, dv = self._decay
        parts_p.append(dp)
        parts_v.append(dv * (1.0 - u))
        gp, gv, gs, ge = self._grow
        if gp.shape[0]:
            frac = np.clip((u - gs) / (ge - gs), 0.0, 1.0)
            parts_p.append(gp)
            parts_v.append(gv * frac)
        return np.vstack(parts_p), np.concatenate(parts_v)

    def omega(self, u) -> np.ndarray:
        """Omega(u); strictly diagonally dominant and Cholesky-verified."""
        if self._constant is not None:
            return self._constant.copy()
        if not 0.0 <= u <= 1.0:
            raise ValueError("label must lie in [0, 1]")
        pairs, values = self._edge_values(u)
        om = np.zeros((self.dim, self.dim))
        if pairs.shape[0]:
            om[pairs[:, 0], pairs[:, 1]] = values
            om[pairs[:, 1], pairs[:, 0]] = values
        om[np.diag_indices(self.dim)] = self.diag_boost + np.abs(om).sum(axis=1)
        cholesky(om)
        return om

    def support(self, u) -> set:
        """Exact off-diagonal support at u as a set of (j, k), j < k."""
        if self._constant is not None:
            j, k = np.nonzero(np.triu(self._constant, k=1))
            return set(zip(j.tolist(), k.tolist()))
        pairs, values = self._edge_values(u)
        live = values != 0.0
        return {(int(j), int(k)) for (j, k) in pairs[live]}


def _draw_strengths(rng, count, strength_range):
    lo, hi = strength_range
    return rng.uniform(lo, hi, size=count)


def path_simultaneous(config: SimConfig, rng) -> PrecisionPath:
    """Setting with fixed edges plus decay and grow edges ramping over [0, 1].

    Decay edges shrink linearly from their drawn strength to 0 at u=1; grow
    edges ramp from 0 at u=0 to their drawn strength at u=1. The three edge
    groups are disjoint.
    """
    total = config.n_fix + config.n_decay + config.n_grow
    pairs = _draw_pairs(config.d, total, rng) if total else np.empty((0, 2), int)
    fp = pairs[: config.n_fix]
    dp = pairs[config.n_fix : config.n_fix + config.n_decay]
    gp = pairs[config.n_fix + config.n_decay :]
    fv = _draw_strengths(rng, config.n_fix, config.strength_range)
    dv = _draw_strengths(rng, config.n_decay, config.strength_range)
    gv = _draw_strengths(rng, config.n_grow, config.strength_range)
    grow = (gp, gv, np.zeros(config.n_grow), np.ones(config.n_grow))
    return PrecisionPath(
        config.d, "simultaneous", config.diag_boost,
        fixed=(fp, fv), decay=(dp, dv), grow=grow,
    )


def path_sequential(config: SimConfig, rng) -> PrecisionPath:
    """Setting where grow edges emerge one after another.

    Edge m ramps linearly over (m/n_grow, (m+1)/n_grow]: zero at the left
    endpoint, complete at the right endpoint inclusive. n_decay must be 0.
    """
    if config.n_decay != 0:
        raise ValueError("sequential setting requires n_decay == 0")
    total = config.n_fix + config.n_grow
    pairs = _draw_pairs(config.d, total, rng) if total else np.empty((0, 2), int)
    fp = pairs[: config.n_fix]
    gp = pairs[config.n_fix :]
    fv = _draw_strengths(rng, config.n_fix, config.strength_range)
    gv = _draw_strengths(rng, config.n_grow, config.strength_range)
    g = max(config.n_grow, 1)
    starts = np.arange(config.n_grow) / g
    ends = (np.arange(config.n_grow) + 1) / g
    return PrecisionPath(
        config.d, "sequential", config.diag_boost,
        fixed=(fp, fv), grow=(gp, gv, starts, ends),
    )


def path_random(config: SimConfig, labels, rng) -> PrecisionPath:
    """Setting with an independent random support at every supplied label.

    The path is defined only on the given label set; querying any other
    label raises UnknownLabel.
    """
    per_label = {}
    for u in np.asarray(labels, dtype=float):
        pairs = _draw_pairs(config.d, config.n_ed, rng) if config.n_ed else np.empty((0, 2), int)
        values = _draw_strengths(rng, config.n_ed, config.strength_range)
        per_label[float(u)] = (pairs, values)
    return PrecisionPath(config.d, "random", config.diag_boost, per_label=per_label)


def sample_panel(path: PrecisionPath, labels, T, A, rng) -> Panel:
    """Sample one panel: per label, T steps of a stationary VAR(1).

    The first observation is drawn exactly from N(0, Sigma(u_i)) (Cholesky
    transform, no burn-in); subsequent steps follow x_t = A x_{t-1} + eps_t
    with eps_t ~ N(0, Sigma - A Sigma A^T). Subjects are independent, each
    on its own child RNG stream. Raises ResidualNotPD when the implied
    noise covariance is not positive definite.
    """
    A = A.matrix if isinstance(A, TransitionMatrix) else np.asarray(A, dtype=float)
    if spectral_norm(A) >= 1.0:
        raise ResidualNotPD("transition matrix has spectral norm >= 1")
    labels = np.asarray(labels, dtype=float)
    streams = rng.spawn(labels.size)
    observations = []
    for u, stream in zip(labels, streams):
        sigma = invert_spd(path.omega(u))
        psi = sigma - A @ sigma @ A.T
        psi = (psi + psi.T) / 2.0
        try:
            l_psi = cholesky(psi)
        except NotPositiveDefinite as err:
            raise ResidualNotPD(
                f"label {u}: Sigma - A Sigma A^T not PD; shrink ||A||_2"
            ) from err
        l_sigma = cholesky(sigma)
        z = stream.standard_normal((T, path.dim))
        noise = z @ l_psi.T
        x = np.empty((T, path.dim))
        x[0] = l_sigma @ z[0]
        for t in range(1, T):
            x[t] = A @ x[t - 1] + noise[t]
        observations.append(x)
    return Panel(labels=labels, observations=tuple(observations))


def permute_labels(panel: Panel, permutation) -> Panel:
    """Reassign subject data blocks to permuted label positions.

    The sorted label vector itself is unchanged; subject i's slot receives
    the data of subject permutation[i].
    """
    perm = np.asarray(permutation, dtype=int)
    n = panel.n_subjects
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise BadPermutation(f"not a bijection on 0..{n - 1}")
    obs = tuple(panel.observations[i] for i in perm)
    return Panel(labels=panel.labels.copy(), observations=obs)
