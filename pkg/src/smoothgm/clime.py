"""Column-wise constrained-l1 precision estimation on a dense LP core.

Each column j of the precision estimate solves

    minimize ||v||_1  subject to  ||S v - e_j||_inf <= lambda,

encoded as an LP in v = p - q with p, q >= 0 (2d variables, 2d inequality
rows) and solved by a two-phase primal simplex with Bland's rule. Columns
are independent; the assembled matrix is symmetrized by keeping the
smaller-magnitude entry of each (j, k) / (k, j) pair, and a final
threshold step turns the estimate into a graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Infeasible, IterationLimit, LpError, Unbounded
from .matstat import check_symmetric

DEFAULT_LP_TOL = 1e-9
PIVOT_CAP = 50_000
FEASIBILITY_SLACK = 10.0  # accepted violation is lambda + FEASIBILITY_SLACK * tol


@dataclass(frozen=True)
class LpProblem:
    """minimize c^T z subject to G z <= b, z >= 0 (dense, desk scale)."""

    objective: np.ndarray
    constraints: np.ndarray
    bounds: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        G = np.atleast_2d(np.asarray(self.constraints, dtype=float))
        b = np.asarray(self.bounds, dtype=float).ravel()
        if G.shape != (b.size, c.size):
            raise ValueError(
                f"inconsistent LP dimensions: G {G.shape}, c {c.size}, b {b.size}"
            )
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", G)
        object.__setattr__(self, "bounds", b)


@dataclass(frozen=True)
class LpSolution:
    z: np.ndarray
    objective: float
    iterations: int


def _pivot(tab, i, j):
    tab[i] = tab[i] / tab[i, j]
    col = tab[:, j].copy()
    col[i] = 0.0
    tab -= np.outer(col, tab[i])


def _bland_loop(tab, basis, n_enterable, tol, pivots, cap, phase):
    """Run Bland-rule pivots to optimality; returns the updated pivot count."""
    m = tab.shape[0] - 1
    while True:
        reduced = tab[-1, :n_enterable]
        candidates = np.nonzero(reduced < -tol)[0]
        if candidates.size == 0:
            return pivots
        j = int(candidates[0])  # smallest index: Bland entering rule
        col = tab[:m, j]
        rows = np.nonzero(col > tol)[0]
        if rows.size == 0:
            raise Unbounded(f"phase {phase}: no blocking row for column {j}")
        ratios = tab[rows, -1] / col[rows]
        ties = rows[ratios == ratios.min()]
        i = int(ties[np.argmin(basis[ties])])  # smallest basis index on ties
        _pivot(tab, i, j)
        basis[i] = j
        pivots += 1
        if pivots >= cap:
            raise IterationLimit(f"pivot cap {cap} reached in phase {phase}")


def solve_lp(problem: LpProblem, tol=DEFAULT_LP_TOL) -> LpSolution:
    """Two-phase primal simplex with Bland's anti-cycling rule.

    Raises Infeasible when the phase-1 optimum exceeds tol, Unbounded when a
    phase-2 entering column has no blocking row, IterationLimit after 50k
    pivots. The returned point satisfies z >= 0 and G z <= b + tol.
    """
    c, G, b = problem.objective, problem.constraints, problem.bounds
    m, nv = G.shape
    n_cols = nv + m  # structural + slack

    body = np.hstack([G, np.eye(m)])
    rhs = b.astype(float).copy()
    flip = rhs < 0
    body[flip] *= -1.0
    rhs[flip] *= -1.0

    basis = np.where(flip, -1, nv + np.arange(m)).astype(int)
    art_rows = np.nonzero(flip)[0]
    pivots = 0

    if art_rows.size:
        art = np.zeros((m, art_rows.size))
        art[art_rows, np.arange(art_rows.size)] = 1.0
        basis[art_rows] = n_cols + np.arange(art_rows.size)
        tab = np.zeros((m + 1, n_cols + art_rows.size + 1))
        tab[:m, : n_cols] = body
        tab[:m, n_cols : -1] = art
        tab[:m, -1] = rhs
        # phase-1 reduced costs: cost 1 on artificials, canonicalized
        tab[-1, n_cols : -1] = 1.0
        for i in art_rows:
            tab[-1] -= tab[i]
        pivots = _bland_loop(tab, basis, n_cols, tol, pivots, PIVOT_CAP, phase=1)
        if -tab[-1, -1] > tol:
            raise Infeasible(f"phase-1 optimum {-tab[-1, -1]:.3e} > {tol:.1e}")
        # drive leftover artificials out of the basis, dropping redundant rows
        keep = np.ones(m, dtype=bool)
        for i in np.nonzero(basis >= n_cols)[0]:
            row = tab[i, :n_cols]
            nz = np.nonzero(np.abs(row) > tol)[0]
            if nz.size:
                _pivot(tab, i, int(nz[0]))
                basis[i] = int(nz[0])
            else:
                keep[i] = False
        tab = np.vstack([tab[:m][keep], tab[-1:]])
        basis = basis[keep]
        tab = np.delete(tab, np.s_[n_cols:-1], axis=1)
        m = basis.size
    else:
        tab = np.zeros((m + 1, n_cols + 1))
        tab[:m, :n_cols] = body
        tab[:m, -1] = rhs

    # phase-2 objective over structural + slack columns
    full_c = np.concatenate([c, np.zeros(tab.shape[1] - 1 - nv)])
    tab[-1, :] = 0.0
    tab[-1, :-1] = full_c
    for i in range(m):
        cb = full_c[basis[i]]
        if cb != 0.0:
            tab[-1] -= cb * tab[i]
    pivots = _bland_loop(tab, basis, n_cols, tol, pivots, PIVOT_CAP, phase=2)

    z = np.zeros(n_cols)
    z[basis] = tab[:m, -1]
    x = z[:nv]
    return LpSolution(z=x, objective=float(c @ x), iterations=pivots)


@dataclass(frozen=True)
class ColumnStatus:
    iterations: int
    objective: float


@dataclass(frozen=True)
class PrecisionEstimate:
    """Symmetrized precision matrix estimate with per-column diagnostics."""

    matrix: np.ndarray
    lam: float
    column_status: tuple = field(default=())


@dataclass(frozen=True)
class GraphEstimate:
    """Binary adjacency over unordered pairs; diagonal always zero."""

    adjacency: np.ndarray
    gamma: float = 0.0

    def __post_init__(self):
        adj = np.asarray(self.adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        adj = (adj != 0).astype(np.int8)
        if np.any(adj != adj.T):
            raise ValueError("adjacency must be symmetric")
        np.fill_diagonal(adj, 0)
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, d, edges, gamma=0.0):
        adj = np.zeros((d, d), dtype=np.int8)
        for j, k in edges:
            adj[j, k] = adj[k, j] = 1
        return cls(adjacency=adj, gamma=gamma)

    @property
    def dim(self) -> int:
        return self.adjacency.shape[0]

    def edge_set(self):
        """Edges as a set of (j, k) pairs with j < k."""
        j, k = np.nonzero(np.triu(self.adjacency, k=1))
        return set(zip(j.tolist(), k.tolist()))

    @property
    def n_edges(self) -> int:
        return len(self.edge_set())


def _solve_column(S, j, lam, tol):
    d = S.shape[0]
    e = np.zeros(d)
    e[j] = 1.0
    G = np.block([[S, -S], [-S, S]])
    b = np.concatenate([lam + e, lam - e])
    sol = solve_lp(LpProblem(np.ones(2 * d), G, b), tol=tol)
    v = sol.z[:d] - sol.z[d:]
    violation = np.abs(S @ v - e).max()
    if violation > lam + FEASIBILITY_SLACK * tol:
        raise Infeasible(
            f"column {j}: returned point violates constraint by {violation - lam:.3e}"
        )
    return v, ColumnStatus(iterations=sol.iterations, objective=sol.objective)


def solve_column(S, j, lam, tol=DEFAULT_LP_TOL) -> np.ndarray:
    """l1-minimal v with ||S v - e_j||_inf <= lam, for column j."""
    S = check_symmetric(S)
    if not 0 <= j < S.shape[0]:
        raise ValueError(f"column index {j} out of range for d={S.shape[0]}")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    v, _ = _solve_column(S, j, float(lam), tol)
    return v


def symmetrize_min_magnitude(raw) -> np.ndarray:
    """Keep the smaller-magnitude member of each off-diagonal pair.

    Ties go to the upper-triangle entry; the diagonal is untouched.
    """
    raw = np.asarray(raw, dtype=float)
    out = raw.copy()
    j, k = np.triu_indices(raw.shape[0], k=1)
    a = raw[j, k]
    b = raw[k, j]
    pick = np.where(np.abs(a) <= np.abs(b), a, b)
    out[j, k] = pick
    out[k, j] = pick
    return out


def estimate_precision(S, lam, tol=DEFAULT_LP_TOL) -> PrecisionEstimate:
    """Solve all d columns and symmetrize by the minimum-magnitude rule.

    A column failure aborts the whole estimate with the column index
    attached to the raised error.
    """
    S = check_symmetric(S)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    d = S.shape[0]
    raw = np.zeros((d, d))
    status = []
    for j in range(d):
        try:
            v, st = _solve_column(S, j, float(lam), tol)
        except LpError as err:
            raise type(err)(f"column {j}: {err}") from err
        raw[:, j] = v
        status.append(st)
    return PrecisionEstimate(
        matrix=symmetrize_min_magnitude(raw), lam=float(lam), column_status=tuple(status)
    )


def threshold_graph(omega, gamma=1e-5) -> GraphEstimate:
    """Edges where the off-diagonal magnitude strictly exceeds gamma."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    M = omega.matrix if isinstance(omega, PrecisionEstimate) else np.asarray(omega, dtype=float)
    adj = (np.abs(M) > gamma).astype(np.int8)
    np.fill_diagonal(adj, 0)
    adj = adj & adj.T  # estimates are symmetric; harmless for raw input
    return GraphEstimate(adjacency=adj, gamma=float(gamma))


def lambda_grid(lo, hi, count) -> np.ndarray:
    """Geometrically spaced tuning grid, descending from hi to lo."""
    if not 0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    if count < 2:
        raise ValueError("count must be >= 2")
    return np.geomspace(hi, lo, int(count))
