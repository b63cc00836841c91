"""Independent grid-search oracles for the d=2 column LP.

grid_oracle_min_l1 is an exact reformulation of the exhaustive scan: for
each v1 grid value, the feasible v2 values form an interval, and |v2| is
minimized at the in-interval grid point nearest zero, so scanning those
candidates reproduces the full-grid minimum. brute_oracle_min_l1 is the
literal full scan, used to validate the fast form.
"""

import math

import numpy as np


def grid_oracle_min_l1(S, lam, j, lo=-3.0, hi=3.0, step=1e-3):
    S = np.asarray(S, dtype=float)
    e = np.zeros(2)
    e[j] = 1.0
    n = int(round((hi - lo) / step)) + 1
    v1 = lo + step * np.arange(n)
    lo2 = np.full(n, lo)
    hi2 = np.full(n, hi)
    feasible = np.ones(n, dtype=bool)
    for r in range(2):
        a, b = S[r, 0], S[r, 1]  # constraint: |a v1 + b v2 - e_r| <= lam
        low = e[r] - lam - a * v1
        high = e[r] + lam - a * v1
        if b == 0.0:
            feasible &= (low <= 0.0) & (0.0 <= high)
        else:
            lo_r, hi_r = low / b, high / b
            if b < 0:
                lo_r, hi_r = hi_r, lo_r
            lo2 = np.maximum(lo2, lo_r)
            hi2 = np.minimum(hi2, hi_r)
    k_lo = np.clip(np.ceil((lo2 - lo) / step - 1e-9).astype(int), 0, n - 1)
    k_hi = np.clip(np.floor((hi2 - lo) / step + 1e-9).astype(int), 0, n - 1)
    ok = feasible & (lo2 <= hi2 + 1e-15) & (k_lo <= k_hi)
    if not ok.any():
        return math.inf
    k_zero = int(round(-lo / step))
    k_best = np.clip(k_zero, k_lo, k_hi)
    obj = np.abs(v1) + np.abs(lo + step * k_best)
    return float(obj[ok].min())


def brute_oracle_min_l1(S, lam, j, lo=-3.0, hi=3.0, step=1e-3, chunk=400):
    S = np.asarray(S, dtype=float)
    e = np.zeros(2)
    e[j] = 1.0
    n = int(round((hi - lo) / step)) + 1
    grid = lo + step * np.arange(n)
    best = math.inf
    for start in range(0, n, chunk):
        v1 = grid[start : start + chunk][:, None]
        v2 = grid[None, :]
        r0 = np.abs(S[0, 0] * v1 + S[0, 1] * v2 - e[0])
        r1 = np.abs(S[1, 0] * v1 + S[1, 1] * v2 - e[1])
        feasible = (r0 <= lam) & (r1 <= lam)
        if feasible.any():
            obj = np.abs(v1) + np.abs(v2)
            best = min(best, float(obj[feasible].min()))
    return best


def random_spd_2x2(rng, eig_low=0.3, eig_high=2.0):
    theta = rng.uniform(0, math.pi)
    c, s = math.cos(theta), math.sin(theta)
    Q = np.array([[c, -s], [s, c]])
    return Q @ np.diag(rng.uniform(eig_low, eig_high, size=2)) @ Q.T
