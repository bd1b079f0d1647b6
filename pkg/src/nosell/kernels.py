"""Hot numeric kernels, compiled with numba when available.

Each kernel exists in two functionally equivalent forms:

* a scalar loop, compiled with ``numba.njit`` (the default path), and
* a vectorized pure-numpy implementation (the fallback path).

Set the environment variable ``NOSELL_NO_NUMBA`` to any non-empty value
other than ``"0"`` before importing the package to force the numpy path.
The same happens automatically when numba is not installed.  Both
implementations stay importable under their ``*_numpy`` / ``*_loop``
names so tests and benchmarks can compare them directly.

All kernels take contiguous float64 arrays; callers are responsible for
dtype coercion.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("NOSELL_NO_NUMBA", "") not in ("", "0")

if not NUMBA_DISABLED:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False


def _jit(func):
    if HAVE_NUMBA:
        return njit(cache=True)(func)
    return func


# ---------------------------------------------------------------------------
# Threshold scan (l2 water-filling index)
# ---------------------------------------------------------------------------

def threshold_scan_loop(sorted_desc, budget):
    """Scan a descending delta vector for the largest prefix length k with

        sum_{i<=k} (d_i - d_k) < budget            (strict inequality)

    and return ``(k, lam)`` where ``lam = (sum_{i<=k} d_i - budget) / k``.

    The left-hand side is non-decreasing in k, so the qualifying set is a
    prefix; we keep the last index that qualifies.  The comparison is exact
    on purpose: no tolerance is involved in selecting k.
    """
    n = sorted_desc.shape[0]
    running = sorted_desc[0]
    best_k = 1
    best_sum = running
    for k in range(2, n + 1):
        d = sorted_desc[k - 1]
        running += d
        if running - k * d < budget:
            best_k = k
            best_sum = running
    return best_k, (best_sum - budget) / best_k


def threshold_scan_numpy(sorted_desc, budget):
    """Vectorized twin of :func:`threshold_scan_loop`."""
    n = sorted_desc.shape[0]
    prefix = np.cumsum(sorted_desc)
    ks = np.arange(1, n + 1, dtype=np.float64)
    lhs = prefix - ks * sorted_desc
    # lhs is non-decreasing, but guard against float wobble by taking the
    # last qualifying index rather than counting them
    active = lhs < budget
    k_star = int(np.flatnonzero(active)[-1]) + 1
    lam = (float(prefix[k_star - 1]) - budget) / k_star
    return k_star, lam


# ---------------------------------------------------------------------------
# Active-set enumeration (l2 brute force)
# ---------------------------------------------------------------------------

def active_set_scan_loop(deltas, budget, tol):
    """Enumerate all 2^n - 1 nonempty support sets for the equality-
    constrained l2 problem and return ``(best_mask, best_objective)``.

    For support S the stationary point is ``y_i = d_i - lam_S`` on S and 0
    elsewhere, with ``lam_S = (sum_S d - budget) / |S|``.  It is feasible
    when ``min_S d - lam_S >= -tol``.  The objective at the stationary
    point collapses to ``|S| lam_S^2 + (sum d^2 - sum_S d^2)``, so the scan
    never materializes candidate vectors.
    """
    n = deltas.shape[0]
    total_sq = 0.0
    for i in range(n):
        total_sq += deltas[i] * deltas[i]
    best_mask = 0
    best_obj = np.inf
    for mask in range(1, 1 << n):
        s1 = 0.0
        s2 = 0.0
        mn = np.inf
        count = 0
        m = mask
        i = 0
        while m:
            if m & 1:
                d = deltas[i]
                s1 += d
                s2 += d * d
                if d < mn:
                    mn = d
                count += 1
            m >>= 1
            i += 1
        lam = (s1 - budget) / count
        if mn - lam < -tol:
            continue
        obj = count * lam * lam + (total_sq - s2)
        if obj < best_obj:
            best_obj = obj
            best_mask = mask
    return best_mask, best_obj


def active_set_scan_numpy(deltas, budget, tol):
    """Vectorized twin of :func:`active_set_scan_loop`.

    Walks the 2^n - 1 masks in chunks, expanding each chunk into an
    (m, n) bit matrix so the per-support sums become matrix products.
    """
    n = deltas.shape[0]
    total_sq = float(np.dot(deltas, deltas))
    sq = deltas * deltas
    bit_positions = np.arange(n, dtype=np.int64)
    best_mask = 0
    best_obj = np.inf
    chunk = 1 << 16
    for start in range(1, 1 << n, chunk):
        stop = min(start + chunk, 1 << n)
        masks = np.arange(start, stop, dtype=np.int64)
        bits = (masks[:, None] >> bit_positions[None, :]) & 1
        on = bits.astype(bool)
        count = bits.sum(axis=1)
        s1 = bits @ deltas
        s2 = bits @ sq
        mn = np.where(on, deltas[None, :], np.inf).min(axis=1)
        lam = (s1 - budget) / count
        obj = count * lam * lam + (total_sq - s2)
        obj = np.where(mn - lam >= -tol, obj, np.inf)
        j = int(np.argmin(obj))
        if obj[j] < best_obj:
            best_obj = float(obj[j])
            best_mask = int(masks[j])
    return best_mask, best_obj


# ---------------------------------------------------------------------------
# Grid enumeration (l1 brute force)
# ---------------------------------------------------------------------------

def grid_l1_scan_loop(deltas, budget, resolution):
    """Enumerate every composition of ``resolution`` grid cells into n parts
    and return ``(best_cells, best_objective)`` for the l1 objective
    ``sum |c_i * step - d_i|`` with ``step = budget / resolution``.

    The odometer walks the first n-1 counts; the last part absorbs the
    remainder, so every candidate satisfies the budget exactly in grid
    units.
    """
    n = deltas.shape[0]
    step = budget / resolution
    best = np.zeros(n, dtype=np.int64)
    if n == 1:
        best[0] = resolution
        return best, abs(resolution * step - deltas[0])
    head = np.zeros(n - 1, dtype=np.int64)
    used = 0
    best_obj = np.inf
    while True:
        obj = abs((resolution - used) * step - deltas[n - 1])
        for j in range(n - 1):
            obj += abs(head[j] * step - deltas[j])
        if obj < best_obj:
            best_obj = obj
            for j in range(n - 1):
                best[j] = head[j]
            best[n - 1] = resolution - used
        j = n - 2
        while j >= 0:
            # invariant: head[j+1:] is zero, so used == sum(head[:j+1])
            if used < resolution:
                head[j] += 1
                used += 1
                break
            used -= head[j]
            head[j] = 0
            j -= 1
        if j < 0:
            return best, best_obj


def grid_l1_scan_numpy(deltas, budget, resolution):
    """Vectorized twin of :func:`grid_l1_scan_loop`.

    Literal enumeration does not vectorize well, so this path solves the
    same minimization by dynamic programming over prefix budgets:
    ``f_j[r]`` is the best cost of the first j parts using exactly r cells.
    The minimum (and a minimizing composition, recovered by backtracking)
    coincides with the enumerated one; tie-breaking between equal-cost
    compositions may differ.
    """
    n = deltas.shape[0]
    step = budget / resolution
    cells = np.arange(resolution + 1, dtype=np.int64)
    unit = np.abs(cells[None, :] * step - deltas[:, None])
    f = unit[0].copy()
    choices = np.empty((n - 1, resolution + 1), dtype=np.int64) if n > 1 else None
    shifted = cells[:, None] - cells[None, :]
    valid = shifted >= 0
    safe = np.where(valid, shifted, 0)
    for j in range(1, n):
        table = np.where(valid, f[safe] + unit[j][None, :], np.inf)
        choices[j - 1] = np.argmin(table, axis=1)
        f = table[cells, choices[j - 1]]
    best = np.zeros(n, dtype=np.int64)
    r = resolution
    for j in range(n - 1, 0, -1):
        c = int(choices[j - 1][r])
        best[j] = c
        r -= c
    best[0] = r
    return best, float(f[resolution])


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    threshold_scan_jit = _jit(threshold_scan_loop)
    active_set_scan_jit = _jit(active_set_scan_loop)
    grid_l1_scan_jit = _jit(grid_l1_scan_loop)
    threshold_scan = threshold_scan_jit
    active_set_scan = active_set_scan_jit
    grid_l1_scan = grid_l1_scan_jit
else:
    threshold_scan_jit = None
    active_set_scan_jit = None
    grid_l1_scan_jit = None
    threshold_scan = threshold_scan_numpy
    active_set_scan = active_set_scan_numpy
    grid_l1_scan = grid_l1_scan_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"
