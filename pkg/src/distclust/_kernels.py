"""Hot numeric kernels with two interchangeable backends.

Every kernel exists twice: a numba ``@njit`` version (``*_nb``) and a pure
numpy version (``*_np``). The active backend is chosen once at import time
from the ``DISTCLUST_BACKEND`` environment variable:

    DISTCLUST_BACKEND=numba   use jitted kernels (default; falls back to
                              numpy with a warning if numba is missing)
    DISTCLUST_BACKEND=numpy   force the pure numpy path

Both variants of a kernel are kept importable so the benchmark suite and the
backend-agreement tests can compare them directly. Kernels are sequential on
purpose: accumulation order is fixed, so results are reproducible run to run
on a given backend.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

BACKEND_ENV_VAR = "DISTCLUST_BACKEND"

# Rows per block in the chunked numpy fallbacks; keeps temporaries ~tens of MB.
_NP_CHUNK = 256

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return wrap


def _requested_backend() -> str:
    value = os.environ.get(BACKEND_ENV_VAR, "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(
            f"{BACKEND_ENV_VAR} must be 'numba' or 'numpy', got {value!r}"
        )
    return value


_REQUESTED = _requested_backend()
if _REQUESTED == "numba" and not HAVE_NUMBA:  # pragma: no cover
    warnings.warn("numba is not importable; falling back to the numpy backend")
USING_NUMBA = _REQUESTED == "numba" and HAVE_NUMBA


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if USING_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# nearest-center assignment
# ---------------------------------------------------------------------------

@njit(cache=True)
def assign_nb(points, centers):
    n_pts, dim = points.shape
    n_ctr = centers.shape[0]
    labels = np.empty(n_pts, dtype=np.int64)
    best_sq = np.empty(n_pts, dtype=np.float64)
    for j in range(n_pts):
        best = np.inf
        arg = 0
        for i in range(n_ctr):
            s = 0.0
            for t in range(dim):
                d = points[j, t] - centers[i, t]
                s += d * d
            if s < best:
                best = s
                arg = i
        labels[j] = arg
        best_sq[j] = best
    return labels, best_sq


def assign_np(points, centers):
    n_pts = points.shape[0]
    labels = np.empty(n_pts, dtype=np.int64)
    best_sq = np.empty(n_pts, dtype=np.float64)
    for start in range(0, n_pts, _NP_CHUNK):
        stop = min(start + _NP_CHUNK, n_pts)
        diff = points[start:stop, None, :] - centers[None, :, :]
        sq = np.sum(diff * diff, axis=2)
        labels[start:stop] = np.argmin(sq, axis=1)
        best_sq[start:stop] = sq[np.arange(stop - start), labels[start:stop]]
    return labels, best_sq


# ---------------------------------------------------------------------------
# log-potential evaluation
# ---------------------------------------------------------------------------

@njit(cache=True)
def log_potential_sum_nb(points, center, nugget):
    total = 0.0
    for j in range(points.shape[0]):
        s = 0.0
        for t in range(points.shape[1]):
            d = points[j, t] - center[t]
            s += d * d
        total += np.log(np.sqrt(s) + nugget)
    return total


def log_potential_sum_np(points, center, nugget):
    diff = points - center[None, :]
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    return float(np.sum(np.log(dist + nugget)))


@njit(cache=True)
def log_candidate_objectives_nb(points, candidates):
    """Nugget-free log-potential of each candidate against ``points``.

    Zero-distance pairs (the candidate itself and any duplicates of it) are
    excluded from the sum.
    """
    n_cand = candidates.shape[0]
    out = np.empty(n_cand, dtype=np.float64)
    for c in range(n_cand):
        total = 0.0
        for j in range(points.shape[0]):
            s = 0.0
            for t in range(points.shape[1]):
                d = points[j, t] - candidates[c, t]
                s += d * d
            if s > 0.0:
                total += np.log(np.sqrt(s))
        out[c] = total
    return out


def log_candidate_objectives_np(points, candidates):
    out = np.empty(candidates.shape[0], dtype=np.float64)
    for c in range(candidates.shape[0]):
        diff = points - candidates[c][None, :]
        dist = np.sqrt(np.sum(diff * diff, axis=1))
        pos = dist > 0.0
        out[c] = np.sum(np.log(dist[pos]))
    return out


# ---------------------------------------------------------------------------
# sum-of-powers objective (value + gradient)
# ---------------------------------------------------------------------------

@njit(cache=True)
def sum_powers_nb(points, center, power, guard):
    dim = points.shape[1]
    value = 0.0
    grad = np.zeros(dim, dtype=np.float64)
    for j in range(points.shape[0]):
        s = 0.0
        for t in range(dim):
            d = center[t] - points[j, t]
            s += d * d
        dist = np.sqrt(s)
        value += dist ** power
        if dist > guard:
            w = power * dist ** (power - 2.0)
            for t in range(dim):
                grad[t] += w * (center[t] - points[j, t])
    return value, grad


def sum_powers_np(points, center, power, guard):
    diff = center[None, :] - points
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    value = float(np.sum(dist ** power))
    mask = dist > guard
    w = power * dist[mask] ** (power - 2.0)
    grad = np.sum(w[:, None] * diff[mask], axis=0)
    return value, grad


# ---------------------------------------------------------------------------
# double sums for the two-sample statistics
# ---------------------------------------------------------------------------

@njit(cache=True)
def dist_sum_nb(a, b):
    total = 0.0
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            s = 0.0
            for t in range(a.shape[1]):
                d = a[i, t] - b[j, t]
                s += d * d
            total += np.sqrt(s)
    return total


def dist_sum_np(a, b):
    total = 0.0
    for start in range(0, a.shape[0], _NP_CHUNK):
        stop = min(start + _NP_CHUNK, a.shape[0])
        diff = a[start:stop, None, :] - b[None, :, :]
        total += float(np.sum(np.sqrt(np.sum(diff * diff, axis=2))))
    return total


@njit(cache=True)
def phi_sum_nb(a, b):
    total = 0.0
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            s = 0.0
            for t in range(a.shape[1]):
                d = a[i, t] - b[j, t]
                s += d * d
            total += 1.0 - np.exp(-0.5 * s)
    return total


def phi_sum_np(a, b):
    total = 0.0
    for start in range(0, a.shape[0], _NP_CHUNK):
        stop = min(start + _NP_CHUNK, a.shape[0])
        diff = a[start:stop, None, :] - b[None, :, :]
        sq = np.sum(diff * diff, axis=2)
        total += float(np.sum(1.0 - np.exp(-0.5 * sq)))
    return total


# ---------------------------------------------------------------------------
# geometric-median iteration (sum of plain distances, power 1)
# ---------------------------------------------------------------------------

@njit(cache=True)
def weiszfeld_nb(points, start, tol, guard, max_iter):
    dim = points.shape[1]
    y = start.copy()
    for _ in range(max_iter):
        sum_w = 0.0
        coincident = 0
        t_num = np.zeros(dim, dtype=np.float64)
        r_vec = np.zeros(dim, dtype=np.float64)
        for j in range(points.shape[0]):
            s = 0.0
            for t in range(dim):
                d = points[j, t] - y[t]
                s += d * d
            dist = np.sqrt(s)
            if dist <= guard:
                coincident += 1
            else:
                w = 1.0 / dist
                sum_w += w
                for t in range(dim):
                    t_num[t] += w * points[j, t]
                    r_vec[t] += w * (points[j, t] - y[t])
        if sum_w == 0.0:
            return y
        r_norm = 0.0
        for t in range(dim):
            r_norm += r_vec[t] * r_vec[t]
        r_norm = np.sqrt(r_norm)
        if coincident > 0 and r_norm <= coincident:
            return y
        step_sq = 0.0
        y_norm_sq = 0.0
        if coincident > 0:
            lam = 1.0 - coincident / r_norm
            mu = coincident / r_norm
            for t in range(dim):
                new_t = lam * (t_num[t] / sum_w) + mu * y[t]
                d = new_t - y[t]
                step_sq += d * d
                y[t] = new_t
                y_norm_sq += new_t * new_t
        else:
            for t in range(dim):
                new_t = t_num[t] / sum_w
                d = new_t - y[t]
                step_sq += d * d
                y[t] = new_t
                y_norm_sq += new_t * new_t
        if np.sqrt(step_sq) <= tol * (1.0 + np.sqrt(y_norm_sq)):
            break
    return y


def weiszfeld_np(points, start, tol, guard, max_iter):
    y = start.copy()
    for _ in range(max_iter):
        diff = points - y[None, :]
        dist = np.sqrt(np.sum(diff * diff, axis=1))
        far = dist > guard
        coincident = int(points.shape[0] - np.count_nonzero(far))
        if not far.any():
            return y
        w = 1.0 / dist[far]
        sum_w = float(np.sum(w))
        t_num = np.sum(w[:, None] * points[far], axis=0)
        r_vec = np.sum(diff[far] / dist[far, None], axis=0)
        r_norm = float(np.sqrt(np.sum(r_vec * r_vec)))
        if coincident > 0 and r_norm <= coincident:
            return y
        y_new = t_num / sum_w
        if coincident > 0:
            mu = coincident / r_norm
            y_new = (1.0 - mu) * y_new + mu * y
        step = float(np.sqrt(np.sum((y_new - y) ** 2)))
        y = y_new
        if step <= tol * (1.0 + float(np.sqrt(np.sum(y * y)))):
            break
    return y


# ---------------------------------------------------------------------------
# whole-partition objectives (one term per data point, row-major order)
# ---------------------------------------------------------------------------

@njit(cache=True)
def log_fit_objective_nb(points, centers, labels):
    total = 0.0
    for j in range(points.shape[0]):
        c = labels[j]
        s = 0.0
        for t in range(points.shape[1]):
            d = points[j, t] - centers[c, t]
            s += d * d
        if s > 0.0:
            total += np.log(np.sqrt(s))
    return total


def log_fit_objective_np(points, centers, labels):
    diff = points - centers[labels]
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    pos = dist > 0.0
    return float(np.sum(np.log(dist[pos])))


@njit(cache=True)
def power_fit_objective_nb(points, centers, labels, power):
    total = 0.0
    for j in range(points.shape[0]):
        c = labels[j]
        s = 0.0
        for t in range(points.shape[1]):
            d = points[j, t] - centers[c, t]
            s += d * d
        total += np.sqrt(s) ** power
    return total / points.shape[0]


def power_fit_objective_np(points, centers, labels, power):
    diff = points - centers[labels]
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    return float(np.sum(dist ** power)) / points.shape[0]


# ---------------------------------------------------------------------------
# backend dispatch
# ---------------------------------------------------------------------------

if USING_NUMBA:
    assign = assign_nb
    log_potential_sum = log_potential_sum_nb
    log_candidate_objectives = log_candidate_objectives_nb
    sum_powers = sum_powers_nb
    dist_sum = dist_sum_nb
    phi_sum = phi_sum_nb
    weiszfeld = weiszfeld_nb
    log_fit_objective = log_fit_objective_nb
    power_fit_objective = power_fit_objective_nb
else:
    assign = assign_np
    log_potential_sum = log_potential_sum_np
    log_candidate_objectives = log_candidate_objectives_np
    sum_powers = sum_powers_np
    dist_sum = dist_sum_np
    phi_sum = phi_sum_np
    weiszfeld = weiszfeld_np
    log_fit_objective = log_fit_objective_np
    power_fit_objective = power_fit_objective_np


def warmup() -> None:
    """Run every dispatched kernel once on tiny inputs.

    With the numba backend this triggers (or loads the cached) JIT
    compilation so later calls are measured without compile overhead.
    """
    pts = np.array([[0.0, 0.0], [1.0, 1.0], [0.5, 0.25]])
    ctr = np.array([[0.0, 0.0], [1.0, 1.0]])
    lab = np.array([0, 1, 0], dtype=np.int64)
    assign(pts, ctr)
    log_potential_sum(pts, ctr[0], 0.01)
    log_candidate_objectives(pts, ctr)
    sum_powers(pts, ctr[0], 1.5, 1e-12)
    dist_sum(pts, ctr)
    phi_sum(pts, ctr)
    weiszfeld(pts, ctr[0].copy(), 1e-9, 1e-12, 5)
    log_fit_objective(pts, ctr, lab)
    power_fit_objective(pts, ctr, lab, 2.0)
