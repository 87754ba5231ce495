"""Lloyd-style solvers: k-means, the log-potential variant, the
sum-of-powers variant, and the random-subsampling baseline.

All solvers share the same skeleton: seed centers from the data, then
alternate nearest-center assignment with a per-cluster center update until
the objective stops moving. They differ only in the update step:

    k-means          cluster mean (closed form)
    sum of powers    continuous convex minimizer of sum ||x - d||^k, k >= 1
    log potential    discrete search over cluster members for the smallest
                     sum of log distances, screened to the members nearest
                     the cluster mean

Every recorded objective trace is non-increasing: the log-potential update
keeps the incumbent center when the screened candidate would be worse, and
both loops stop (keeping the previous state) if a round would raise the
objective, which can only happen at floating-point noise level.
"""

from __future__ import annotations

import math
import time
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .core import (
    Assignment,
    CenterSet,
    DataMatrix,
    Method,
    RunReport,
    SolverConfig,
)

# Scale factor of the gradient guard: terms within GUARD_SCALE * (bounding
# box diagonal) of the center contribute a zero gradient term, which is the
# correct subgradient choice at coincident points.
GUARD_SCALE = 1e-12

_WEISZFELD_MAX_ITER = 1000
_LBFGS_MAX_ITER = 200


def _cluster_members(cluster) -> np.ndarray:
    if isinstance(cluster, DataMatrix):
        return cluster.points
    arr = np.ascontiguousarray(cluster, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError("cluster must contain at least one point")
    return arr


def _bbox_diagonal(points: np.ndarray) -> float:
    return float(np.sqrt(np.sum((points.max(axis=0) - points.min(axis=0)) ** 2)))


def _initial_indices(n_points: int, n_centers: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n_points, size=n_centers, replace=False))


def _check_n(n_centers: int, n_points: int) -> None:
    if not 1 <= n_centers <= n_points:
        raise ValueError(
            f"number of centers must satisfy 1 <= n <= N, got n={n_centers}, N={n_points}"
        )


# ---------------------------------------------------------------------------
# per-cluster center updates
# ---------------------------------------------------------------------------

def log_potential(cluster, center, nugget: float) -> float:
    """Sum of log(distance + nugget) from the cluster members to ``center``."""
    if not nugget > 0.0:
        raise ValueError(f"nugget must be > 0, got {nugget}")
    members = _cluster_members(cluster)
    center = np.ascontiguousarray(center, dtype=np.float64).reshape(-1)
    if center.shape[0] != members.shape[1]:
        raise ValueError("center dimension does not match cluster")
    return float(_kernels.log_potential_sum(members, center, nugget))


def _screened_count(screen_fraction: float, n_members: int) -> int:
    # ceil(r * m) with a tiny slack so exact products don't round up
    count = math.ceil(screen_fraction * n_members - 1e-9)
    return min(n_members, max(1, count))


def _screened_log_argmin(members: np.ndarray, screen_fraction: float):
    n_members = members.shape[0]
    count = _screened_count(screen_fraction, n_members)
    if count >= n_members:
        cand_idx = np.arange(n_members)
    else:
        sq_to_mean = np.sum((members - members.mean(axis=0)) ** 2, axis=1)
        order = np.argsort(sq_to_mean, kind="stable")
        cand_idx = np.sort(order[:count])
    objs = _kernels.log_candidate_objectives(members, np.ascontiguousarray(members[cand_idx]))
    best = int(np.argmin(objs))  # first minimum = lowest member index
    return members[cand_idx[best]].copy(), float(objs[best])


def update_center_log(cluster, screen_fraction: float) -> np.ndarray:
    """Cluster member minimizing the nugget-free sum of log distances.

    Only the ceil(screen_fraction * size) members nearest the cluster mean
    are evaluated (all of them for screen_fraction = 1). Duplicates of a
    candidate are excluded from its objective; ties break to the lowest
    member index.
    """
    if not 0.0 < screen_fraction <= 1.0:
        raise ValueError(f"screen_fraction must be in (0, 1], got {screen_fraction}")
    members = _cluster_members(cluster)
    center, _ = _screened_log_argmin(members, screen_fraction)
    return center


def sum_of_powers(cluster, center, power: float):
    """Value and gradient of sum ||x - center||^k over the cluster.

    Gradient terms of members within the guard distance of the center are
    zero vectors (the k in [1, 2) regime is singular at coincident points).
    """
    if power < 1.0:
        raise ValueError(f"power must be >= 1, got {power}")
    members = _cluster_members(cluster)
    center = np.ascontiguousarray(center, dtype=np.float64).reshape(-1)
    if center.shape[0] != members.shape[1]:
        raise ValueError("center dimension does not match cluster")
    guard = GUARD_SCALE * _bbox_diagonal(members)
    value, grad = _kernels.sum_powers(members, center, power, guard)
    return float(value), np.asarray(grad)


def _minimize_sum_of_powers(
    members: np.ndarray, power: float, guard: float, cfg: SolverConfig
) -> np.ndarray:
    mean = members.mean(axis=0)
    if power == 2.0:
        return mean
    if power == 1.0:
        return _kernels.weiszfeld(
            members, mean.copy(), cfg.optimizer_tol, guard, _WEISZFELD_MAX_ITER
        )
    value0, grad0 = _kernels.sum_powers(members, mean, power, guard)
    scale = cfg.optimizer_tol * (1.0 + abs(value0))
    if float(np.linalg.norm(grad0)) <= scale:
        return mean
    result = minimize(
        lambda d: _kernels.sum_powers(members, np.ascontiguousarray(d), power, guard),
        mean,
        jac=True,
        method="L-BFGS-B",
        options={"gtol": scale, "ftol": 1e-15, "maxiter": _LBFGS_MAX_ITER},
    )
    return np.asarray(result.x, dtype=np.float64)


def update_center_power(cluster, power: float, cfg: Optional[SolverConfig] = None) -> np.ndarray:
    """Continuous minimizer of the within-cluster sum of k-th power distances.

    Starts from the cluster mean; for power 2 the mean already is the
    minimizer, for power 1 a modified Weiszfeld iteration handles optima
    sitting exactly on cluster members, and other powers run a line-search
    quasi-Newton descent on the analytic gradient.
    """
    if power < 1.0:
        raise ValueError(f"power must be >= 1, got {power}")
    cfg = cfg or SolverConfig()
    members = _cluster_members(cluster)
    guard = GUARD_SCALE * _bbox_diagonal(members)
    return _minimize_sum_of_powers(members, power, guard, cfg)


# ---------------------------------------------------------------------------
# shared Lloyd machinery
# ---------------------------------------------------------------------------

def _assign_with_repair(points: np.ndarray, centers: np.ndarray):
    """Assign points to centers, re-seeding any cluster that comes up empty.

    An empty cluster is re-seeded with the data point farthest from its
    current center, then the assignment is redone. Bounded retries: with
    heavily duplicated data a cluster can stay empty no matter what, in
    which case it keeps its center and is skipped by the update step.
    """
    n_centers = centers.shape[0]
    labels, _ = _kernels.assign(points, centers)
    counts = np.bincount(labels, minlength=n_centers)
    repairs = 0
    while counts.min() == 0 and repairs < n_centers:
        empty = int(np.argmin(counts))
        dist_sq = np.sum((points - centers[empty]) ** 2, axis=1)
        centers[empty] = points[int(np.argmax(dist_sq))]
        labels, _ = _kernels.assign(points, centers)
        counts = np.bincount(labels, minlength=n_centers)
        repairs += 1
    return labels, counts


def _finalize(points, centers, power, method, trace, iters, converged, t0):
    center_set = CenterSet(centers, power=power, method=method)
    labels, _ = _kernels.assign(points, center_set.centers)
    assignment = Assignment.from_labels(labels, center_set.n_centers)
    report = RunReport(
        objective_trace=list(trace),
        iters=iters,
        converged=converged,
        elapsed=time.perf_counter() - t0,
    )
    return center_set, assignment, report


def _lloyd_continuous(
    data: DataMatrix,
    n_centers: int,
    power: float,
    cfg: SolverConfig,
    method: Method,
    init_indices=None,
):
    t0 = time.perf_counter()
    points = data.points
    _check_n(n_centers, data.n_points)
    if init_indices is None:
        init_indices = _initial_indices(data.n_points, n_centers, cfg.seed)
    centers = points[np.asarray(init_indices, dtype=np.int64)].copy()
    guard = GUARD_SCALE * _bbox_diagonal(points)

    trace: list[float] = []
    converged = False
    iters = 0
    for _ in range(cfg.max_iters):
        labels, counts = _assign_with_repair(points, centers)
        new_centers = centers.copy()
        for i in range(n_centers):
            if counts[i] == 0:
                continue
            members = points[labels == i]
            new_centers[i] = _minimize_sum_of_powers(members, power, guard, cfg)
        objective = float(
            _kernels.power_fit_objective(points, new_centers, labels, power)
        )
        if trace and objective > trace[-1]:
            # can only be floating-point noise; keep the previous round
            converged = True
            break
        iters += 1
        move = float(np.sqrt(np.max(np.sum((new_centers - centers) ** 2, axis=1))))
        centers = new_centers
        trace.append(objective)
        if len(trace) >= 2 and abs(trace[-2] - objective) <= cfg.rel_tol * abs(trace[-2]):
            converged = True
            break
        if move <= cfg.optimizer_tol:
            converged = True
            break
    return _finalize(points, centers, power, method, trace, iters, converged, t0)


def kmeans(
    data: DataMatrix,
    n_centers: int,
    cfg: Optional[SolverConfig] = None,
    init_indices=None,
):
    """Classic Lloyd k-means: mean updates under squared Euclidean distance."""
    cfg = cfg or SolverConfig()
    return _lloyd_continuous(data, n_centers, 2.0, cfg, Method.KMEANS, init_indices)


def sum_of_powers_clustering(
    data: DataMatrix,
    n_centers: int,
    power: float,
    cfg: Optional[SolverConfig] = None,
    init_indices=None,
):
    """Lloyd iteration minimizing mean distance^k within clusters (k >= 1).

    For power 2 this is exactly ``kmeans``; larger powers push centers
    toward the spread of the data, smaller ones toward dense regions.
    """
    if power < 1.0:
        raise ValueError(f"power must be >= 1, got {power}")
    cfg = cfg or SolverConfig()
    return _lloyd_continuous(data, n_centers, float(power), cfg, Method.DC_POWER, init_indices)


def log_potential_clustering(
    data: DataMatrix,
    n_centers: int,
    cfg: Optional[SolverConfig] = None,
    init_indices=None,
):
    """Discrete Lloyd iteration under the sum-of-log-distances objective.

    Centers are always data points. Stops at an exact center-set fixpoint.
    """
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    points = data.points
    _check_n(n_centers, data.n_points)
    if init_indices is None:
        init_indices = _initial_indices(data.n_points, n_centers, cfg.seed)
    centers = points[np.asarray(init_indices, dtype=np.int64)].copy()

    trace: list[float] = []
    converged = False
    iters = 0
    for _ in range(cfg.max_iters):
        labels, counts = _assign_with_repair(points, centers)
        new_centers = centers.copy()
        for i in range(n_centers):
            if counts[i] == 0:
                continue
            members = points[labels == i]
            candidate, cand_obj = _screened_log_argmin(members, cfg.screen_fraction)
            if cfg.screen_fraction < 1.0:
                # screening may drop the incumbent; never trade it for worse
                incumbent_obj = float(
                    _kernels.log_candidate_objectives(members, centers[i : i + 1])[0]
                )
                if cand_obj > incumbent_obj:
                    continue
            new_centers[i] = candidate
        objective = float(_kernels.log_fit_objective(points, new_centers, labels))
        if trace and objective > trace[-1]:
            converged = True
            break
        iters += 1
        changed = not np.array_equal(new_centers, centers)
        centers = new_centers
        trace.append(objective)
        if not changed:
            converged = True
            break
    return _finalize(points, centers, 0.0, Method.DC_LOG, trace, iters, converged, t0)


def random_subsample(data: DataMatrix, n_centers: int, seed=0) -> CenterSet:
    """n distinct rows drawn uniformly without replacement."""
    _check_n(n_centers, data.n_points)
    idx = np.random.default_rng(seed).choice(data.n_points, size=n_centers, replace=False)
    return CenterSet(data.points[idx], power=0.0, method=Method.SUBSAMPLE)
