"""Two-sample goodness-of-fit statistics and quantization-error functionals.

Both two-sample statistics are computed as exact double sums in fixed
row-major order; no subsampling, so values are reproducible and the tests
can pin them against hand-expanded sums.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .core import CenterSet, DataMatrix, _check_dims


def _as_points(obj) -> np.ndarray:
    if isinstance(obj, DataMatrix):
        return obj.points
    if isinstance(obj, CenterSet):
        return obj.centers
    arr = np.asarray(obj, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return arr


def _point_pair(x, d) -> tuple[np.ndarray, np.ndarray]:
    a = _as_points(x)
    b = _as_points(d)
    if a.shape[0] < 1 or b.shape[0] < 1:
        raise ValueError("both point sets must be nonempty")
    _check_dims(a.shape[1], b.shape[1])
    return a, b


def energy_self_term(x) -> float:
    """Mean pairwise distance within one sample: sum ||x_i - x_j|| / N^2.

    Exposed separately so a sweep comparing many center sets against one
    dataset pays the O(N^2) self sum once.
    """
    a = _as_points(x)
    n = a.shape[0]
    return _kernels.dist_sum(a, a) / (n * n)


def energy_distance_given_self(x, d, x_self: float) -> float:
    """Energy distance where the data self term is already known."""
    a, b = _point_pair(x, d)
    big_n = a.shape[0]
    n = b.shape[0]
    cross = _kernels.dist_sum(a, b)
    self_d = _kernels.dist_sum(b, b)
    return 2.0 * cross / (n * big_n) - x_self - self_d / (n * n)


def energy_distance(x, d) -> float:
    """Energy distance between two point sets.

    2/(nN) sum ||x_j - d_i|| - 1/N^2 sum ||x_i - x_j|| - 1/n^2 sum ||d_i - d_j||,
    nonnegative up to rounding, zero when the sets coincide.
    """
    return energy_distance_given_self(x, d, energy_self_term(x))


def cramer_self_term(x) -> float:
    """Within-sample kernel mean: sum phi(||x_i - x_j||^2) / N^2."""
    a = _as_points(x)
    n = a.shape[0]
    return _kernels.phi_sum(a, a) / (n * n)


def cramer_statistic_given_self(x, d, x_self: float) -> float:
    a, b = _point_pair(x, d)
    big_n = a.shape[0]
    n = b.shape[0]
    cross = _kernels.phi_sum(a, b)
    self_d = _kernels.phi_sum(b, b)
    bracket = 2.0 * cross / (n * big_n) - x_self - self_d / (n * n)
    return (n * big_n / (big_n + n)) * bracket


def cramer_statistic(x, d) -> float:
    """Kernelized two-sample statistic with phi(z) = 1 - exp(-z/2).

    The kernel is applied to squared distances; the n*N/(N+n) prefactor makes
    the value comparable across sample sizes.
    """
    return cramer_statistic_given_self(x, d, cramer_self_term(x))


def _nearest_distances(x, d) -> np.ndarray:
    a, b = _point_pair(x, d)
    _, best_sq = _kernels.assign(a, b)
    return np.sqrt(best_sq)


def quantization_power_mean(x, d, power: float) -> float:
    """k-th power mean of the distances to the nearest center.

    [(1/N) sum ||x_j - nearest(x_j)||^k]^(1/k); decreases toward the
    geometric mean as the power shrinks toward zero.
    """
    if not power > 0.0:
        raise ValueError(f"power must be > 0, got {power}; "
                         "use quantization_geometric_mean for the limit")
    dist = _nearest_distances(x, d)
    return float(np.mean(dist ** power)) ** (1.0 / power)


def quantization_geometric_mean(x, d, nugget: float = 0.0) -> float:
    """Geometric mean of nearest-center distances (power -> 0 limit).

    exp{(1/N) sum log(||x_j - nearest(x_j)|| + nugget)}. With nugget = 0 any
    zero distance collapses the product: the value is 0 by convention.
    """
    if nugget < 0.0:
        raise ValueError(f"nugget must be >= 0, got {nugget}")
    dist = _nearest_distances(x, d)
    if nugget == 0.0 and np.any(dist == 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(dist + nugget))))
