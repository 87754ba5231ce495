"""Shared data model and nearest-center geometry.

All container types are immutable after construction and validate their
invariants eagerly, so the solvers and metrics can assume clean inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import _kernels


class Method(str, Enum):
    """How a set of prototype points was produced."""

    KMEANS = "kmeans"
    DC_LOG = "dc_log"
    DC_POWER = "dc_power"
    SUBSAMPLE = "subsample"


def _as_matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, order="C", copy=True)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 1-D or 2-D array, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must contain at least one point, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or infinite coordinates")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class DataMatrix:
    """An immutable dataset of N points in p dimensions (float64)."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _as_matrix(self.points, "points"))

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n_points


@dataclass(frozen=True)
class CenterSet:
    """An ordered set of prototype points plus the power that produced it.

    ``power`` is 0 for the log-potential solver, 2 for k-means, and the
    tuned/requested exponent for the sum-of-powers solver. Subsamples carry
    power 0; no objective was optimized to produce them.
    """

    centers: np.ndarray
    power: float = 2.0
    method: Method = Method.KMEANS

    def __post_init__(self):
        object.__setattr__(self, "centers", _as_matrix(self.centers, "centers"))
        object.__setattr__(self, "power", float(self.power))
        object.__setattr__(self, "method", Method(self.method))
        if not np.isfinite(self.power) or self.power < 0.0:
            raise ValueError(f"power must be a finite real >= 0, got {self.power}")

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def __len__(self) -> int:
        return self.n_centers


@dataclass(frozen=True)
class Assignment:
    """Point-to-cluster map: one label per data point, plus cluster sizes."""

    labels: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        if labels.ndim != 1 or counts.ndim != 1:
            raise ValueError("labels and counts must be 1-D")
        n = counts.shape[0]
        if labels.shape[0] < 1 or n < 1:
            raise ValueError("labels and counts must be nonempty")
        if labels.min() < 0 or labels.max() >= n:
            raise ValueError("labels must lie in [0, n_centers)")
        recount = np.bincount(labels, minlength=n)
        if not np.array_equal(recount, counts):
            raise ValueError("counts do not match labels")
        labels.flags.writeable = False
        counts.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_labels(cls, labels: np.ndarray, n_centers: int) -> "Assignment":
        labels = np.asarray(labels, dtype=np.int64)
        if labels.size and labels.max() >= n_centers:
            raise ValueError(
                f"label {labels.max()} out of range for {n_centers} centers"
            )
        return cls(labels, np.bincount(labels, minlength=n_centers))

    @property
    def n_points(self) -> int:
        return self.labels.shape[0]


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by every solver.

    nugget        small positive offset that keeps log distances finite
    screen_fraction  fraction of each cluster (those nearest the cluster
                  mean) scanned by the discrete log-potential update
    tuning_step   increment of the power sweep in the tuned procedure
    max_iters     cap on Lloyd rounds
    rel_tol       relative objective-change convergence threshold
    optimizer_tol tolerance of the continuous center update (and the
                  center-movement stopping test)
    seed          RNG seed for initialization
    """

    nugget: float = 1e-2
    screen_fraction: float = 0.10
    tuning_step: float = 0.5
    max_iters: int = 100
    rel_tol: float = 1e-8
    optimizer_tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if not self.nugget > 0.0:
            raise ValueError(f"nugget must be > 0, got {self.nugget}")
        if not 0.0 < self.screen_fraction <= 1.0:
            raise ValueError(
                f"screen_fraction must be in (0, 1], got {self.screen_fraction}"
            )
        if not self.tuning_step > 0.0:
            raise ValueError(f"tuning_step must be > 0, got {self.tuning_step}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.optimizer_tol > 0.0:
            raise ValueError(f"optimizer_tol must be > 0, got {self.optimizer_tol}")


@dataclass
class RunReport:
    """What happened during one solver run.

    ``energy``, ``cramer`` and ``k_star`` are filled by the orchestration
    layers (power tuning, CLI); plain solver calls leave them None so a solve
    never forces the O(N^2) two-sample statistics.
    """

    objective_trace: list = field(default_factory=list)
    iters: int = 0
    converged: bool = False
    energy: Optional[float] = None
    cramer: Optional[float] = None
    k_star: Optional[float] = None
    elapsed: float = 0.0


def _check_dims(dim_x: int, dim_d: int) -> None:
    if dim_x != dim_d:
        raise ValueError(f"dimension mismatch: points have p={dim_x}, centers p={dim_d}")


def nearest_center(x, centers: CenterSet) -> tuple[int, float]:
    """Index of the closest center to ``x`` and the Euclidean distance to it.

    Ties break to the lowest center index.
    """
    vec = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if vec.ndim != 1:
        raise ValueError("x must be a single point")
    _check_dims(vec.shape[0], centers.dim)
    labels, best_sq = _kernels.assign(vec.reshape(1, -1), centers.centers)
    return int(labels[0]), float(np.sqrt(best_sq[0]))


def assign_all(data: DataMatrix, centers: CenterSet) -> Assignment:
    """Assign every point of ``data`` to its nearest center."""
    _check_dims(data.dim, centers.dim)
    labels, _ = _kernels.assign(data.points, centers.centers)
    return Assignment.from_labels(labels, centers.n_centers)
