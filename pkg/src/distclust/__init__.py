"""distclust: cluster prototypes that preserve the data distribution.

K-means prototypes systematically overspread relative to the data they
summarize. This package provides Lloyd-style solvers whose prototypes track
the underlying distribution instead: a discrete log-potential variant, a
sum-of-powers variant with tunable exponent, and a tuning loop that picks
the exponent by minimizing the energy distance between data and prototypes.
Two-sample statistics (energy distance, Cramer statistic) and seeded
synthetic data generators round out the toolkit.
"""

from ._kernels import BACKEND_ENV_VAR, active_backend
from .clustering import (
    kmeans,
    log_potential,
    log_potential_clustering,
    random_subsample,
    sum_of_powers,
    sum_of_powers_clustering,
    update_center_log,
    update_center_power,
)
from .core import (
    Assignment,
    CenterSet,
    DataMatrix,
    Method,
    RunReport,
    SolverConfig,
    assign_all,
    nearest_center,
)
from .datagen import FAMILIES, GenSpec, generate
from .metrics import (
    cramer_statistic,
    energy_distance,
    quantization_geometric_mean,
    quantization_power_mean,
)
from .tuning import TuneTrace, distributional_clustering

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BACKEND_ENV_VAR",
    "CenterSet",
    "DataMatrix",
    "FAMILIES",
    "GenSpec",
    "Method",
    "RunReport",
    "SolverConfig",
    "TuneTrace",
    "active_backend",
    "assign_all",
    "cramer_statistic",
    "distributional_clustering",
    "energy_distance",
    "generate",
    "kmeans",
    "log_potential",
    "log_potential_clustering",
    "nearest_center",
    "quantization_geometric_mean",
    "quantization_power_mean",
    "random_subsample",
    "sum_of_powers",
    "sum_of_powers_clustering",
    "update_center_log",
    "update_center_power",
]
