"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs each kernel pair on identical inputs, then an end-to-end solver
comparison with the whole backend swapped. Numba kernels are warmed up
first so JIT compilation is not timed.

Usage:
    python benchmarks/bench_kernels.py [--quick] [--repeats R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from distclust import DataMatrix, SolverConfig, kmeans, log_potential_clustering
from distclust import _kernels as K
from distclust.metrics import energy_distance

DISPATCHED = [
    "assign",
    "log_potential_sum",
    "log_candidate_objectives",
    "sum_powers",
    "dist_sum",
    "phi_sum",
    "weiszfeld",
    "log_fit_objective",
    "power_fit_objective",
]


def set_backend(backend: str) -> None:
    suffix = "_nb" if backend == "numba" else "_np"
    for name in DISPATCHED:
        setattr(K, name, getattr(K, name + suffix))


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_kernels(scale: float, repeats: int) -> None:
    rng = np.random.default_rng(0)
    n_big = int(100_000 * scale)
    pts_big = rng.standard_normal((n_big, 4))
    centers = rng.standard_normal((100, 4))
    labels = K.assign_np(pts_big, centers)[0]
    members = rng.standard_normal((int(5000 * scale), 4))
    cands = np.ascontiguousarray(members[: int(500 * scale)])
    pair_a = rng.standard_normal((int(4000 * scale), 4))
    pair_b = rng.standard_normal((int(4000 * scale), 4))
    start = members.mean(axis=0)

    cases = [
        ("assign", lambda f: f(pts_big, centers),
         K.assign_nb, K.assign_np),
        ("log_candidate_objectives", lambda f: f(members, cands),
         K.log_candidate_objectives_nb, K.log_candidate_objectives_np),
        ("sum_powers(k=3.5)", lambda f: f(pts_big, centers[0], 3.5, 1e-12),
         K.sum_powers_nb, K.sum_powers_np),
        ("dist_sum", lambda f: f(pair_a, pair_b),
         K.dist_sum_nb, K.dist_sum_np),
        ("phi_sum", lambda f: f(pair_a, pair_b),
         K.phi_sum_nb, K.phi_sum_np),
        ("weiszfeld(100 iters)", lambda f: f(members, start.copy(), 0.0, 1e-14, 100),
         K.weiszfeld_nb, K.weiszfeld_np),
        ("log_fit_objective", lambda f: f(pts_big, centers, labels),
         K.log_fit_objective_nb, K.log_fit_objective_np),
        ("power_fit_objective(k=2)", lambda f: f(pts_big, centers, labels, 2.0),
         K.power_fit_objective_nb, K.power_fit_objective_np),
    ]

    print(f"{'kernel':<28} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for name, runner, fn_nb, fn_np in cases:
        runner(fn_nb)  # warm the JIT
        t_nb = best_of(lambda: runner(fn_nb), repeats) * 1e3
        t_np = best_of(lambda: runner(fn_np), repeats) * 1e3
        print(f"{name:<28} {t_nb:>10.2f} {t_np:>10.2f} {t_np / t_nb:>7.1f}x")


def bench_end_to_end(scale: float, repeats: int) -> None:
    rng = np.random.default_rng(1)
    data = DataMatrix(rng.standard_normal((int(20_000 * scale), 2)))
    cfg = SolverConfig(seed=0)

    jobs = {
        "kmeans (n=50)": lambda: kmeans(data, 50, cfg),
        "log-potential solver (n=50)": lambda: log_potential_clustering(data, 50, cfg),
        "energy distance (n=50)": lambda: energy_distance(
            data, DataMatrix(data.points[:50])
        ),
    }
    print(f"\n{'end-to-end':<28} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    results = {}
    for backend in ("numba", "numpy"):
        set_backend(backend)
        for name, job in jobs.items():
            job()  # warm
            results[(backend, name)] = best_of(job, repeats) * 1e3
    set_backend("numba" if K.USING_NUMBA else "numpy")
    for name in jobs:
        t_nb = results[("numba", name)]
        t_np = results[("numpy", name)]
        print(f"{name:<28} {t_nb:>10.2f} {t_np:>10.2f} {t_np / t_nb:>7.1f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="10x smaller inputs")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if not K.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    scale = 0.1 if args.quick else 1.0
    print(f"active backend: {K.active_backend()}  (scale {scale:g}, "
          f"best of {args.repeats})")
    bench_kernels(scale, args.repeats)
    bench_end_to_end(scale, args.repeats)


if __name__ == "__main__":
    main()
