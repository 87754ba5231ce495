"""Command-line front end: CSV ingestion, solver orchestration, and
machine-readable result bundles.

Subcommands
    gen       synthetic dataset -> CSV
    cluster   one reduction method -> centers/labels/report/trace bundle
    tune      power-tuned reduction -> bundle with the sweep trace
    metrics   energy distance + Cramer statistic between two CSV point sets
    compare   methods x seeds sweep -> long-format CSV for box plots

All numeric output uses 17 significant digits so files round-trip losslessly.
Failures print a single ``error: ...`` line on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ._kernels import active_backend
from .clustering import (
    kmeans,
    log_potential_clustering,
    random_subsample,
    sum_of_powers_clustering,
)
from .core import DataMatrix, RunReport, SolverConfig, assign_all
from .datagen import FAMILIES, GenSpec, generate
from .metrics import (
    cramer_self_term,
    cramer_statistic_given_self,
    energy_distance_given_self,
    energy_self_term,
)
from .tuning import TuneTrace, distributional_clustering

METHODS = ("kmeans", "dc", "dc-asymp", "dc-finite", "subsample")


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IngestSpec:
    """Where and how to read a dataset: path, numeric columns, scaling."""

    path: str
    columns: Optional[tuple[str, ...]] = None  # None selects every column
    standardize: bool = False


@dataclass(frozen=True)
class LoadResult:
    data: DataMatrix
    columns: tuple[str, ...]
    dropped_rows: int


def load_csv(spec: IngestSpec) -> LoadResult:
    """Read selected columns as reals, dropping rows with gaps.

    Rows with a missing, non-numeric, or non-finite value in any selected
    column are dropped and counted. Standardization (per-column z-score) is
    applied after filtering; constant columns are only centered.
    """
    try:
        frame = pd.read_csv(spec.path)
    except FileNotFoundError:
        raise ValueError(f"input file not found: {spec.path}")
    except Exception as exc:
        raise ValueError(f"could not parse {spec.path}: {exc}")
    if spec.columns is not None:
        unknown = [c for c in spec.columns if c not in frame.columns]
        if unknown:
            raise ValueError(f"unknown column(s) {unknown}; file has {list(frame.columns)}")
        columns = list(spec.columns)
    else:
        columns = list(frame.columns)
    if not columns:
        raise ValueError("no columns selected")
    numeric = frame[columns].apply(pd.to_numeric, errors="coerce")
    keep = np.isfinite(numeric).all(axis=1)  # drops NaN and inf rows alike
    dropped = int((~keep).sum())
    values = numeric.loc[keep].to_numpy(dtype=np.float64)
    if values.shape[0] == 0:
        raise ValueError(
            f"no usable rows: every row has a missing or non-numeric value in {columns}"
        )
    if spec.standardize:
        mean = values.mean(axis=0)
        std = values.std(axis=0)
        std = np.where(std > 0.0, std, 1.0)
        values = (values - mean) / std
    return LoadResult(DataMatrix(values), tuple(columns), dropped)


# ---------------------------------------------------------------------------
# output writers (17 significant digits everywhere)
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    return format(float(value), ".17g")


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_centers(path: Path, centers: np.ndarray, columns: Sequence[str]) -> None:
    _write_csv(path, columns, ([_fmt(v) for v in row] for row in centers))


def _write_labels(path: Path, labels: np.ndarray) -> None:
    _write_csv(path, ["label"], ([str(int(v))] for v in labels))


def _write_trace(path: Path, trace: Optional[TuneTrace]) -> None:
    if trace is None:
        _write_csv(path, ["k", "energy"], [])
        return
    rows = ([_fmt(k), _fmt(e)] for k, e in zip(trace.powers, trace.energies))
    _write_csv(path, ["k", "energy"], rows)


def _config_echo(cfg: SolverConfig) -> dict:
    return {
        "nugget": cfg.nugget,
        "screen_fraction": cfg.screen_fraction,
        "tuning_step": cfg.tuning_step,
        "max_iters": cfg.max_iters,
        "rel_tol": cfg.rel_tol,
        "optimizer_tol": cfg.optimizer_tol,
        "seed": cfg.seed,
    }


# ---------------------------------------------------------------------------
# solver orchestration
# ---------------------------------------------------------------------------

def _solve(data: DataMatrix, n: int, method: str, cfg: SolverConfig,
           power: Optional[float], step: float):
    """Run one reduction method; returns (centers, labels, report, tune_trace)."""
    trace = None
    if method == "kmeans":
        center_set, assignment, report = kmeans(data, n, cfg)
    elif method == "dc-asymp":
        center_set, assignment, report = log_potential_clustering(data, n, cfg)
    elif method == "dc-finite":
        if power is None:
            raise ValueError("--k is required for method dc-finite")
        center_set, assignment, report = sum_of_powers_clustering(data, n, power, cfg)
    elif method == "subsample":
        t0 = time.perf_counter()
        center_set = random_subsample(data, n, cfg.seed)
        assignment = assign_all(data, center_set)
        report = RunReport(converged=True, elapsed=time.perf_counter() - t0)
    elif method == "dc":
        center_set, trace, report = distributional_clustering(data, n, step, cfg)
        assignment = assign_all(data, center_set)
    else:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    return center_set, assignment, report, trace


def _write_bundle(out_dir: Path, columns, center_set, assignment, trace,
                  report_dict) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "centers": out_dir / "centers.csv",
        "labels": out_dir / "labels.csv",
        "report": out_dir / "report.json",
        "trace": out_dir / "trace.csv",
    }
    _write_centers(paths["centers"], center_set.centers, columns)
    _write_labels(paths["labels"], assignment.labels)
    _write_trace(paths["trace"], trace)
    report_dict["outputs"] = {k: str(v) for k, v in paths.items()}
    paths["report"].write_text(json.dumps(report_dict, indent=2) + "\n", encoding="utf-8")
    return report_dict


def _cluster_like(args, method: str, command: str) -> int:
    cfg = _config_from_args(args)
    loaded = load_csv(IngestSpec(args.input, _split_columns(args.columns), args.standardize))
    data = loaded.data
    power = getattr(args, "k", None)
    center_set, assignment, report, trace = _solve(
        data, args.n, method, cfg, power, args.delta_step
    )
    energy = report.energy
    cramer = report.cramer
    if energy is None:
        energy = energy_distance_given_self(data, center_set, energy_self_term(data))
    if cramer is None:
        cramer = cramer_statistic_given_self(data, center_set, cramer_self_term(data))
    report_dict = {
        "command": command,
        "input": args.input,
        "columns": list(loaded.columns),
        "standardize": bool(args.standardize),
        "dropped_rows": loaded.dropped_rows,
        "effective_rows": data.n_points,
        "dim": data.dim,
        "n": args.n,
        "method": method,
        "k": power,
        "k_star": report.k_star,
        "backend": active_backend(),
        "config": _config_echo(cfg),
        "objective_trace": [float(v) for v in report.objective_trace],
        "iters": report.iters,
        "converged": report.converged,
        "energy": float(energy),
        "cramer": float(cramer),
        "elapsed_sec": report.elapsed,
    }
    _write_bundle(Path(args.out_dir), loaded.columns, center_set, assignment, trace, report_dict)
    print(
        f"{method}: n={args.n} N={data.n_points} p={data.dim} "
        f"energy={energy:.6g} cramer={cramer:.6g}"
        + (f" k_star={report.k_star:g}" if report.k_star is not None else "")
    )
    return 0


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_gen(args) -> int:
    spec = GenSpec(
        family=args.family,
        n_points=args.rows,
        dim=args.dim,
        seed=args.seed,
        shape=args.shape,
        rate=args.rate,
    )
    data = generate(spec)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    header = [f"x{i}" for i in range(data.dim)]
    _write_centers(out, data.points, header)
    print(f"wrote {data.n_points} rows x {data.dim} cols to {out}")
    return 0


def _cmd_cluster(args) -> int:
    return _cluster_like(args, args.method, "cluster")


def _cmd_tune(args) -> int:
    return _cluster_like(args, "dc", "tune")


def _cmd_metrics(args) -> int:
    columns = _split_columns(args.columns)
    left = load_csv(IngestSpec(args.left, columns))
    right = load_csv(IngestSpec(args.right, columns))
    payload = {
        "energy": energy_distance_given_self(
            left.data, right.data, energy_self_term(left.data)
        ),
        "cramer": cramer_statistic_given_self(
            left.data, right.data, cramer_self_term(left.data)
        ),
        "rows_left": left.data.n_points,
        "rows_right": right.data.n_points,
        "dropped_left": left.dropped_rows,
        "dropped_right": right.dropped_rows,
        "columns": list(left.columns),
    }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_compare(args) -> int:
    methods = sorted(set(_split_list(args.methods)))
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    seeds = sorted({int(s) for s in _split_list(args.seeds)})
    if not methods or not seeds:
        raise ValueError("compare needs at least one method and one seed")
    base_cfg = _config_from_args(args)
    loaded = load_csv(IngestSpec(args.input, _split_columns(args.columns), args.standardize))
    data = loaded.data
    x_energy = energy_self_term(data)
    x_cramer = cramer_self_term(data)

    rows = []
    for method in methods:
        for seed in seeds:
            cfg = replace(base_cfg, seed=seed)
            t0 = time.perf_counter()
            center_set, _, report, _ = _solve(
                data, args.n, method, cfg, getattr(args, "k", None), args.delta_step
            )
            elapsed = time.perf_counter() - t0
            energy = energy_distance_given_self(data, center_set, x_energy)
            cramer = cramer_statistic_given_self(data, center_set, x_cramer)
            k_star = "" if report.k_star is None else _fmt(report.k_star)
            rows.append(
                [method, str(seed), _fmt(energy), _fmt(cramer), k_star, _fmt(elapsed)]
            )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "compare.csv"
    _write_csv(out_path, ["method", "seed", "energy", "cramer", "k_star", "elapsed"], rows)
    print(f"wrote {len(rows)} rows to {out_path}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _split_columns(raw: Optional[str]) -> Optional[tuple[str, ...]]:
    if raw is None:
        return None
    names = tuple(s.strip() for s in raw.split(",") if s.strip())
    if not names:
        raise ValueError("--columns must name at least one column")
    return names


def _split_list(raw: str) -> list[str]:
    return [s.strip() for s in raw.split(",") if s.strip()]


def _config_from_args(args) -> SolverConfig:
    return SolverConfig(
        nugget=args.nugget,
        screen_fraction=args.r,
        tuning_step=args.delta_step,
        max_iters=args.max_iters,
        rel_tol=args.rel_tol,
        optimizer_tol=args.optimizer_tol,
        seed=getattr(args, "seed", 0),
    )


def _add_solver_flags(p: argparse.ArgumentParser, with_seed: bool = True) -> None:
    p.add_argument("--n", type=int, required=True, help="number of prototype points")
    p.add_argument("--columns", default=None,
                   help="comma-separated column names (default: all columns)")
    p.add_argument("--standardize", action="store_true",
                   help="z-score each selected column after filtering")
    p.add_argument("--r", type=float, default=0.10,
                   help="screening fraction of the log-potential update")
    p.add_argument("--delta-step", type=float, default=0.5,
                   help="power increment of the tuning sweep")
    p.add_argument("--nugget", type=float, default=1e-2)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--optimizer-tol", type=float, default=1e-9)
    if with_seed:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True, help="directory for the result bundle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distclust",
        description="Distribution-preserving data reduction via clustering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    p_gen.add_argument("--family", choices=FAMILIES, required=True)
    p_gen.add_argument("--rows", type=int, required=True, help="number of points N")
    p_gen.add_argument("--dim", type=int, required=True, help="dimension p")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--shape", type=float, default=1.0, help="gamma shape")
    p_gen.add_argument("--rate", type=float, default=1.0, help="gamma rate")
    p_gen.add_argument("--out", required=True, help="output CSV path")
    p_gen.set_defaults(func=_cmd_gen)

    p_cluster = sub.add_parser("cluster", help="run one reduction method")
    p_cluster.add_argument("input", help="input CSV with a header row")
    p_cluster.add_argument("--method", choices=METHODS, required=True)
    p_cluster.add_argument("--k", type=float, default=None,
                           help="power for dc-finite (>= 1)")
    _add_solver_flags(p_cluster)
    p_cluster.set_defaults(func=_cmd_cluster)

    p_tune = sub.add_parser("tune", help="power-tuned reduction (writes the sweep trace)")
    p_tune.add_argument("input", help="input CSV with a header row")
    _add_solver_flags(p_tune)
    p_tune.set_defaults(func=_cmd_tune)

    p_metrics = sub.add_parser("metrics",
                               help="two-sample statistics between two CSV point sets")
    p_metrics.add_argument("left", help="first CSV (treated as the data sample)")
    p_metrics.add_argument("right", help="second CSV (treated as the reduced sample)")
    p_metrics.add_argument("--columns", default=None,
                           help="comma-separated column names used for both files")
    p_metrics.set_defaults(func=_cmd_metrics)

    p_cmp = sub.add_parser("compare", help="run methods x seeds and tabulate metrics")
    p_cmp.add_argument("input", help="input CSV with a header row")
    p_cmp.add_argument("--methods", default="kmeans,dc,subsample",
                       help="comma-separated methods")
    p_cmp.add_argument("--seeds", default="0", help="comma-separated integer seeds")
    p_cmp.add_argument("--k", type=float, default=None,
                       help="power when dc-finite is among the methods")
    _add_solver_flags(p_cmp, with_seed=False)
    p_cmp.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
