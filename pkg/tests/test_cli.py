import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from distclust.cli import IngestSpec, load_csv, main


@pytest.fixture
def tiny_csv(tmp_path):
    path = tmp_path / "data.csv"
    rows = ["a,b", "1,2", "3,4", "5,6", "7,8", "9,10", "11,12"]
    path.write_text("\n".join(rows) + "\n")
    return path


@pytest.fixture
def gen_csv(tmp_path):
    path = tmp_path / "gen.csv"
    code = main(
        ["gen", "--family", "normal", "--rows", "60", "--dim", "2",
         "--seed", "3", "--out", str(path)]
    )
    assert code == 0
    return path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestLoadCsv:
    def test_row_with_missing_cell_dropped(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n1,2\n3,\n5,6\n")
        res = load_csv(IngestSpec(str(path)))
        assert res.data.n_points == 2
        assert res.dropped_rows == 1

    def test_column_projection(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("a,b\n1,2\n3,4\n")
        res = load_csv(IngestSpec(str(path), columns=("b",)))
        assert res.data.points.ravel().tolist() == [2.0, 4.0]
        assert res.columns == ("b",)

    def test_all_missing_column_errors(self, tmp_path):
        path = tmp_path / "na.csv"
        path.write_text("a,b\nNA,1\nNA,2\n")
        with pytest.raises(ValueError, match="no usable rows"):
            load_csv(IngestSpec(str(path), columns=("a",)))

    def test_unknown_column_errors(self, tmp_path):
        path = tmp_path / "u.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="unknown column"):
            load_csv(IngestSpec(str(path), columns=("zz",)))

    def test_missing_file_errors(self):
        with pytest.raises(ValueError, match="not found"):
            load_csv(IngestSpec("nope/never.csv"))

    def test_non_numeric_cells_dropped(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,b\n1,2\nfoo,4\n5,6\n")
        res = load_csv(IngestSpec(str(path)))
        assert res.data.n_points == 2
        assert res.dropped_rows == 1

    def test_infinite_cells_dropped(self, tmp_path):
        path = tmp_path / "inf.csv"
        path.write_text("a,b\n1,2\ninf,4\n5,-inf\n7,8\n")
        res = load_csv(IngestSpec(str(path)))
        assert res.data.n_points == 2
        assert res.dropped_rows == 2

    def test_standardize(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("a,b\n1,5\n3,5\n5,5\n")
        res = load_csv(IngestSpec(str(path), standardize=True))
        col = res.data.points[:, 0]
        assert col.mean() == pytest.approx(0.0, abs=1e-15)
        assert col.std() == pytest.approx(1.0, abs=1e-12)
        # constant column is centered, not divided by zero
        assert np.all(res.data.points[:, 1] == 0.0)


class TestGen:
    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["gen", "--family", "gamma", "--rows", "40", "--dim", "3",
                "--seed", "9", "--shape", "2.0", "--rate", "0.5"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_shape_and_roundtrip(self, gen_csv):
        res = load_csv(IngestSpec(str(gen_csv)))
        assert res.data.n_points == 60 and res.data.dim == 2
        assert res.columns == ("x0", "x1")

    def test_bad_family_rejected_by_parser(self, tmp_path, capsys):
        with pytest.raises(SystemExit):
            main(["gen", "--family", "cauchy", "--rows", "5", "--dim", "1",
                  "--out", str(tmp_path / "x.csv")])


class TestClusterBundle:
    @pytest.mark.parametrize("method,extra", [
        ("kmeans", []),
        ("dc-asymp", []),
        ("dc-finite", ["--k", "2.5"]),
        ("subsample", []),
        ("dc", []),
    ])
    def test_bundle_complete(self, gen_csv, tmp_path, method, extra):
        out = tmp_path / f"out_{method}"
        code = main(["cluster", str(gen_csv), "--method", method, "--n", "5",
                     "--seed", "1", "--out-dir", str(out)] + extra)
        assert code == 0
        for name in ("centers.csv", "labels.csv", "report.json", "trace.csv"):
            assert (out / name).exists()
        report = json.loads((out / "report.json").read_text())
        assert report["method"] == method
        assert report["n"] == 5
        assert report["effective_rows"] == 60
        assert np.isfinite(report["energy"]) and np.isfinite(report["cramer"])
        for key in ("nugget", "screen_fraction", "tuning_step", "max_iters",
                    "rel_tol", "optimizer_tol", "seed"):
            assert key in report["config"]
        labels = read_rows(out / "labels.csv")
        assert len(labels) == 60
        centers = read_rows(out / "centers.csv")
        assert len(centers) == 5
        trace = read_rows(out / "trace.csv")
        if method == "dc":
            assert len(trace) >= 2
            assert report["k_star"] is not None
        else:
            assert trace == []

    def test_dc_finite_requires_k(self, gen_csv, tmp_path, capsys):
        code = main(["cluster", str(gen_csv), "--method", "dc-finite", "--n", "5",
                     "--out-dir", str(tmp_path / "o")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_n_larger_than_data_fails_with_bound(self, gen_csv, tmp_path, capsys):
        code = main(["cluster", str(gen_csv), "--method", "kmeans", "--n", "100",
                     "--out-dir", str(tmp_path / "o")])
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert "1 <= n <= N" in err
        assert err.count("\n") == 1

    def test_rerun_byte_identical(self, gen_csv, tmp_path):
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            code = main(["cluster", str(gen_csv), "--method", "dc", "--n", "4",
                         "--seed", "7", "--out-dir", str(out)])
            assert code == 0
            outs.append(out)
        for fname in ("centers.csv", "trace.csv", "labels.csv"):
            assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()

    def test_config_echo_reproduces_run(self, gen_csv, tmp_path):
        first = tmp_path / "first"
        code = main(["cluster", str(gen_csv), "--method", "kmeans", "--n", "6",
                     "--seed", "13", "--r", "0.2", "--out-dir", str(first)])
        assert code == 0
        report = json.loads((first / "report.json").read_text())
        cfg = report["config"]
        second = tmp_path / "second"
        code = main([
            "cluster", str(gen_csv), "--method", report["method"],
            "--n", str(report["n"]),
            "--seed", str(cfg["seed"]),
            "--r", repr(cfg["screen_fraction"]),
            "--nugget", repr(cfg["nugget"]),
            "--delta-step", repr(cfg["tuning_step"]),
            "--max-iters", str(cfg["max_iters"]),
            "--rel-tol", repr(cfg["rel_tol"]),
            "--optimizer-tol", repr(cfg["optimizer_tol"]),
            "--out-dir", str(second),
        ])
        assert code == 0
        assert (first / "centers.csv").read_bytes() == (second / "centers.csv").read_bytes()


class TestTune:
    def test_tune_writes_sweep_trace(self, gen_csv, tmp_path):
        out = tmp_path / "tuned"
        code = main(["tune", str(gen_csv), "--n", "5", "--seed", "2",
                     "--out-dir", str(out)])
        assert code == 0
        trace = read_rows(out / "trace.csv")
        assert [row["k"] for row in trace][0] == "0"
        report = json.loads((out / "report.json").read_text())
        assert report["method"] == "dc"
        energies = [float(row["energy"]) for row in trace]
        k_star = report["k_star"]
        assert float(min(energies)) == float(report["energy"])
        assert any(float(row["k"]) == k_star for row in trace)


class TestMetricsCommand:
    def test_identical_files_zero(self, gen_csv, capsys):
        code = main(["metrics", str(gen_csv), str(gen_csv)])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["energy"] == 0.0
        assert payload["cramer"] == 0.0
        assert payload["rows_left"] == payload["rows_right"] == 60

    def test_column_subset(self, gen_csv, capsys):
        code = main(["metrics", str(gen_csv), str(gen_csv), "--columns", "x1"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["columns"] == ["x1"]


class TestCompare:
    def test_three_methods_one_seed(self, gen_csv, tmp_path, capsys):
        out = tmp_path / "cmp"
        code = main(["compare", str(gen_csv), "--n", "5", "--methods",
                     "kmeans,dc,subsample", "--seeds", "3", "--out-dir", str(out)])
        assert code == 0
        rows = read_rows(out / "compare.csv")
        assert [r["method"] for r in rows] == ["dc", "kmeans", "subsample"]
        for row in rows:
            assert np.isfinite(float(row["energy"]))
            assert np.isfinite(float(row["cramer"]))
            assert float(row["elapsed"]) >= 0.0
        dc_row = rows[0]
        assert dc_row["k_star"] != ""
        assert rows[1]["k_star"] == ""

    def test_deterministic_modulo_elapsed(self, gen_csv, tmp_path):
        snapshots = []
        for name in ("c1", "c2"):
            out = tmp_path / name
            code = main(["compare", str(gen_csv), "--n", "4", "--methods",
                         "dc,kmeans", "--seeds", "0,1", "--out-dir", str(out)])
            assert code == 0
            rows = read_rows(out / "compare.csv")
            snapshots.append(
                [{k: v for k, v in row.items() if k != "elapsed"} for row in rows]
            )
        assert snapshots[0] == snapshots[1]

    def test_rows_sorted_by_method_then_seed(self, gen_csv, tmp_path):
        out = tmp_path / "sorted"
        code = main(["compare", str(gen_csv), "--n", "3", "--methods",
                     "subsample,kmeans", "--seeds", "5,1", "--out-dir", str(out)])
        assert code == 0
        rows = read_rows(out / "compare.csv")
        keys = [(r["method"], int(r["seed"])) for r in rows]
        assert keys == sorted(keys)

    def test_unknown_method_errors(self, gen_csv, tmp_path, capsys):
        code = main(["compare", str(gen_csv), "--n", "3", "--methods", "pam",
                     "--seeds", "0", "--out-dir", str(tmp_path / "x")])
        assert code == 1
        assert "unknown method" in capsys.readouterr().err


class TestMessyRealWorldCsv:
    """Weather-log style file: string columns, gaps, unit mix."""

    @pytest.fixture
    def weather_csv(self, tmp_path):
        rng = np.random.default_rng(0)
        rows = ["date,location,wind,humidity,pressure,temp_min,notes"]
        for i in range(120):
            wind = f"{rng.uniform(0, 30):.1f}" if i % 11 else "NA"
            hum = f"{rng.uniform(20, 100):.0f}" if i % 17 else ""
            rows.append(
                f"2016-01-{i % 28 + 1:02d},Station{i % 3},{wind},{hum},"
                f"{rng.uniform(990, 1035):.1f},{rng.uniform(-2, 18):.1f},cloudy"
            )
        path = tmp_path / "weather.csv"
        path.write_text("\n".join(rows) + "\n")
        return path

    def test_cluster_on_selected_columns(self, weather_csv, tmp_path):
        out = tmp_path / "bundle"
        code = main([
            "cluster", str(weather_csv),
            "--columns", "wind,humidity,pressure,temp_min",
            "--standardize", "--method", "dc", "--n", "8", "--seed", "0",
            "--out-dir", str(out),
        ])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["dropped_rows"] > 0
        assert report["effective_rows"] + report["dropped_rows"] == 120
        assert report["columns"] == ["wind", "humidity", "pressure", "temp_min"]
        header = (out / "centers.csv").read_text().splitlines()[0]
        assert header == "wind,humidity,pressure,temp_min"

    def test_all_columns_unusable_without_selection(self, weather_csv):
        # the date/location/notes columns never parse, so full-width
        # selection drops every row
        with pytest.raises(ValueError, match="no usable rows"):
            load_csv(IngestSpec(str(weather_csv)))


class TestModuleEntryPoint:
    def test_python_dash_m(self, tmp_path):
        out = tmp_path / "m.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "distclust", "gen", "--family", "normal",
             "--rows", "5", "--dim", "1", "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert out.exists()


class TestSeventeenDigitRoundTrip:
    def test_centers_roundtrip_losslessly(self, gen_csv, tmp_path):
        out = tmp_path / "rt"
        assert main(["cluster", str(gen_csv), "--method", "kmeans", "--n", "5",
                     "--seed", "4", "--out-dir", str(out)]) == 0
        from distclust import DataMatrix, SolverConfig, kmeans
        res = load_csv(IngestSpec(str(gen_csv)))
        cs, _, _ = kmeans(res.data, 5, SolverConfig(seed=4))
        parsed = np.array(
            [[float(v) for v in row.values()] for row in read_rows(out / "centers.csv")]
        )
        assert np.array_equal(parsed, cs.centers)
