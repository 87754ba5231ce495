"""Agreement between the numba kernels and their numpy fallbacks, and the
environment flag that switches between them."""

import os
import subprocess
import sys

import numpy as np
import pytest

from distclust import _kernels as K

pytestmark = pytest.mark.skipif(
    not K.HAVE_NUMBA, reason="numba unavailable; nothing to compare against"
)

RNG = np.random.default_rng(2024)
POINTS = RNG.standard_normal((157, 3))
CENTERS = RNG.standard_normal((9, 3))
LABELS = K.assign_np(POINTS, CENTERS)[0]


def test_assign_agreement():
    lab_nb, sq_nb = K.assign_nb(POINTS, CENTERS)
    lab_np, sq_np = K.assign_np(POINTS, CENTERS)
    assert np.array_equal(lab_nb, lab_np)
    assert np.allclose(sq_nb, sq_np, rtol=1e-12, atol=1e-14)


def test_log_potential_agreement():
    a = K.log_potential_sum_nb(POINTS, CENTERS[0], 0.01)
    b = K.log_potential_sum_np(POINTS, CENTERS[0], 0.01)
    assert a == pytest.approx(b, rel=1e-12)


def test_log_candidate_objectives_agreement():
    cands = np.ascontiguousarray(POINTS[:12])
    a = K.log_candidate_objectives_nb(POINTS, cands)
    b = K.log_candidate_objectives_np(POINTS, cands)
    assert np.allclose(a, b, rtol=1e-12)


@pytest.mark.parametrize("power", [1.0, 1.5, 2.0, 4.0])
def test_sum_powers_agreement(power):
    guard = 1e-12
    va, ga = K.sum_powers_nb(POINTS, CENTERS[1], power, guard)
    vb, gb = K.sum_powers_np(POINTS, CENTERS[1], power, guard)
    assert va == pytest.approx(vb, rel=1e-12)
    assert np.allclose(ga, gb, rtol=1e-10, atol=1e-12)


def test_sum_powers_all_guarded_gradient_is_zero():
    pts = np.zeros((4, 2))
    center = np.zeros(2)
    for impl in (K.sum_powers_nb, K.sum_powers_np):
        value, grad = impl(pts, center, 1.5, 1e-12)
        assert value == 0.0
        assert np.all(grad == 0.0)


def test_dist_sum_agreement():
    a = K.dist_sum_nb(POINTS, CENTERS)
    b = K.dist_sum_np(POINTS, CENTERS)
    assert a == pytest.approx(b, rel=1e-12)


def test_phi_sum_agreement():
    a = K.phi_sum_nb(POINTS, CENTERS)
    b = K.phi_sum_np(POINTS, CENTERS)
    assert a == pytest.approx(b, rel=1e-12)


def test_weiszfeld_agreement():
    pts = np.ascontiguousarray(POINTS[:25, :2])
    start = pts.mean(axis=0)
    a = K.weiszfeld_nb(pts, start.copy(), 1e-12, 1e-14, 500)
    b = K.weiszfeld_np(pts, start.copy(), 1e-12, 1e-14, 500)
    assert np.allclose(a, b, atol=1e-9)


def test_fit_objective_agreement():
    a = K.log_fit_objective_nb(POINTS, CENTERS, LABELS)
    b = K.log_fit_objective_np(POINTS, CENTERS, LABELS)
    assert a == pytest.approx(b, rel=1e-12)
    for power in (1.0, 2.0, 3.5):
        pa = K.power_fit_objective_nb(POINTS, CENTERS, LABELS, power)
        pb = K.power_fit_objective_np(POINTS, CENTERS, LABELS, power)
        assert pa == pytest.approx(pb, rel=1e-12)


def test_assign_chunking_consistent():
    # more rows than one numpy chunk
    pts = RNG.standard_normal((2 * K._NP_CHUNK + 17, 2))
    ctr = RNG.standard_normal((5, 2))
    lab_np, sq_np = K.assign_np(pts, ctr)
    lab_nb, sq_nb = K.assign_nb(pts, ctr)
    assert np.array_equal(lab_np, lab_nb)
    assert np.allclose(sq_np, sq_nb, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_env_flag_selects_backend(backend):
    env = dict(os.environ, DISTCLUST_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", "import distclust; print(distclust.active_backend())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == backend


def test_env_flag_rejects_garbage():
    env = dict(os.environ, DISTCLUST_BACKEND="fortran")
    out = subprocess.run(
        [sys.executable, "-c", "import distclust"],
        env=env,
        capture_output=True,
        text=True,
    )
    assert out.returncode != 0


def test_solvers_agree_across_backends(tmp_path):
    """End to end: the numpy backend reproduces the numba backend's centers."""
    script = tmp_path / "run.py"
    script.write_text(
        "import numpy as np\n"
        "from distclust import DataMatrix, SolverConfig, kmeans, log_potential_clustering\n"
        "rng = np.random.default_rng(3)\n"
        "x = DataMatrix(rng.standard_normal((400, 2)))\n"
        "cfg = SolverConfig(seed=1)\n"
        "cs, asg, _ = kmeans(x, 6, cfg)\n"
        "cl, asl, _ = log_potential_clustering(x, 6, cfg)\n"
        "np.savez('OUT', km=cs.centers, km_lab=asg.labels, lg=cl.centers, lg_lab=asl.labels)\n"
    )
    results = {}
    for backend in ("numba", "numpy"):
        workdir = tmp_path / backend
        workdir.mkdir()
        env = dict(os.environ, DISTCLUST_BACKEND=backend)
        subprocess.run([sys.executable, str(script)], env=env, cwd=workdir, check=True)
        results[backend] = np.load(workdir / "OUT.npz")
    nb, npy = results["numba"], results["numpy"]
    assert np.allclose(nb["km"], npy["km"], atol=1e-9)
    assert np.array_equal(nb["km_lab"], npy["km_lab"])
    assert np.array_equal(nb["lg"], npy["lg"])  # data rows, exact
    assert np.array_equal(nb["lg_lab"], npy["lg_lab"])
