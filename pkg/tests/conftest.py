import pytest

from distclust import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Trigger (or load) JIT compilation once so timed tests measure compute.
    _kernels.warmup()
