import numpy as np
import pytest

from patchswd import textures


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def blob_texture():
    return textures.blobs(64, 64, seed=1)


@pytest.fixture(scope="session")
def small_texture():
    return textures.blobs(32, 32, seed=2)


def central_difference(fn, y, h=1e-4):
    """Central finite-difference gradient of scalar ``fn`` at ``y``."""
    grad = np.zeros_like(y)
    for i in range(y.size):
        yp = y.copy()
        ym = y.copy()
        yp.flat[i] += h
        ym.flat[i] -= h
        grad.flat[i] = (fn(yp) - fn(ym)) / (2 * h)
    return grad
