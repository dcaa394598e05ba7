import math

import numpy as np
import pytest

from irs_lab.modules.hyperbolic.isometry import Isometry


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale runs (deselect with -m 'not slow')")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_isometry(rng: np.random.Generator, scale: float = 1.5) -> Isometry:
    """A random element of PSL(2,R) with entries of moderate size."""
    while True:
        m = rng.normal(scale=scale, size=(2, 2))
        det = np.linalg.det(m)
        if abs(det) > 0.1:
            if det < 0:
                m[0] = -m[0]
            return Isometry.from_matrix(m)


def random_hyperbolic(rng: np.random.Generator) -> Isometry:
    while True:
        g = random_isometry(rng)
        if abs(g.trace) > 2.2:
            return g


@pytest.fixture
def two_pi():
    return 2.0 * math.pi
