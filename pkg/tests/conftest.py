import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import lcdirac as lc

settings.register_profile(
    "ci",
    max_examples=100,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def gn():
    return lc.GROSS_NEVEU


@pytest.fixture
def gn_constants(gn):
    return lc.derive_constants(gn)


@pytest.fixture
def thirring():
    return lc.THIRRING


def random_field(rng, grid, scale=1.0, t=0.0):
    n = grid.n_points
    u = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
    v = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
    return lc.SpinorField(grid, t, u, v)
