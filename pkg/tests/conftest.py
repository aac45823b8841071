import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mps_orf.measure import CircleMeasure, measure_from_schur, CircleGrid
from mps_orf.schur import ScaledIdentity

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def disk_points(r_max=0.95):
    """Hypothesis strategy for complex points with |z| <= r_max."""
    return st.builds(lambda r, th: r_max * np.sqrt(r) * np.exp(2j * np.pi * th),
                     st.floats(0.0, 1.0), st.floats(0.0, 1.0))


def circle_points():
    return st.floats(0.0, 2 * np.pi).map(lambda th: complex(np.cos(th), np.sin(th)))


@pytest.fixture(scope="session")
def half_z():
    return ScaledIdentity(0.5)


@pytest.fixture(scope="session")
def mu_half_z(half_z):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return measure_from_schur(half_z, CircleGrid(4096))


@pytest.fixture(scope="session")
def lebesgue():
    return CircleMeasure.lebesgue(1024)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
