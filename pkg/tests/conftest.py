import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nlhomog import Grid1D, benchmark_field

settings.register_profile("nlhomog", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("nlhomog")


@pytest.fixture(scope="session")
def bench():
    return benchmark_field()


@pytest.fixture(scope="session")
def grid16():
    """D = (-1, 1) at h = 1/16 with the default exterior band."""
    return Grid1D.uniform(-1.0, 1.0, 1 / 16)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
