import numpy as np
import pytest
from hypothesis import settings

from darkstate.model import SystemParams
from darkstate.pulses import TimeGrid, make_sech

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def params4():
    """gamma T = 4, g sqrt(N) T = 20: the matched sech reference system."""
    return SystemParams.from_dimensionless(4.0, 20.0)


@pytest.fixture(scope="session")
def grid():
    return TimeGrid.default()


@pytest.fixture(scope="session")
def sech(grid):
    return make_sech(grid)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
