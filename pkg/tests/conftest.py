import numpy as np
import pytest
from hypothesis import settings

from rikit.grid import DEFAULT_GRID
from rikit.scenarios import fn

settings.register_profile("rikit", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("rikit")


@pytest.fixture(scope="session")
def grid():
    return DEFAULT_GRID


@pytest.fixture(scope="session")
def cat():
    """Validated catalog member by name (shared transform caches)."""
    return fn


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
