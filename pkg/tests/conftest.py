import numpy as np
import pytest

from pvtcell.params import DEFAULTS


@pytest.fixture(scope="session")
def link():
    """Default link at a 10 dB threshold."""
    return DEFAULTS.link()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
