import numpy as np
import pytest

from scarfinder.operators import H1Params, H2Params


@pytest.fixture
def rng():
    return np.random.default_rng(11)


@pytest.fixture
def h1_small():
    """Clean 4-site ring (no disorder): smallest valid scarred model."""
    return H1Params.draw(4, -2.5, 0.0, 0)


@pytest.fixture
def h1_disordered():
    """6-site disordered ring, the workhorse for dense comparisons."""
    return H1Params.draw(6, -2.5, 0.5, 2)


@pytest.fixture
def h2_small():
    return H2Params(6, 1.0, 0.1, 1.0)
