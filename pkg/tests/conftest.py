import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_nodes(rng, n, lo=-1.0, hi=1.0, min_gap=1e-6):
    """Strictly increasing random nodes with a minimum relative gap."""
    while True:
        x = np.sort(rng.uniform(lo, hi, n))
        if np.all(np.diff(x) > min_gap * (hi - lo)):
            return x
