import numpy as np
import pytest

from latnet import Network, load_dataset


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def zachary():
    return load_dataset("zachary")


@pytest.fixture(scope="session")
def florentine():
    return load_dataset("florentine")


@pytest.fixture(scope="session")
def village():
    return load_dataset("village")


def random_network(n, p, seed):
    r = np.random.default_rng(seed)
    a = np.triu((r.random((n, n)) < p).astype(float), 1)
    return Network(a + a.T)
