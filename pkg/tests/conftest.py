import numpy as np
import pytest

from fracmont.corpus import lookup_function, lookup_weight

UNIT = (0.0, 1.0)
ALPHAS = (1.0, 1.25, 1.5, 2.0, 3.0)


def x_grid(a, b):
    h = b - a
    return [a + r * h for r in (0.1, 0.25, 0.5, 0.75, 0.9)]


def rel_close(u, v, rtol=1e-10, floor=1e-13):
    """Relative agreement with an absolute floor for values that are exactly zero."""
    return abs(u - v) <= rtol * max(abs(u), abs(v)) + floor


@pytest.fixture
def uniform():
    return lookup_weight("uniform", UNIT)


@pytest.fixture
def square():
    return lookup_function("poly:0,0,1", UNIT)


@pytest.fixture
def identity_fn():
    return lookup_function("poly:0,1", UNIT)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
