import numpy as np
import pytest

from levyspec import GridFunction, make_grid


@pytest.fixture
def small_grid():
    return make_grid(2.0, 0.01)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_function(grid, rng, decay=True):
    vals = rng.standard_normal(grid.n_points)
    if decay:
        vals *= np.exp(-0.5 * grid.x**2)
    return GridFunction(grid, vals)
