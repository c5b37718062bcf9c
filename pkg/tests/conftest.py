import numpy as np
import pytest

from ism2d import Constants, make_grid, sample


def sup(a):
    return float(np.abs(np.asarray(a)).max())


@pytest.fixture
def unit_grid():
    return make_grid(33, 33, 1.0, 1.0)


@pytest.fixture
def coarse_grid():
    return make_grid(17, 17, 1.0, 1.0)


def grid_at(n, Lx=1.0, Lz=1.0):
    return make_grid(n, n, Lx, Lz)


def sinsin(grid, kx=1, kz=1):
    return sample(grid, lambda x, z: np.sin(kx * np.pi * x / grid.Lx)
                  * np.sin(kz * np.pi * z / grid.Lz))


def observed_orders(errors):
    """log2 ratio of successive errors under mesh halving."""
    return [float(np.log2(errors[i] / errors[i + 1]))
            for i in range(len(errors) - 1)]


NORMALIZED = Constants()
