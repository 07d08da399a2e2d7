import math

import pytest

from orthocat.core import build_grid, gaussian_truncated, square_well, table_potential

NU_UNIT_DENSITY = math.pi**2


@pytest.fixture(scope="session")
def well_attractive():
    return square_well(-0.5, 1.0)


@pytest.fixture(scope="session")
def well_repulsive():
    return square_well(0.5, 1.0)


@pytest.fixture(scope="session")
def well_weak():
    return square_well(0.1, 1.0)


@pytest.fixture(scope="session")
def gauss_bump():
    return gaussian_truncated(0.3, 0.5, 1.5)


@pytest.fixture(scope="session")
def table_mixed():
    # sign-changing piecewise-linear potential
    return table_potential([-1.0, -0.5, 0.0, 0.5, 1.0], [0.0, 0.3, -0.2, 0.3, 0.0])


def grid_for(L, nu=NU_UNIT_DENSITY, a=1.0, npw=16):
    return build_grid(L, math.sqrt(nu), support=(-a, a), nodes_per_wavelength=npw)


@pytest.fixture(scope="session")
def grid_L1():
    return build_grid(1.0, math.pi / 2.0, support=(-1.0, 1.0))
