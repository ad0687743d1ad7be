import numpy as np
import pytest

from specquad.desitter import DeSitterParams, assemble_quadruple


@pytest.fixture(scope="session")
def q_standard():
    """The central acceptance quadruple: (rm, theta, nmax) = (1, 0.3, 32)."""
    return assemble_quadruple(DeSitterParams(rm=1.0, theta=0.3, nmax=32))


@pytest.fixture(scope="session")
def q_massless():
    return assemble_quadruple(DeSitterParams(rm=0.0, theta=0.3, nmax=32))


@pytest.fixture(scope="session")
def param_grid():
    """The acceptance parameter grid."""
    return [(rm, theta) for rm in (0.0, 0.5, 1.0, 2.0)
            for theta in (0.0, 0.3, 1.0)]


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
