import math

import numpy as np
import pytest

from _types.config_types import NumericsConfig
from service.potentials import constant_potential, free_potential, mathieu_potential

PERIOD = (0.0, 2.0 * math.pi)
SYMMETRIC = (-math.pi, math.pi)


def free_eigenvalues(theta: float, count: int) -> np.ndarray:
    """Lowest (k + theta / 2 pi)^2 of the free operator on a 2 pi interval"""
    shift = theta / (2.0 * math.pi)
    return np.sort([(k + shift) ** 2 for k in range(-count, count + 1)])[:count]


@pytest.fixture
def numerics():
    return NumericsConfig()


@pytest.fixture
def free():
    return free_potential(1, PERIOD)


@pytest.fixture
def free2():
    return free_potential(2, PERIOD)


@pytest.fixture
def mathieu():
    return mathieu_potential(2.0, 1, PERIOD)


@pytest.fixture
def well():
    """V = -5 on [-pi, pi]"""
    return constant_potential([[-5.0]], SYMMETRIC)
