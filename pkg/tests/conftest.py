import math

import pytest

from bjjsim.lattice import LatticeShape, ModelParams

OMEGA = math.pi / 30  # pi / (2 L), L = 15 cm
T_SPLIT = math.pi / (2 * OMEGA)


@pytest.fixture
def omega():
    return OMEGA


@pytest.fixture
def square():
    return LatticeShape(6, 6)


@pytest.fixture
def free_params():
    return ModelParams.isospecific(OMEGA)
