import math

import numpy as np
import pytest

from lowinertia.model import PendulumParams


@pytest.fixture(scope="session")
def base_params():
    """beta = 0.5, tau = 0.5, zeta 1 -> 1.5."""
    return PendulumParams.from_torque(0.5, 1.0, 1.5, 0.5)


@pytest.fixture(scope="session")
def swing_params():
    """Large swing from delta_I = pi/3 with beta = 0.5, zeta 1 -> 1.5."""
    return PendulumParams.from_initial_angle(0.5, 1.0, 1.5, math.pi / 3)


@pytest.fixture(scope="session")
def t50():
    return np.linspace(0.0, 50.0, 2001)
