import math

import numpy as np
import pytest

from tvcap.extract import HARVESTING_PERIOD, harvesting_capacitance, harvesting_profile
from tvcap.oneport import OnePortModel

# Supplied energy of the six-term profile over one cycle of C = 2 + sin(t/2),
# Q(0) = 0.  Independent oracle: scipy.integrate.quad (adaptive Gauss-Kronrod)
# of V*I with the charge taken from the analytic antiderivative of I; the
# 1/2 dC/dt V^2 form of the integrand gives the same value to 2e-15.
HARVEST_ENERGY = -8.857699156482326
# The same value per unit time (divided by the 4 pi period) [W].
HARVEST_MEAN_POWER = -0.704873302587537


@pytest.fixture
def cap():
    return harvesting_capacitance()


@pytest.fixture
def profile():
    return harvesting_profile()


@pytest.fixture
def period():
    return HARVESTING_PERIOD


@pytest.fixture
def harvest_model(cap):
    return OnePortModel(cap, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20221018)


def periodic_dt(n=4096):
    return HARVESTING_PERIOD / n


