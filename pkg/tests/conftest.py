import pytest

from spincav.fock import FockDims
from spincav.params import PhysicalParams, model_from_kappa

# published device, evaluated once with mpmath from the raw formulas
DEVICE_KAPPA = 243051.8151
DEVICE_FIZEAU = 4925160.006
DEVICE_KERR = 4861636.216
DEVICE_FLUX = 1560.576137
DEVICE_EPS = 19475.64794
DEVICE_EPS_OVER_KAPPA = 0.08012961323


@pytest.fixture
def device():
    return PhysicalParams()


@pytest.fixture
def dims():
    return FockDims(4, 4)


@pytest.fixture
def optimum_cw():
    return model_from_kappa(20.0, 20.0, 20.0, DEVICE_EPS_OVER_KAPPA, "cw")


@pytest.fixture
def optimum_ccw():
    return model_from_kappa(-20.0, 20.0, 20.0, DEVICE_EPS_OVER_KAPPA, "ccw")
