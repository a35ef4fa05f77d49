import numpy as np
import pytest

from homothetic import cdf, elastic, ideal
from homothetic.glue import double_and_close, to_centred


@pytest.fixture(scope="session")
def cdf_34():
    eps, arc = cdf.cdf_solve_epsilon(3, 4)
    return eps, arc


@pytest.fixture(scope="session")
def ef_17():
    return elastic.ef_solve_epsilon(1, 7)


@pytest.fixture(scope="session")
def ideal_2627():
    return ideal.ideal_solve_epsilon(26, 27)


@pytest.fixture(scope="session")
def cdf_34_profile(cdf_34):
    curve = to_centred(cdf_34[1])
    return curve, double_and_close(curve, 3, 4)


@pytest.fixture(scope="session")
def ef_17_profile(ef_17):
    curve = to_centred(ef_17[1])
    return curve, double_and_close(curve, 1, 7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
