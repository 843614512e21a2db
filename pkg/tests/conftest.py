import numpy as np
import pytest
from hypothesis import strategies as st

from ar1info import ModelParams

PARAMS_A = ModelParams(0.5, 0.0, 1.0, 1.0, 0.0)


@pytest.fixture
def params_a():
    return PARAMS_A


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@st.composite
def model_params(draw, max_delta=0.99):
    rho = draw(st.floats(0.01, 0.99))
    sigma0_sq = draw(st.floats(0.0, 10.0))
    sigma_sq = draw(st.floats(0.05, 10.0))
    c = draw(st.floats(0.01, 50.0))
    delta = draw(st.floats(0.0, max_delta))
    return ModelParams(rho, sigma0_sq, sigma_sq, c, delta)
