import numpy as np
import pytest

from moyalosc import model
from moyalosc import gausspoly as gp


@pytest.fixture
def params_d2():
    return model.build_params(2, 1.0, (2.0,))


@pytest.fixture
def params_d4():
    return model.build_params(4, 1.0, (2.0, 2.0))


@pytest.fixture
def params_offdual():
    # away from omega*theta = 2 the metric is a genuine scalar != 1/2
    return model.build_params(2, 0.8, (1.7,))


@pytest.fixture
def rng():
    return np.random.default_rng(20260813)


def random_schwartz(dim, rng, shift_scale=0.4):
    """Random decaying Gaussian symbol with a complex shift."""
    m = rng.standard_normal((dim, dim))
    A = np.eye(dim) + 0.1 * (m + m.T)
    b = shift_scale * (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
    c = rng.standard_normal() + 1j * rng.standard_normal()
    return gp.GaussPoly.gaussian(dim, A, b, coeff=c)


@pytest.fixture
def sample_points():
    return [
        np.zeros(2),
        np.array([0.5, -0.3]),
        np.array([1.2, 0.7]),
        np.array([-0.9, 1.4]),
    ]
