"""
Shared fixtures: small sampled functions with known behaviour.
"""

import numpy as np
import pytest

from epsicomp.service.function_model import SampledFunction, normalize
from epsicomp.service.generators import generate
from epsimeta.generators import Weierstrass


@pytest.fixture
def square():
    """
    x(t) = t^2 on 101 nodes, already normalized.
    """
    return normalize(SampledFunction.from_series(np.linspace(0.0, 1.0, 101) ** 2))


@pytest.fixture
def line():
    return normalize(SampledFunction.from_series(np.linspace(0.0, 1.0, 101)))


@pytest.fixture(scope="session")
def weierstrass():
    return normalize(generate(Weierstrass(n_points=1025)))
