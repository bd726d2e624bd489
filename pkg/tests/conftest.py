import math

import pytest

from gaa_lab.model_core import PotentialParams


@pytest.fixture
def fig1_pot():
    """alpha = -0.5, phi = pi, N = 201"""
    return PotentialParams(delta_over_j=1.0, phi=math.pi, alpha=-0.5, n_sites=201)


@pytest.fixture
def fig2_pot():
    """alpha = 0, phi = 0, N = 51"""
    return PotentialParams(delta_over_j=1.0, phi=0.0, alpha=0.0, n_sites=51)
