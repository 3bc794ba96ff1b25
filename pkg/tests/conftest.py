import math

import pytest

from ionjcm import PhysicalParams


@pytest.fixture(scope="session")
def params():
    """Paper-typical parameters with a cutoff comfortable for means up to ~4."""
    return PhysicalParams(eta=0.1, omega_rabi=2.0 * math.pi * 5e5, g=1.0, fock_cutoff=30)


@pytest.fixture(scope="session")
def small_params():
    return PhysicalParams(eta=0.1, omega_rabi=2.0 * math.pi * 5e5, g=1.0, fock_cutoff=4)
