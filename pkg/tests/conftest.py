"""Pytest fixtures for quasispin tests."""

import pytest

from quasispin.config import get_settings
from quasispin.physics import Boundary, LatticeSpec, band_projectors


@pytest.fixture(autouse=True)
def clear_settings_cache():
    """Each test sees settings built from its own environment."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def periodic_spec():
    """Small periodic chain with a gap."""
    return LatticeSpec(n_sites=24, hopping=1.0, mass=0.3, mean_onsite=0.0)


@pytest.fixture
def odd_dimer_spec():
    """Periodic chain with an odd number of dimers (N = 2 mod 4)."""
    return LatticeSpec(n_sites=22, hopping=1.0, mass=0.2, mean_onsite=0.1)


@pytest.fixture
def scatter_spec():
    """Open chain used for the fast scattering runs."""
    return LatticeSpec(n_sites=480, hopping=1.0, mass=0.2, boundary=Boundary.OPEN)


@pytest.fixture
def scatter_projectors(scatter_spec):
    """Band projectors of the scattering chain, taken from its periodic twin."""
    return band_projectors(scatter_spec.with_boundary(Boundary.PERIODIC))
