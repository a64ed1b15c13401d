import pytest

from delay_wave_lab import Grid, builtin_data, internal_friction, kelvin_voigt


@pytest.fixture
def ref_grid():
    return Grid(nx=20, nrho=20)


@pytest.fixture
def ref_params():
    """Reference internal-friction setup: a=1, mu=1, tau=2, xi=2*mu*tau, shifted."""
    return internal_friction(a=1.0, mu=1.0, tau=2.0)


@pytest.fixture
def kv_params():
    return kelvin_voigt(a=1.0, mu=0.5, tau=2.0)


@pytest.fixture
def ref_data():
    return builtin_data("paper")
