"""
Test configuration and fixtures.
"""

import math

import numpy as np
import pytest

from src.physics.model import (
    AtomicParams,
    CavityParams,
    MechanicalParams,
    SensorParams,
    SqueezingParams,
)

TWO_PI = 2.0 * math.pi

# published parameter set, angular units
OMEGA_M = TWO_PI * 3.0e5
GAMMA_M = TWO_PI * 0.03
KAPPA = TWO_PI * 1.0e6
G0 = TWO_PI * 300.0
WAVELENGTH = 780e-9
LASER_POWER = 24e-6


def make_published_params(**cavity_updates) -> SensorParams:
    cavity = dict(kappa=KAPPA, g0=G0, laser_wavelength=WAVELENGTH, laser_power=LASER_POWER)
    cavity.update(cavity_updates)
    return SensorParams(
        mechanical=MechanicalParams(omega_m=OMEGA_M, gamma_m=GAMMA_M),
        cavity=CavityParams(**cavity),
    )


@pytest.fixture
def mechanical() -> MechanicalParams:
    """Mechanical oscillator of the published parameter set at T = 0."""
    return MechanicalParams(omega_m=OMEGA_M, gamma_m=GAMMA_M)


@pytest.fixture
def published_params() -> SensorParams:
    """Unresolved parameters: g follows from the laser power, atoms locked to the mechanics."""
    return make_published_params()


@pytest.fixture(scope="session")
def resolved_params() -> SensorParams:
    """Published parameters with g, G, Gamma and omega_s explicit (perfect matching)."""
    return make_published_params().resolved()


@pytest.fixture
def no_atoms(resolved_params) -> SensorParams:
    return resolved_params.without_atoms()


@pytest.fixture
def low_q_params() -> SensorParams:
    """Small dimensionless sensor without atoms, handy for optimization checks."""
    return SensorParams(
        mechanical=MechanicalParams(omega_m=1.0, gamma_m=1e-3),
        cavity=CavityParams(kappa=100.0),
        atomic=AtomicParams(coupling_G=0.0),
        coupling_g=1.0,
    )


@pytest.fixture
def vacuum() -> SqueezingParams:
    return SqueezingParams.vacuum()


@pytest.fixture
def squeezed() -> SqueezingParams:
    """Pure squeezing with N = 10 at phase 0."""
    return SqueezingParams.pure(10.0, 0.0)


@pytest.fixture
def resonance_grid() -> np.ndarray:
    """200 frequencies across omega_m +- 10%."""
    return np.linspace(0.9, 1.1, 200) * OMEGA_M


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
