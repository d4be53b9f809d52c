import numpy as np
import pytest

from optomech.model import (CavityConfig, CouplingKind, MechanicalMode,
                            SystemConfig)

TWO_PI = 2 * np.pi


def make_system(kappa_hz, mode_params, delta_c_hz=0.0, eta_hz=0.0,
                kind=CouplingKind.LINEAR, amplified=True, sign_choice=()):
    """mode_params: list of (omega_hz, gamma_hz, coupling_hz, n_th)."""
    modes = tuple(MechanicalMode(omega=TWO_PI * w, gamma=TWO_PI * g,
                                 coupling=TWO_PI * c, n_th=n)
                  for (w, g, c, n) in mode_params)
    return SystemConfig(
        cavity=CavityConfig(kappa=TWO_PI * kappa_hz, delta_c=TWO_PI * delta_c_hz,
                            eta=TWO_PI * eta_hz),
        modes=modes, coupling_kind=kind, couplings_amplified=amplified,
        sign_choice=sign_choice)


@pytest.fixture
def fig2_system():
    return make_system(1e6, [(20e6, 0.0, 0.3e6, 0.0), (19.95e6, 0.0, 0.12e6, 0.0)])


@pytest.fixture
def fig3_system():
    return make_system(0.95e6, [(20e6, 800.0, 50e3, 0.0),
                                (19.99e6, 800.0, 10e3, 0.0)])


@pytest.fixture
def fig4_system():
    return make_system(1e6, [(100e3, 0.0, 90e3, 0.0), (93e3, 0.0, 50e3, 0.0)])


@pytest.fixture
def fig5_system():
    return make_system(1e6, [(101e3, 0.0, 100e3, 0.0), (100e3, 0.0, 10e3, 0.0)])
