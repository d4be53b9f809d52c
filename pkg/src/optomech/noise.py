"""Input-field noise models and the effective noise coefficient.

An ideal squeezed input is parameterized by the photon-number parameter N
and the squeezing angle theta_s, with anomalous correlator magnitude
|M| = sqrt(N (N+1)). Vacuum is N = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class NoiseModel:
    """Squeezed (or vacuum) input field."""

    N: float = 0.0
    theta_s: float = 0.0

    def __post_init__(self):
        if self.N < 0:
            raise ValidationError("noise N must be >= 0", field="N")

    @classmethod
    def vacuum(cls):
        return cls(N=0.0, theta_s=0.0)

    @classmethod
    def squeezed(cls, N, theta_s=0.0):
        return cls(N=float(N), theta_s=float(theta_s))

    @property
    def is_vacuum(self):
        return self.N == 0.0

    @property
    def M(self) -> complex:
        """Ideal anomalous correlator M = sqrt(N(N+1)) e^{-2i theta_s}."""
        return math.sqrt(self.N * (self.N + 1.0)) * cmath.exp(-2j * self.theta_s)


def cavity_quadrature_angle(delta_bar, kappa):
    """Phase theta_c = arg(i delta_bar + kappa/2) of the cavity response."""
    return cmath.phase(complex(kappa / 2.0, delta_bar))


def effective_noise_coefficient(noise: NoiseModel, delta_bar, kappa):
    """White-noise weight of the adiabatically eliminated field noise.

    S_FF = kappa / (delta_bar^2 + kappa^2/4)
           * (|M| cos 2(theta_s - theta_c) + N + 1/2),

    with theta_c = arg(i delta_bar + kappa/2). This is the coefficient as
    printed with the two-mode noise correlator; the absolute diffusion
    normalization applied on top of it is the calibrated constant C_OPT
    (see optomech.calibration).
    """
    if not kappa > 0:
        raise ValidationError("kappa must be > 0", field="kappa")
    theta_c = cavity_quadrature_angle(delta_bar, kappa)
    mag = math.sqrt(noise.N * (noise.N + 1.0))
    factor = mag * math.cos(2.0 * (noise.theta_s - theta_c)) + noise.N + 0.5
    return kappa / (delta_bar**2 + kappa**2 / 4.0) * factor
