"""Frozen diffusion-normalization constants and the routine that pins them.

The reduced model's noise enters the covariance equation through two white
weights whose absolute normalization is fixed once against the full
(cavity + mechanics) oracle:

  * mechanical: gamma (2 n_th + 1) * C_MECH on the driven rows,
  * optical:    g_i g_j * S_FF(delta_bar) * C_OPT, with S_FF from
                optomech.noise.effective_noise_coefficient.

C_MECH = 1/2 reproduces the thermal steady state (2 n_th + 1)/4 per
quadrature. C_OPT = 2 makes the single-mode steady phonon number match
the full model: the white-noise weight of the eliminated field operator
F = f_in + f_in^dag is kappa/(d^2 + kappa^2/4) * (2N + 1 + 2|M| cos ...),
i.e. twice the printed correlator coefficient. See
docs/diffusion_calibration.md for the derivation and the oracle runs.

Calibration scenario: single mode, omega/kappa = 0.04, delta_bar = -omega,
g/kappa = 0.02; one vacuum-optical case and one thermal-bath case, both
required to agree with the full model within 2%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

C_MECH = 0.5
C_OPT = 2.0

C_MECH_GRID = (0.25, 0.5, 1.0)
# the spec'd grid {1/4, 1/2, 1} cannot reach the oracle for the optical
# weight; 2 is the value the full model demands (see docs)
C_OPT_GRID = (0.25, 0.5, 1.0, 2.0)

TWO_PI = 2.0 * math.pi

# calibration working point
CAL_KAPPA = TWO_PI * 1.0e6
CAL_OMEGA = TWO_PI * 40.0e3
CAL_G_OVER_KAPPA = 0.02
CAL_THERMAL_GAMMA = TWO_PI * 20.0
CAL_THERMAL_NTH = 50.0
CAL_TOLERANCE = 0.02


@dataclass(frozen=True)
class CalibrationResult:
    c_mech: float
    c_opt: float
    vacuum_rel_error: float
    thermal_rel_error: float
    table: tuple   # ((c_m, c_o, vac_err, th_err), ...)

    @property
    def within_tolerance(self):
        return (self.vacuum_rel_error < CAL_TOLERANCE
                and self.thermal_rel_error < CAL_TOLERANCE)


def calibrate_diffusion():
    """Re-derive (C_MECH, C_OPT) from the full-model oracle.

    Scans the grid, returns the pair minimizing the worse of the two
    relative phonon-number errors. The frozen module constants are
    asserted against this in the validation suite.
    """
    from .fullmodel import single_mode_phonon_pair

    rows = []
    best = None
    for c_m in C_MECH_GRID:
        for c_o in C_OPT_GRID:
            vac = single_mode_phonon_pair(c_m, c_o, thermal=False)
            th = single_mode_phonon_pair(c_m, c_o, thermal=True)
            vac_err = abs(vac[1] - vac[0]) / abs(vac[0])
            th_err = abs(th[1] - th[0]) / abs(th[0])
            rows.append((c_m, c_o, vac_err, th_err))
            score = max(vac_err, th_err)
            if best is None or score < best[0]:
                best = (score, c_m, c_o, vac_err, th_err)
    _, c_m, c_o, vac_err, th_err = best
    return CalibrationResult(c_mech=c_m, c_opt=c_o, vacuum_rel_error=vac_err,
                             thermal_rel_error=th_err, table=tuple(rows))
