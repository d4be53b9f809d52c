"""Linearized cavity + mechanics model without adiabatic elimination.

This is the oracle the reduced model is calibrated and validated against.
Basis ordering (x_c, p_c, X_1, P_1, ...), all in the laser frame, with
cavity quadratures at vacuum variance 1/4 for vacuum input. Mechanical
damping acts on the momentum-like combination, as the -(gamma/2)(b-b^dag)
term dictates (see docs/conventions.md):

    dx_c/dt = -(kappa/2) x_c - delta p_c + sqrt(kappa) x_in
    dp_c/dt = delta x_c - (kappa/2) p_c + 2 sum_j g_j X_j + sqrt(kappa) p_in
    dX_j/dt = omega_j P_j                       - xi_P,j
    dP_j/dt = -omega_j X_j - gamma_j P_j + 2 g_j x_c + xi_X,j
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import calibration
from .backaction import self_consistent_frequencies
from .dynamics import (DriftDiffusion, build_diffusion, build_drift,
                       sample_covariance, steady_state_covariance)
from .errors import ValidationError
from .gaussian import GaussianState, join_states
from .model import CouplingKind, SystemConfig, bare_photon_number
from .noise import NoiseModel


@dataclass
class FullDriftDiffusion:
    M_full: np.ndarray
    D_full: np.ndarray
    g: tuple
    delta_bar: float

    def as_drift_diffusion(self):
        return DriftDiffusion(M=self.M_full, D=self.D_full,
                              metadata={"model": "full", "delta_bar": self.delta_bar})


def build_full(system: SystemConfig, delta_bar, noise: NoiseModel) -> FullDriftDiffusion:
    """Drift and diffusion of the linearized cavity+mechanics system.

    Squeezed input enters through the cavity diffusion block
    (kappa/4) [[2N+1+2|M|cos 2th_s, -2|M|sin 2th_s], [., 2N+1-2|M|cos 2th_s]].
    """
    if system.coupling_kind is not CouplingKind.LINEAR:
        raise ValidationError("the full linearized oracle covers linear coupling only",
                              field="coupling_kind")
    kappa = system.cavity.kappa
    if system.couplings_amplified:
        g = [m.coupling for m in system.modes]
    else:
        g = system.amplified_couplings(bare_photon_number(system.cavity, delta_bar))
    n = system.n_modes
    dim = 2 + 2 * n
    M = np.zeros((dim, dim))
    D = np.zeros((dim, dim))

    M[0, 0] = -kappa / 2.0
    M[0, 1] = -delta_bar
    M[1, 0] = delta_bar
    M[1, 1] = -kappa / 2.0
    mag = math.sqrt(noise.N * (noise.N + 1.0))
    c2 = math.cos(2.0 * noise.theta_s)
    s2 = math.sin(2.0 * noise.theta_s)
    D[0, 0] = kappa / 4.0 * (2.0 * noise.N + 1.0 + 2.0 * mag * c2)
    D[1, 1] = kappa / 4.0 * (2.0 * noise.N + 1.0 - 2.0 * mag * c2)
    D[0, 1] = D[1, 0] = -kappa / 2.0 * mag * s2

    for j, mode in enumerate(system.modes):
        iX, iP = 2 + 2 * j, 3 + 2 * j
        M[1, iX] += 2.0 * g[j]
        M[iX, iP] = mode.omega
        M[iP, iX] = -mode.omega
        M[iP, iP] = -mode.gamma
        M[iP, 0] = 2.0 * g[j]
        w = mode.gamma * (2.0 * mode.n_th + 1.0) / 4.0
        D[iX, iX] = w
        D[iP, iP] = w
    return FullDriftDiffusion(M_full=M, D_full=D, g=tuple(g), delta_bar=delta_bar)


def cavity_only_state(kappa, delta_bar, noise: NoiseModel) -> GaussianState:
    """Steady cavity state with the mechanics decoupled (g = 0)."""
    M = np.array([[-kappa / 2.0, -delta_bar], [delta_bar, -kappa / 2.0]])
    mag = math.sqrt(noise.N * (noise.N + 1.0))
    c2, s2 = math.cos(2.0 * noise.theta_s), math.sin(2.0 * noise.theta_s)
    D = kappa / 4.0 * np.array([
        [2.0 * noise.N + 1.0 + 2.0 * mag * c2, -2.0 * mag * s2],
        [-2.0 * mag * s2, 2.0 * noise.N + 1.0 - 2.0 * mag * c2]])
    return steady_state_covariance(DriftDiffusion(M=M, D=D))


def full_phonon_numbers(full: FullDriftDiffusion):
    """Steady phonon number of each mechanical mode from the Lyapunov solve."""
    st = steady_state_covariance(full.as_drift_diffusion())
    return [st.phonon_number(1 + j) for j in range(len(full.g))]


@dataclass
class ErrorReport:
    """Reduced-vs-full deviations for one working point."""

    g_over_kappa: float
    max_entry_deviation: float
    final_entry_deviation: float
    phonon_reduced: list
    phonon_full: list
    phonon_rel_dev: list


def compare_reduced_full(system: SystemConfig, delta_bar, noise: NoiseModel,
                         t_grid, structure="paper_rows",
                         optical_spectrum="carrier") -> ErrorReport:
    """Evolve the reduced and the full model from matched initial states.

    Both models carry the mechanical quadratures in the same (laser-frame)
    basis, so mechanical covariance blocks compare entrywise; deviations
    are reported relative to the vacuum variance scale. Steady phonon
    numbers come from the Lyapunov solves of both models. The full model
    starts with its cavity in the decoupled steady state, which removes
    the kappa^-1 input transient.
    """
    kappa = system.cavity.kappa
    back = self_consistent_frequencies(system, delta_bar, mode="weak")
    gmax = max(abs(g) for g in back.g)
    if gmax / kappa > 0.1 + 1e-12:
        raise ValidationError("comparison defined for weak coupling g/kappa <= 0.1",
                              field="delta_bar")

    n = system.n_modes
    mech0 = join_states(*[GaussianState(np.zeros(2),
                                        (2.0 * system.modes[j].n_th + 1.0) / 4.0 * np.eye(2))
                          for j in range(n)])

    dd_red = DriftDiffusion(
        M=build_drift(system, back, variant="full"),
        D=build_diffusion(system, back, noise, delta_bar, structure=structure,
                          optical_spectrum=optical_spectrum))
    red_states = sample_covariance(dd_red, mech0, t_grid)

    full = build_full(system, delta_bar, noise)
    cav0 = cavity_only_state(kappa, delta_bar, noise)
    full0 = join_states(cav0, mech0)
    full_states = sample_covariance(full.as_drift_diffusion(), full0, t_grid)

    scale = 0.25
    devs = []
    for rs, fs in zip(red_states, full_states):
        mech_block = fs.cov[2:, 2:]
        devs.append(np.max(np.abs(rs.cov - mech_block)) / scale)
    devs = np.asarray(devs)

    ph_red = [steady_state_covariance(dd_red).phonon_number(j) for j in range(n)]
    ph_full = full_phonon_numbers(full)
    rel = [abs(r - f) / max(abs(f), 1e-300) for r, f in zip(ph_red, ph_full)]
    return ErrorReport(
        g_over_kappa=gmax / kappa,
        max_entry_deviation=float(devs.max()),
        final_entry_deviation=float(devs[-1]),
        phonon_reduced=ph_red,
        phonon_full=ph_full,
        phonon_rel_dev=rel,
    )


# ------------------------------------------------------------- calibration

def _calibration_system(gamma, n_th):
    from .model import CavityConfig, MechanicalMode
    kappa = calibration.CAL_KAPPA
    omega = calibration.CAL_OMEGA
    g = calibration.CAL_G_OVER_KAPPA * kappa
    return SystemConfig(
        cavity=CavityConfig(kappa=kappa, delta_c=-omega, eta=0.0),
        modes=(MechanicalMode(omega=omega, gamma=gamma, coupling=g, n_th=n_th),),
        couplings_amplified=True)


def single_mode_phonon_pair(c_mech, c_opt, thermal=False, g_over_kappa=None):
    """(full, reduced) steady phonon numbers at the calibration point."""
    gamma = calibration.CAL_THERMAL_GAMMA if thermal else 0.0
    n_th = calibration.CAL_THERMAL_NTH if thermal else 0.0
    system = _calibration_system(gamma, n_th)
    if g_over_kappa is not None:
        from dataclasses import replace
        mode = replace(system.modes[0], coupling=g_over_kappa * system.cavity.kappa)
        system = replace(system, modes=(mode,))
    delta_bar = -system.modes[0].omega
    full = build_full(system, delta_bar, NoiseModel.vacuum())
    n_full = full_phonon_numbers(full)[0]

    back = self_consistent_frequencies(system, delta_bar, mode="weak")
    dd = DriftDiffusion(
        M=build_drift(system, back, variant="full"),
        D=build_diffusion(system, back, NoiseModel.vacuum(), delta_bar,
                          c_mech=c_mech, c_opt=c_opt))
    n_red = steady_state_covariance(dd).phonon_number(0)
    return n_full, n_red
