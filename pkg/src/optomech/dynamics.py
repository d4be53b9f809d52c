"""Reduced drift/diffusion matrices and covariance propagation.

Basis ordering is (X_1, P_1, X_2, P_2, ...). In these quadratures the
reduced model is autonomous even for unmatched effective frequencies: the
oscillatory inter-mode phase factors of the rotating-frame equations are
absorbed exactly by the per-mode rotations on the block diagonal, so the
full drift is

    M = 1/2 [ -G_e1   2 nu1  | -G_c1k  2 O_c1k | ... ]
            [ -2 nu1  -G_e1  | -2 O_c1k -G_c1k | ... ]   (blocks j, k)

and the covariance obeys dV/dt = M V + V M^T + D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, solve_continuous_lyapunov

from . import calibration
from .backaction import BackactionSet
from .errors import (MismatchedFrequencies, StepTooLarge, UnstableDrift,
                     ValidationError)
from .gaussian import GaussianState
from .noise import NoiseModel, effective_noise_coefficient

DRIFT_VARIANTS = ("full", "cold_damping_only", "coherent_only")
DIFFUSION_STRUCTURES = ("paper_rows", "isotropic")
OPTICAL_SPECTRA = ("carrier", "sideband")


@dataclass
class DriftDiffusion:
    """Drift matrix M, diffusion matrix D, and build metadata."""

    M: np.ndarray
    D: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=float)
        self.D = np.asarray(self.D, dtype=float)
        if self.M.shape != self.D.shape or self.M.shape[0] != self.M.shape[1]:
            raise ValidationError("M and D must be square and same shape", field="M")
        if not np.all(np.isfinite(self.M)):
            raise ValidationError("drift matrix must be finite", field="M")
        asym = np.max(np.abs(self.D - self.D.T))
        if asym > 1e-12 * max(1.0, np.max(np.abs(self.D))):
            raise ValidationError("diffusion matrix must be symmetric", field="D")
        self.D = 0.5 * (self.D + self.D.T)
        ev = np.linalg.eigvalsh(self.D)
        if ev.min() < -1e-10 * max(1.0, ev.max()):
            raise ValidationError("diffusion matrix must be PSD", field="D")

    @property
    def n_modes(self):
        return self.M.shape[0] // 2


def _common_nu(back: BackactionSet, matched_nu, nu_tol, variant):
    nus = np.asarray(back.nu)
    if matched_nu is not None:
        return float(matched_nu)
    tol = nu_tol if nu_tol is not None else 1e-6 * nus.mean()
    if nus.max() - nus.min() > tol:
        raise MismatchedFrequencies(
            f"variant '{variant}' assumes matched frequencies; spread "
            f"{nus.max() - nus.min():.3e} exceeds tolerance {tol:.3e} "
            "(pass matched_nu to impose a common frequency)")
    return float(nus.mean())


def build_drift(system, back: BackactionSet, variant="full", matched_nu=None,
                nu_tol=None):
    """Assemble the 2N x 2N drift matrix for a reduced-model variant.

    "full" keeps per-mode frequencies and all radiative and cross terms.
    "cold_damping_only" zeroes the coherent cross-coupling (sideband-center
    physics) and "coherent_only" zeroes all radiative damping, keeping the
    intrinsic gamma_j (wing / state-transfer physics); both assume matched
    frequencies (enforced within nu_tol unless matched_nu is imposed).
    """
    if variant not in DRIFT_VARIANTS:
        raise ValidationError(f"unknown drift variant '{variant}'", field="variant")
    n = back.n_modes
    M = np.zeros((2 * n, 2 * n))

    if variant == "full":
        nus = back.nu
    else:
        nu = _common_nu(back, matched_nu, nu_tol, variant)
        nus = (nu,) * n

    for j in range(n):
        bj = slice(2 * j, 2 * j + 2)
        if variant == "coherent_only":
            ge = system.modes[j].gamma
        else:
            ge = back.gamma_e[j]
        M[bj, bj] = 0.5 * np.array([[-ge, 2.0 * nus[j]], [-2.0 * nus[j], -ge]])
        for k in range(n):
            if k == j:
                continue
            bk = slice(2 * k, 2 * k + 2)
            oc = back.omega_c[j, k]
            gc = back.gamma_c[j, k]
            if variant == "cold_damping_only":
                oc = 0.0
            elif variant == "coherent_only":
                gc = 0.0
            M[bj, bk] = 0.5 * np.array([[-gc, 2.0 * oc], [-2.0 * oc, -gc]])
    return M


def _sideband_weights(back: BackactionSet, noise: NoiseModel):
    """Per-mode sideband-resolved optical noise weights (vacuum/thermal only).

    S_j = (2N+1) (kappa/2) [ 1/((d+nu_j)^2+k^2/4) + 1/((d-nu_j)^2+k^2/4) ];
    reduces to C_OPT * S_FF(carrier) when nu << kappa. The anomalous
    (squeezed) terms pick up sideband-dependent phases that do not survive
    the white-noise reduction outside the Doppler regime, so M != 0 is
    rejected here.
    """
    if not noise.is_vacuum:
        raise ValidationError(
            "sideband optical spectrum supports vacuum input only "
            "(squeezed input is a carrier/Doppler-level model)", field="optical_spectrum")
    d, kap = back.delta_bar, back.kappa
    L = kap * kap / 4.0
    out = []
    for nu in back.nu:
        out.append((2.0 * noise.N + 1.0) * 0.5 * kap
                   * (1.0 / ((d + nu) ** 2 + L) + 1.0 / ((d - nu) ** 2 + L)))
    return out


def build_diffusion(system, back: BackactionSet, noise: NoiseModel, delta_bar,
                    structure="paper_rows", optical_spectrum="carrier",
                    c_mech=None, c_opt=None):
    """Assemble the diffusion matrix for the reduced model.

    Mechanical contribution per mode: gamma_j (2 n_th_j + 1) * C_MECH,
    placed on the (P_j, P_j) entry ("paper_rows") or split evenly between
    (X_j, X_j) and (P_j, P_j) ("isotropic", i.e. gamma (2 n_th + 1)/4 per
    row at the calibrated C_MECH = 1/2).

    Optical contribution: D[P_i, P_j] += g_i g_j S_FF(delta_bar) * C_OPT
    with the carrier-evaluated coefficient (the Doppler-regime model), or,
    with optical_spectrum="sideband", the sideband-resolved weights needed
    for physicality in the resolved-sideband regime (vacuum input only,
    no further normalization constant).
    """
    if structure not in DIFFUSION_STRUCTURES:
        raise ValidationError(f"unknown diffusion structure '{structure}'",
                              field="structure")
    if optical_spectrum not in OPTICAL_SPECTRA:
        raise ValidationError(f"unknown optical spectrum '{optical_spectrum}'",
                              field="optical_spectrum")
    if back.kind.name != "LINEAR":
        raise ValidationError(
            "the reduced Gaussian diffusion applies to linear coupling; use the "
            "fwm module for quadratic minima or a linear-equivalent system "
            "(g -> 4 g^(2) xbar) for quadratic maxima", field="coupling_kind")
    c_mech = calibration.C_MECH if c_mech is None else c_mech
    c_opt = calibration.C_OPT if c_opt is None else c_opt
    n = back.n_modes
    D = np.zeros((2 * n, 2 * n))

    for j, m in enumerate(system.modes):
        w = m.gamma * (2.0 * m.n_th + 1.0) * c_mech
        if structure == "paper_rows":
            D[2 * j + 1, 2 * j + 1] += w
        else:
            D[2 * j, 2 * j] += w / 2.0
            D[2 * j + 1, 2 * j + 1] += w / 2.0

    g = back.g
    if optical_spectrum == "carrier":
        s = effective_noise_coefficient(noise, delta_bar, back.kappa) * c_opt
        weights = [s] * n
    else:
        weights = _sideband_weights(back, noise)
    for i in range(n):
        for j in range(n):
            val = g[i] * g[j] * 0.5 * (weights[i] + weights[j])
            if structure == "paper_rows":
                D[2 * i + 1, 2 * j + 1] += val
            else:
                D[2 * i, 2 * j] += val / 2.0
                D[2 * i + 1, 2 * j + 1] += val / 2.0

    D = 0.5 * (D + D.T)
    ev = np.linalg.eigvalsh(D)
    if ev.min() < -1e-10 * max(1.0, ev.max()):
        raise ValidationError("assembled diffusion matrix not PSD", field="D")
    return D


def assemble(system, back, noise, delta_bar, variant="full", matched_nu=None,
             nu_tol=None, structure="paper_rows", optical_spectrum="carrier"):
    """Drift + diffusion in one DriftDiffusion container."""
    M = build_drift(system, back, variant=variant, matched_nu=matched_nu,
                    nu_tol=nu_tol)
    D = build_diffusion(system, back, noise, delta_bar, structure=structure,
                        optical_spectrum=optical_spectrum)
    meta = {"variant": variant, "structure": structure,
            "optical_spectrum": optical_spectrum,
            "c_mech": calibration.C_MECH, "c_opt": calibration.C_OPT,
            "delta_bar": delta_bar, "matched_nu": matched_nu}
    return DriftDiffusion(M=M, D=D, metadata=meta)


# -------------------------------------------------------------- propagation

def max_stable_dt(M, nu_max=0.0):
    """Upper bound 1 / (50 max(|eig M|, nu_max)) on the RK4 step."""
    rate = max(np.max(np.abs(np.linalg.eigvals(M))), nu_max)
    if rate == 0.0:
        return math.inf
    return 1.0 / (50.0 * rate)


def evolve_covariance(dd: DriftDiffusion, state0: GaussianState, t_grid,
                      nu_max=0.0):
    """Fixed-step RK4 integration of dV/dt = M V + V M^T + D, du/dt = M u.

    t_grid must be strictly increasing and uniformly spaced; the spacing is
    the integration step and must satisfy the 1/(50 max(|eig|, nu_max))
    bound. Symmetry of V is re-enforced after every step. Returns one
    GaussianState per grid point (including t_grid[0]).
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
        raise ValidationError("t_grid must be strictly increasing", field="t_grid")
    steps = np.diff(t)
    dt = steps[0]
    if np.max(np.abs(steps - dt)) > 1e-9 * dt:
        raise ValidationError("t_grid must be uniformly spaced", field="t_grid")
    bound = max_stable_dt(dd.M, nu_max)
    if dt > bound:
        raise StepTooLarge(f"dt={dt:.3e} exceeds bound {bound:.3e}")

    M, D = dd.M, dd.D
    V = state0.cov.copy()
    u = state0.mean.copy()

    def rhs(V):
        return M @ V + V @ M.T + D

    out = [GaussianState(u.copy(), V.copy())]
    Eu = expm(M * dt)        # exact mean propagator per step
    for _ in range(len(steps)):
        k1 = rhs(V)
        k2 = rhs(V + 0.5 * dt * k1)
        k3 = rhs(V + 0.5 * dt * k2)
        k4 = rhs(V + dt * k3)
        V = V + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        V = 0.5 * (V + V.T)
        u = Eu @ u
        out.append(GaussianState(u.copy(), V.copy()))
    return out


def sample_covariance(dd: DriftDiffusion, state0: GaussianState, times):
    """Exact covariance samples V(t) = F V0 F^T + W(t) at arbitrary times.

    Uses the block-exponential identity exp([[M, D], [0, -M^T]] t) whose
    top-right block gives the accumulated noise integral W(t) = G F^T; no
    stability assumption on M is needed. Serves as the dense-output
    independent check on the RK4 integrator.
    """
    M, D = dd.M, dd.D
    dim = M.shape[0]
    A = np.zeros((2 * dim, 2 * dim))
    A[:dim, :dim] = M
    A[:dim, dim:] = D
    A[dim:, dim:] = -M.T
    out = []
    for t in np.asarray(times, dtype=float):
        E = expm(A * t)
        F = E[:dim, :dim]
        W = E[:dim, dim:] @ F.T
        V = F @ state0.cov @ F.T + 0.5 * (W + W.T)
        out.append(GaussianState(F @ state0.mean, 0.5 * (V + V.T)))
    return out


def steady_state_covariance(dd: DriftDiffusion) -> GaussianState:
    """Steady-state Gaussian state from the Lyapunov equation M V + V M^T + D = 0."""
    ev = np.linalg.eigvals(dd.M)
    if ev.real.max() >= 0.0:
        raise UnstableDrift(
            f"drift has eigenvalue with Re = {ev.real.max():.3e} >= 0; no steady state")
    V = solve_continuous_lyapunov(dd.M, -dd.D)
    V = 0.5 * (V + V.T)
    resid = np.linalg.norm(dd.M @ V + V @ dd.M.T + dd.D)
    if resid > 1e-10 * max(np.linalg.norm(dd.D), 1e-300):
        raise UnstableDrift(f"Lyapunov residual {resid:.3e} too large")
    return GaussianState(np.zeros(dd.M.shape[0]), V)


def derotated_states(states, nus, times):
    """Undo each mode's free rotation at frequency nu_j (co-rotating frames)."""
    out = []
    for st, t in zip(states, times):
        out.append(st.rotated([nu * t for nu in nus]))
    return out


def dark_mode_analysis(back: BackactionSet, pair=(0, 1)):
    """Radiative damping matrix of a mode pair with its eigen-decomposition.

    The determinant Gamma_i Gamma_j - Gamma_c,ij Gamma_c,ji vanishes
    identically, so one eigenvector (the dark mode) decouples from the
    cavity; the bright mode damps at Gamma_i + Gamma_j.
    """
    i, j = pair
    mat = np.array([[back.gamma[i], back.gamma_c[i, j]],
                    [back.gamma_c[j, i], back.gamma[j]]])
    evals, evecs = np.linalg.eig(mat)
    order = np.argsort(np.abs(evals))
    evals = evals[order].real
    evecs = evecs[:, order].real
    return {
        "damping_matrix": mat,
        "eigenvalues": evals,
        "dark_mode_vector": evecs[:, 0] / np.linalg.norm(evecs[:, 0]),
        "bright_mode_vector": evecs[:, 1] / np.linalg.norm(evecs[:, 1]),
        "determinant": float(np.linalg.det(mat)),
        "bright_rate": float(evals[1]),
    }
