"""Two-mode state transfer through the cavity-mediated beam splitter.

At a matched detuning on the wing of the dispersion curves the coherent
cross-coupling dominates and the interaction reduces to the beam-splitter
Hamiltonian Omega_c (b1 b2^dag + b1^dag b2): a full state swap occurs at
t_swap = pi / (2 |Omega_c|) with Omega_c = g1 g2 2 d / (d^2 + kappa^2/4).

Transfer fidelity compares the received single-mode state with the image
of the sender's initial state under the noise-free part of the map (an
orthogonal phase-space rotation: free rotation at nu plus the quarter-turn
the swap itself imprints). With zero noise this fidelity is exactly 1 at
odd multiples of t_swap.

The fidelity of the probabilistic (Uhlmann) convention is F; sqrt(F) is
reported alongside because the literature's quoted transfer numbers follow
the amplitude convention once the diffusion normalization is pinned by the
full-model oracle (see docs/diffusion_calibration.md).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .backaction import self_consistent_frequencies
from .dynamics import DriftDiffusion, build_diffusion, build_drift, sample_covariance
from .errors import UnphysicalState, ValidationError
from .gaussian import GaussianState, join_states
from .matching import Dominant, find_matching_detunings
from .model import SystemConfig
from .noise import NoiseModel, cavity_quadrature_angle

FIDELITY_CONVENTION = "amplitude"


def gaussian_fidelity(s1: GaussianState, s2: GaussianState):
    """Uhlmann fidelity F(rho1, rho2) of two single-mode Gaussian states.

    Closed form for one mode: with sigma = 4 V (vacuum -> identity) and
    dr = 2 (mu1 - mu2),

        F = 2 exp(-dr^T (sigma1+sigma2)^{-1} dr / 2)
            / (sqrt(det(sigma1+sigma2) + L) - sqrt(L)),
        L = (det sigma1 - 1)(det sigma2 - 1).

    Identical states give exactly 1; vacuum vs thermal(n) gives 1/(n+1);
    two coherent states give exp(-|alpha1 - alpha2|^2).
    """
    if s1.n_modes != 1 or s2.n_modes != 1:
        raise ValidationError("gaussian_fidelity is defined for single-mode states")
    for s in (s1, s2):
        if not s.is_physical():
            raise UnphysicalState("fidelity input below the vacuum uncertainty floor")
    sig1 = 4.0 * s1.cov
    sig2 = 4.0 * s2.cov
    delta = 2.0 * (s1.mean - s2.mean)
    total = sig1 + sig2
    lam = (np.linalg.det(sig1) - 1.0) * (np.linalg.det(sig2) - 1.0)
    lam = max(lam, 0.0)
    denom = math.sqrt(np.linalg.det(total) + lam) - math.sqrt(lam)
    expo = math.exp(-0.5 * float(delta @ np.linalg.solve(total, delta)))
    return min(2.0 * expo / denom, 1.0)


@dataclass
class TransferScenario:
    """A matched two-mode system plus noise and initial states.

    omega_c is the beam-splitter rate g1 g2 2 d / (d^2 + kappa^2/4); it is
    checked against the backaction cross-coefficients at the matched point.
    Mechanical damping is zeroed by default (negligible intrinsic
    decoherence on transfer time scales), overridable via keep_gamma.
    """

    system: SystemConfig
    delta_bar: float
    noise: NoiseModel
    initial_mirror: GaussianState
    initial_bec: GaussianState
    keep_gamma: bool = False
    n_swaps: int = 3
    samples_per_swap: int = 40

    nu: float = field(init=False)
    omega_c: float = field(init=False)

    def __post_init__(self):
        if self.system.n_modes != 2:
            raise ValidationError("transfer scenarios are two-mode", field="system")
        if not self.keep_gamma:
            self.system = self.system.with_gammas(0.0)
        back = self_consistent_frequencies(self.system, self.delta_bar, mode="weak")
        if abs(back.nu[0] - back.nu[1]) > 1e-4 * abs(back.nu[0]):
            raise ValidationError("delta_bar is not a matched detuning", field="delta_bar")
        self.nu = 0.5 * (back.nu[0] + back.nu[1])
        kappa = self.system.cavity.kappa
        g1, g2 = back.g
        self.omega_c = g1 * g2 * 2.0 * self.delta_bar / (self.delta_bar**2 + kappa**2 / 4.0)
        oc_back = 0.5 * (back.omega_c[0, 1] + back.omega_c[1, 0])
        if abs(self.omega_c - oc_back) > 2e-2 * abs(oc_back):
            raise ValidationError(
                "beam-splitter rate inconsistent with backaction cross-coefficients "
                f"({self.omega_c:.4e} vs {oc_back:.4e})", field="delta_bar")
        self._back = back

    @property
    def t_swap(self):
        return math.pi / (2.0 * abs(self.omega_c))

    @property
    def theta_c(self):
        return cavity_quadrature_angle(self.delta_bar, self.system.cavity.kappa)


def make_transfer_scenario(system, noise, initial_mirror, initial_bec,
                           delta_range=None, **kwargs) -> TransferScenario:
    """Locate the coherent-dominant matched detuning and build a scenario."""
    points = find_matching_detunings(system, delta_range=delta_range)
    coherent = [p for p in points if p.dominant is Dominant.COHERENT]
    if not coherent:
        raise ValidationError("no coherent-dominant matched detuning in range",
                              field="delta_range")
    best = max(coherent, key=lambda p: abs(p.omega_c) / max(abs(p.gamma_c), 1e-300))
    return TransferScenario(system=system, delta_bar=best.delta_bar, noise=noise,
                            initial_mirror=initial_mirror, initial_bec=initial_bec,
                            **kwargs)


@dataclass
class TransferResult:
    times: np.ndarray
    t_swap: float
    fidelity_to_mirror: np.ndarray       # BEC initial state arriving in mode 1
    fidelity_to_bec: np.ndarray          # mirror initial state arriving in mode 2
    fidelity_amplitude_to_mirror: np.ndarray
    fidelity_amplitude_to_bec: np.ndarray
    variances: np.ndarray                # (t, 4): X1, P1, X2, P2 raw
    variances_corotating: np.ndarray
    states: list

    def at(self, t):
        idx = int(np.argmin(np.abs(self.times - t)))
        return idx


def _scenario_dd(sc: TransferScenario):
    M = build_drift(sc.system, sc._back, variant="coherent_only",
                    matched_nu=sc.nu)
    D = build_diffusion(sc.system, sc._back, sc.noise, sc.delta_bar,
                        structure="paper_rows", optical_spectrum="carrier")
    return DriftDiffusion(M=M, D=D, metadata={"variant": "coherent_only"})


def _polar_orthogonal(block):
    u, _, vt = np.linalg.svd(block)
    return u @ vt


def _received_fidelity(Vt, phi_cross, sender0: GaussianState, recv_slice):
    """Fidelity between the received reduced state and the rotated target."""
    O = _polar_orthogonal(phi_cross)
    target = GaussianState(O @ sender0.mean, O @ sender0.cov @ O.T)
    received = GaussianState(Vt.mean[recv_slice], Vt.cov[recv_slice, recv_slice])
    return gaussian_fidelity(target, received)


def run_transfer(scenario: TransferScenario) -> TransferResult:
    """Propagate the matched two-mode covariance and trace swap fidelities.

    F_to_mirror(t) compares mode 1's state at t against the image of the
    BEC's initial state under the deterministic part of the cross map
    (and symmetrically for F_to_bec). Sample times include every odd
    multiple of t_swap exactly.
    """
    sc = scenario
    dd = _scenario_dd(sc)
    t_swap = sc.t_swap
    n_per = sc.samples_per_swap
    times = np.unique(np.concatenate([
        np.linspace(0.0, 2.0 * sc.n_swaps * t_swap, 2 * sc.n_swaps * n_per + 1),
        [(2 * p + 1) * t_swap for p in range(sc.n_swaps)],
    ]))
    v0 = join_states(sc.initial_mirror, sc.initial_bec)
    states = sample_covariance(dd, v0, times)

    Mfree = dd.M
    f_m, f_b = [], []
    var_raw = np.empty((len(times), 4))
    var_rot = np.empty((len(times), 4))
    for idx, (t, st) in enumerate(zip(times, states)):
        Phi = expm(Mfree * t)
        f_m.append(_received_fidelity(st, Phi[0:2, 2:4], sc.initial_bec, slice(0, 2)))
        f_b.append(_received_fidelity(st, Phi[2:4, 0:2], sc.initial_mirror, slice(2, 4)))
        var_raw[idx] = np.diag(st.cov)
        rot = st.rotated([sc.nu * t, sc.nu * t])
        var_rot[idx] = np.diag(rot.cov)

    f_m = np.asarray(f_m)
    f_b = np.asarray(f_b)
    return TransferResult(
        times=times, t_swap=t_swap,
        fidelity_to_mirror=f_m, fidelity_to_bec=f_b,
        fidelity_amplitude_to_mirror=np.sqrt(f_m),
        fidelity_amplitude_to_bec=np.sqrt(f_b),
        variances=var_raw, variances_corotating=var_rot, states=states)


def swap_fidelities(result: TransferResult):
    """Fidelity (both conventions) at each odd multiple of t_swap."""
    out = []
    for p in range(int(round(result.times[-1] / result.t_swap / 2 + 0.25))):
        t = (2 * p + 1) * result.t_swap
        if t > result.times[-1] + 1e-12:
            break
        idx = result.at(t)
        out.append((t, result.fidelity_to_mirror[idx],
                    result.fidelity_amplitude_to_mirror[idx]))
    return out


@dataclass
class PhaseSweepResult:
    N_values: list
    phase_grid: np.ndarray
    fidelity: np.ndarray            # (len(N_values), len(phase_grid)), probability
    fidelity_amplitude: np.ndarray
    peak_phase: list
    peak_value: list                # in the convention of FIDELITY_CONVENTION


def sweep_phase(scenario: TransferScenario, N_values, phase_grid=None,
                threads=1) -> PhaseSweepResult:
    """Swap-time fidelity over squeezing strength and phase difference.

    The phase axis is theta_s - theta_c. Vacuum (N = 0) rows are exactly
    flat. Peak values are reported in the package's documented transfer
    convention (amplitude).
    """
    if phase_grid is None:
        phase_grid = np.linspace(-math.pi, math.pi, 81)
    phase_grid = np.asarray(phase_grid, dtype=float)
    sc = scenario
    theta_c = sc.theta_c

    def one(N, phase):
        noise = NoiseModel.vacuum() if N == 0 else NoiseModel.squeezed(N, theta_c + phase)
        sub = TransferScenario(
            system=sc.system, delta_bar=sc.delta_bar, noise=noise,
            initial_mirror=sc.initial_mirror, initial_bec=sc.initial_bec,
            keep_gamma=True,  # gammas already zeroed by the parent scenario
            n_swaps=1, samples_per_swap=2)
        dd = _scenario_dd(sub)
        t = sub.t_swap
        st = sample_covariance(dd, join_states(sc.initial_mirror, sc.initial_bec), [t])[0]
        Phi = expm(dd.M * t)
        return _received_fidelity(st, Phi[0:2, 2:4], sc.initial_bec, slice(0, 2))

    tasks = [(N, ph) for N in N_values for ph in phase_grid]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flat = list(pool.map(lambda a: one(*a), tasks))
    else:
        flat = [one(*a) for a in tasks]
    F = np.asarray(flat).reshape(len(N_values), len(phase_grid))

    peak_phase, peak_value = [], []
    amp = np.sqrt(F)
    table = amp if FIDELITY_CONVENTION == "amplitude" else F
    for row_amp, row in zip(table, F):
        k = int(np.argmax(row))
        peak_phase.append(float(phase_grid[k]))
        peak_value.append(float(row_amp[k]))
    return PhaseSweepResult(N_values=list(N_values), phase_grid=phase_grid,
                            fidelity=F, fidelity_amplitude=amp,
                            peak_phase=peak_phase, peak_value=peak_value)
