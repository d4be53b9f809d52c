"""Semiclassical trajectories for the quadratic local-minima dynamics.

The c-number version of the effective mode equations at field minima,

    db_j/dt = [i Omega_j - gamma_j/2] b_j
              - (i/2) sum_k g_jk Lambda_k |b_k|^2 b_j
              - (1/2) sum_k g_jk [i Omega_k + Gamma_k/2]
                       e^{2i(nu_j - nu_k) t} b_k^2 b_j*
              + noise,

carries the cross-Kerr frequency pulling (Lambda terms) and the
four-wave-mixing exchange (b_k^2 b_j* terms). Trajectories are integrated
with Euler-Maruyama under Ito conventions; for this noise shape the
Stratonovich drift correction vanishes identically (the multiplicative
coupling -2i g (b + b* e^{2i nu t}) F has dG/db . G + dG/db* . G* = 0),
so the `stratonovich` flag only documents the equivalence.

Noise, when enabled, is the real white force F(t) of the eliminated field
with intensity C_OPT * S_FF (the calibrated symmetric correlator weight),
entering each mode as -2i g_j^(2) (b_j + b_j* e^{2i nu_j t}) F(t), one
shared realization per trajectory, plus an additive complex thermal force
of weight gamma_j (2 n_th_j + 1) per mode.

Every trajectory draws from its own counter-based stream keyed by
(seed, trajectory index), so ensembles are bit-reproducible regardless of
how trajectories are chunked over threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import calibration
from .backaction import BackactionSet
from .errors import AmplitudeOverflow, StepTooLarge, ValidationError
from .model import CouplingKind, SystemConfig
from .noise import NoiseModel, effective_noise_coefficient

OVERFLOW_LIMIT = 1e6
STEP_SAFETY = 50.0


@dataclass
class TrajectoryEnsemble:
    n_traj: int
    seed: int
    dt: float
    times: np.ndarray
    samples: np.ndarray        # (n_traj, n_times, n_modes) complex

    @property
    def mean_amplitude(self):
        return self.samples.mean(axis=0)

    @property
    def mean_occupation(self):
        return (np.abs(self.samples) ** 2).mean(axis=0)

    def occupation_sem(self):
        occ = np.abs(self.samples) ** 2
        return occ.std(axis=0, ddof=1) / math.sqrt(self.n_traj)


def _traj_rng(seed, index):
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=seed, spawn_key=(index,))))


def drift_rate_scale(back: BackactionSet, init):
    """Conservative bound on the fastest drift rate, for the step control."""
    amp2 = max(abs(b) ** 2 for b in init)
    n = back.n_modes
    rate = 0.0
    for j in range(n):
        r = abs(back.omega_shift[j]) + back.gamma_e[j]
        for k in range(n):
            r += abs(back.g_ratio[j, k]) * (
                0.5 * abs(back.lam[k]) * amp2
                + 0.5 * math.hypot(back.omega_shift[k], 0.5 * back.gamma[k]) * amp2
                + 2.0 * abs(back.nu[j] - back.nu[k]))
        rate = max(rate, r)
    return rate


def integrate_fwm(system: SystemConfig, back: BackactionSet, init, t_grid,
                  noise: NoiseModel = None, noise_on=False, n_traj=1, seed=0,
                  stratonovich=False, threads=1) -> TrajectoryEnsemble:
    """Euler-Maruyama ensemble for the local-minima mode equations.

    init is the list of initial complex amplitudes. t_grid must be uniform;
    its spacing is the step and must satisfy dt <= 1/(50 R) with R the
    drift-rate bound. Raises AmplitudeOverflow when any |b| exceeds 1e6.
    """
    if system.coupling_kind is not CouplingKind.QUADRATIC_MINIMA:
        raise ValidationError("integrate_fwm requires the quadratic_minima kind",
                              field="coupling_kind")
    if back.kind is not CouplingKind.QUADRATIC_MINIMA:
        raise ValidationError("backaction set was not built for quadratic minima",
                              field="backaction")
    del stratonovich  # correction is identically zero for this noise shape

    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
        raise ValidationError("t_grid must be strictly increasing", field="t_grid")
    steps = np.diff(times)
    dt = float(steps[0])
    if np.max(np.abs(steps - dt)) > 1e-9 * dt:
        raise ValidationError("t_grid must be uniformly spaced", field="t_grid")
    init = np.asarray(init, dtype=complex)
    if init.shape != (system.n_modes,):
        raise ValidationError("init must hold one complex amplitude per mode",
                              field="init")
    rate = drift_rate_scale(back, init)
    if rate > 0 and dt > 1.0 / (STEP_SAFETY * rate):
        raise StepTooLarge(f"dt={dt:.3e} exceeds bound {1.0 / (STEP_SAFETY * rate):.3e}")

    n = system.n_modes
    om = np.asarray(back.omega_shift)
    ga = np.asarray([m.gamma for m in system.modes])
    lam = np.asarray(back.lam)
    gjk = back.g_ratio
    nus = np.asarray(back.nu)
    fwm_coef = gjk * (1j * om + 0.5 * np.asarray(back.gamma))[None, :]
    kerr_coef = gjk * lam[None, :]
    g2 = np.asarray(back.g)

    if noise is None:
        noise = NoiseModel.vacuum()
    s_ff = calibration.C_OPT * effective_noise_coefficient(noise, back.delta_bar,
                                                           system.cavity.kappa)
    th_w = np.asarray([m.gamma * (2.0 * m.n_th + 1.0) for m in system.modes])

    def run_block(indices):
        nt = len(indices)
        b = np.tile(init, (nt, 1))
        out = np.empty((nt, times.size, n), dtype=complex)
        out[:, 0, :] = b
        rngs = [_traj_rng(seed, i) for i in indices]
        sq_dt = math.sqrt(dt)
        for step in range(times.size - 1):
            t = times[step]
            occ = np.abs(b) ** 2
            # deterministic drift
            db = (1j * om - 0.5 * ga)[None, :] * b
            db -= 0.5j * (occ @ kerr_coef.T) * b
            phase = np.exp(2j * (nus[:, None] - nus[None, :]) * t)
            db -= 0.5 * np.einsum("jk,tk->tj", fwm_coef * phase, b * b) * np.conj(b)
            bn = b + dt * db
            if noise_on:
                for ti in range(nt):
                    draws = rngs[ti].standard_normal(1 + 2 * n)
                    f = draws[0] * math.sqrt(s_ff) * sq_dt
                    bn[ti] += -2j * g2 * (b[ti] + np.conj(b[ti])
                                          * np.exp(2j * nus * t)) * f
                    xi = (draws[1:1 + n] + 1j * draws[1 + n:]) * np.sqrt(th_w / 2.0) * sq_dt
                    bn[ti] += 1j * xi
            b = bn
            if np.max(np.abs(b)) > OVERFLOW_LIMIT:
                raise AmplitudeOverflow(
                    f"trajectory amplitude exceeded {OVERFLOW_LIMIT:.0e} at t={t:.3e}")
            out[:, step + 1, :] = b
        return out

    indices = list(range(n_traj))
    if threads > 1 and n_traj > 1:
        from concurrent.futures import ThreadPoolExecutor
        chunks = [indices[i::threads] for i in range(threads)]
        chunks = [c for c in chunks if c]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run_block, chunks))
        samples = np.empty((n_traj, times.size, n), dtype=complex)
        for chunk, block in zip(chunks, blocks):
            for pos, traj in enumerate(chunk):
                samples[traj] = block[pos]
    else:
        samples = run_block(indices)

    return TrajectoryEnsemble(n_traj=n_traj, seed=seed, dt=dt, times=times,
                              samples=samples)


def kerr_phase_rate(back: BackactionSet, mode, amplitudes):
    """Analytic phase-rotation rate of mode j for frozen occupations.

    theta_dot = Omega_j - (1/2) sum_k g_jk Lambda_k |b_k|^2
                - (1/2) g_jj Omega_j |b_j|^2 (resonant FWM self-term),
    valid for gamma = Gamma = 0 where all |b_k| are conserved.
    """
    occ = [abs(a) ** 2 for a in amplitudes]
    rate = back.omega_shift[mode]
    for k in range(back.n_modes):
        rate -= 0.5 * back.g_ratio[mode, k] * back.lam[k] * occ[k]
    rate -= 0.5 * back.g_ratio[mode, mode] * back.omega_shift[mode] * occ[mode]
    return rate
