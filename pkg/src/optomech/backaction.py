"""Radiation-induced frequency shifts, damping, and cross-couplings.

For linear coupling the per-mode shift and damping are

    Omega = g^2 [ (d-nu)/((d-nu)^2+k^2/4) + (d+nu)/((d+nu)^2+k^2/4) ],
    Gamma/2 = g^2 [ (k/2)/((d+nu)^2+k^2/4) - (k/2)/((d-nu)^2+k^2/4) ],

with d the effective detuning and k the cavity linewidth. Quadratic
coupling at field maxima uses the same Lorentzian structure with strength
4 g^(2) xbar and detuning Delta^(2); at field minima the strength is
2 g^(2), the sidebands sit at 2 nu, and a cross-Kerr coefficient Lambda
appears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCoupling, MultivaluedFrequency, ValidationError
from .model import CouplingKind, SystemConfig, bare_photon_number

NU_FIXED_POINT_GRID = 200


def linear_shift_damping(g, nu, delta_bar, kappa):
    """Optical spring shift Omega and radiative damping Gamma for one mode."""
    if not kappa > 0:
        raise ValidationError("kappa must be > 0", field="kappa")
    L = kappa * kappa / 4.0
    dm = delta_bar - nu
    dp = delta_bar + nu
    omega_shift = g * g * (dm / (dm * dm + L) + dp / (dp * dp + L))
    gamma = g * g * kappa * (1.0 / (dp * dp + L) - 1.0 / (dm * dm + L))
    return omega_shift, gamma


def doppler_shift_damping(g, nu, delta_bar, kappa):
    """Leading small-nu/kappa (Doppler) forms of shift and damping.

    Omega ~ 2 g^2 d / (d^2 + k^2/4) and Gamma ~ -4 g^2 d k nu / (d^2 + k^2/4)^2,
    the first-order nu-expansion of the exact expressions. (The damping
    carries the full factor 4; see docs/conventions.md.)
    """
    L = delta_bar * delta_bar + kappa * kappa / 4.0
    return 2.0 * g * g * delta_bar / L, -4.0 * g * g * delta_bar * kappa * nu / (L * L)


def quadratic_maxima_shift_damping(g2, xbar, nu, delta2, kappa):
    """Shift and damping at a displaced (field-maximum) equilibrium.

    Effective strength 4 g^(2) xbar, detuning Delta^(2).
    """
    return linear_shift_damping(4.0 * g2 * xbar, nu, delta2, kappa)


def quadratic_minima_coefficients(g2, nu, delta_bar2, kappa):
    """(Omega, Gamma, Lambda) for oscillators at field minima.

    The sidebands sit at twice the mechanical frequency; Lambda is the
    cross-Kerr coefficient 4 g^(2)^2 * 2 d / (d^2 + k^2/4).
    """
    omega_shift, gamma = linear_shift_damping(2.0 * g2, 2.0 * nu, delta_bar2, kappa)
    lam = (2.0 * g2) ** 2 * 2.0 * delta_bar2 / (delta_bar2**2 + kappa**2 / 4.0)
    return omega_shift, gamma, lam


@dataclass(frozen=True)
class BackactionSet:
    """Per-mode backaction coefficients and the cross matrices.

    nu_j = base_j + Omega_j where base_j is the bare frequency (linear) or
    the photon-shifted frequency varpi_j (quadratic). omega_c[j, k] and
    gamma_c[j, k] are g_jk Omega_k and g_jk Gamma_k with the
    kind-appropriate coupling ratio g_jk. gamma contains the radiative
    part only; gamma_e adds the intrinsic mechanical damping.
    """

    kind: CouplingKind
    delta_bar: float
    kappa: float
    g: tuple
    nu: tuple
    omega_shift: tuple
    gamma: tuple
    gamma_e: tuple
    lam: tuple
    g_ratio: np.ndarray
    omega_c: np.ndarray
    gamma_c: np.ndarray

    @property
    def n_modes(self):
        return len(self.nu)


def _effective_inputs(system, delta_bar, solution):
    """Per-kind (strength, amplified g, base frequency, effective detuning,
    ratio weights).

    ``strength`` is the coefficient whose square sets Omega/Gamma: g_j for
    linear, 4 g^(2)_j xbar_j for maxima, 2 g^(2)_j for minima. The ratio
    weights r_j define g_jk = r_j / r_k.
    """
    kind = system.coupling_kind
    if kind is CouplingKind.LINEAR:
        if system.couplings_amplified:
            g = [m.coupling for m in system.modes]
        else:
            n_c = bare_photon_number(system.cavity, delta_bar)
            g = system.amplified_couplings(n_c)
        base = [m.omega for m in system.modes]
        return g, g, base, delta_bar, g

    if solution is None:
        raise ValidationError(
            "quadratic backaction needs a MeanFieldSolution (for n_c and xbar)")
    n_c = solution.n_c
    g2 = system.amplified_couplings(n_c)
    if system.couplings_amplified:
        # stored coupling is g^(2) = g0^(2) sqrt(n_c), so 2 g0^(2) n_c = 2 g^(2) sqrt(n_c)
        varpi = [m.omega + 2.0 * m.coupling * math.sqrt(n_c) for m in system.modes]
    else:
        varpi = [m.omega + 2.0 * m.coupling * n_c for m in system.modes]
    if kind is CouplingKind.QUADRATIC_MAXIMA:
        x = solution.displacements
        strength = [4.0 * g2[j] * x[j] for j in range(system.n_modes)]
        weights = [g2[j] * x[j] for j in range(system.n_modes)]
        return strength, g2, varpi, solution.delta_shifted, weights
    # minima
    strength = [2.0 * g2[j] for j in range(system.n_modes)]
    return strength, g2, varpi, solution.delta_bar, g2


def self_consistent_frequencies(system: SystemConfig, delta_bar, mode="weak",
                                solution=None, nu_override=None) -> BackactionSet:
    """Backaction coefficients for every mode of a system.

    mode="weak" evaluates each Omega_k, Gamma_k once at nu_k = base_k.
    mode="self_consistent" solves nu_k = base_k + Omega_k(nu_k) by a
    grid-seeded bracketing search; several fixed points raise
    MultivaluedFrequency with all branches attached (normal-mode-splitting
    territory, out of scope).

    nu_override forces every coefficient to be evaluated at one common
    frequency: used for idealized matched-frequency scenarios so the drift
    and diffusion stay mutually consistent.
    """
    if mode not in ("weak", "self_consistent"):
        raise ValidationError("mode must be 'weak' or 'self_consistent'", field="mode")
    kappa = system.cavity.kappa
    strength, g_amp, base, d_eff, ratio_w = _effective_inputs(system, delta_bar, solution)
    n = system.n_modes
    kind = system.coupling_kind
    sideband_factor = 2.0 if kind is CouplingKind.QUADRATIC_MINIMA else 1.0

    def shift_at(j, nu):
        om, ga = linear_shift_damping(strength[j], sideband_factor * nu, d_eff, kappa)
        return om, ga

    nus, oms, gas = [], [], []
    for j in range(n):
        if nu_override is not None:
            nu_j = nu_override
            om, ga = shift_at(j, nu_j)
        elif mode == "weak":
            nu_j = base[j]
            om, ga = shift_at(j, nu_j)
            nu_j = base[j] + om
        else:
            nu_j = _solve_fixed_point(lambda nv, jj=j: base[jj] + shift_at(jj, nv)[0],
                                      base[j], strength[j], kappa)
            om, ga = shift_at(j, nu_j)
        nus.append(nu_j)
        oms.append(om)
        gas.append(ga)

    lam = [0.0] * n
    if kind is CouplingKind.QUADRATIC_MINIMA:
        lam = [(2.0 * g_amp[j]) ** 2 * 2.0 * d_eff / (d_eff**2 + kappa**2 / 4.0)
               for j in range(n)]

    g_ratio = np.empty((n, n))
    any_nonzero = any(w != 0.0 for w in ratio_w)
    for j in range(n):
        for k in range(n):
            if ratio_w[k] == 0.0:
                if any_nonzero:
                    raise DegenerateCoupling(
                        f"coupling ratio g_jk undefined: mode {k} has zero weight")
                g_ratio[j, k] = 0.0
            else:
                g_ratio[j, k] = ratio_w[j] / ratio_w[k]

    omega_c = g_ratio * np.asarray(oms)[None, :]
    gamma_c = g_ratio * np.asarray(gas)[None, :]
    gamma_e = tuple(gas[j] + system.modes[j].gamma for j in range(n))
    return BackactionSet(
        kind=kind, delta_bar=d_eff, kappa=kappa, g=tuple(g_amp),
        nu=tuple(nus), omega_shift=tuple(oms), gamma=tuple(gas),
        gamma_e=gamma_e, lam=tuple(lam), g_ratio=g_ratio,
        omega_c=omega_c, gamma_c=gamma_c)


def _solve_fixed_point(f, base, strength, kappa, tol_rel=1e-10):
    """All fixed points of nu = f(nu) near base, by grid + bisection."""
    span = 8.0 * strength * strength / kappa + 4.0 * kappa
    lo = max(base - span, 1e-12 * base)
    hi = base + span
    grid = np.linspace(lo, hi, NU_FIXED_POINT_GRID)
    resid = np.array([f(x) - x for x in grid])
    roots = []
    sign = np.sign(resid)
    for i in np.nonzero(np.diff(sign) != 0)[0]:
        a, b = grid[i], grid[i + 1]
        fa = resid[i]
        for _ in range(200):
            m = 0.5 * (a + b)
            fm = f(m) - m
            if abs(fm) == 0.0 or (b - a) < tol_rel * base:
                a = b = m
                break
            if fa * fm < 0:
                b = m
            else:
                a, fa = m, fm
        root = 0.5 * (a + b)
        if not any(abs(root - r) <= 10 * tol_rel * base for r in roots):
            roots.append(root)
    if not roots:
        # no sign change: the shift never moves nu out of the grid; fall back
        roots = [base + (f(base) - base)]
    if len(roots) > 1:
        raise MultivaluedFrequency(
            f"{len(roots)} self-consistent frequencies found (strong coupling)",
            branches=roots)
    return roots[0]
