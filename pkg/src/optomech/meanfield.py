"""Classical steady states and stability for linear and quadratic coupling.

The linear self-consistency for the effective detuning,

    delta_bar = delta_c + sum_j 2 g0_j^2 |eta|^2 / (omega_j (delta_bar^2 + kappa^2/4)),

is a cubic in delta_bar. For quadratic coupling the displaced equilibria
at field maxima pin the photon number through
(4 g0_j^(2) n_c + omega_j) x_j = 0, and close through the displacement
dependence of the effective detuning.

Stability of every branch is decided from the eigenvalues of the full
linearized classical drift (cavity quadratures + mechanical (q, p) pairs),
which contains the radiative damping physics.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, ValidationError
from .model import CouplingKind, SystemConfig

_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class MeanFieldSolution:
    """One classical fixed point.

    ``displacements`` holds (beta_j + beta_j*)_s for linear coupling and
    the signed equilibrium positions x_j for quadratic coupling.
    ``delta_shifted`` is the fluctuation-level detuning Delta^(2) of the
    quadratic-maxima case (None otherwise).
    """

    alpha_s: complex
    n_c: float
    displacements: tuple
    delta_bar: float
    stable: bool
    branch: int
    delta_shifted: float = None
    kind: CouplingKind = CouplingKind.LINEAR
    degenerate_family: bool = False


def _alpha_s(cavity, delta_bar):
    return cavity.eta / complex(-delta_bar * 1j + cavity.kappa / 2.0)


def _require_drive(system):
    if system.couplings_amplified:
        raise ValidationError(
            "mean-field solvers need a drive: system declares amplified couplings "
            "without eta", field="couplings_amplified")
    if system.cavity.eta == 0.0 and any(m.coupling != 0.0 for m in system.modes):
        # zero drive is fine, the solution is trivial; keep going
        pass


# ------------------------------------------------------------ linear cubic

def _real_cubic_roots(a2, a1, a0):
    """Real roots of x^3 + a2 x^2 + a1 x + a0, via the depressed cubic."""
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    shift = -a2 / 3.0
    if disc > 0:
        u = -q / 2.0 + math.sqrt(disc)
        v = -q / 2.0 - math.sqrt(disc)
        t = math.copysign(abs(u) ** (1 / 3), u) + math.copysign(abs(v) ** (1 / 3), v)
        return [t + shift]
    if p == 0.0:
        return [shift]
    # three real roots, trigonometric form
    r = math.sqrt(-p**3 / 27.0)
    phi = math.acos(max(-1.0, min(1.0, -q / (2.0 * r))))
    m = 2.0 * math.sqrt(-p / 3.0)
    return sorted(m * math.cos((phi + 2.0 * math.pi * k) / 3.0) + shift for k in range(3))


def _polish_root(f, x0, scale, iters=200):
    """Bisection polish around a sign change bracketing x0."""
    h = max(abs(x0), scale) * 1e-6 + scale * 1e-12
    a, b = x0 - h, x0 + h
    fa, fb = f(a), f(b)
    grow = 0
    while fa * fb > 0 and grow < 60:
        h *= 2.0
        a, b = x0 - h, x0 + h
        fa, fb = f(a), f(b)
        grow += 1
    if fa * fb > 0:
        return x0
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0 or (b - a) < 1e-15 * max(1.0, abs(m)):
            return m
        if fa * fm < 0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def linear_jacobian(system: SystemConfig, delta_bar):
    """Classical Jacobian at a linear fixed point, basis (Re a, Im a, q_j, p_j)."""
    kappa = system.cavity.kappa
    alpha = _alpha_s(system.cavity, delta_bar)
    ar, ai = alpha.real, alpha.imag
    n = system.n_modes
    J = np.zeros((2 + 2 * n, 2 + 2 * n))
    J[0, 0] = -kappa / 2.0
    J[0, 1] = -delta_bar
    J[1, 0] = delta_bar
    J[1, 1] = -kappa / 2.0
    for j, m in enumerate(system.modes):
        iq, ip = 2 + 2 * j, 3 + 2 * j
        g0 = m.coupling
        J[0, iq] = -g0 * ai
        J[1, iq] = g0 * ar
        J[iq, ip] = m.omega
        J[ip, iq] = -m.omega
        J[ip, ip] = -m.gamma
        J[ip, 0] = 4.0 * g0 * ar
        J[ip, 1] = 4.0 * g0 * ai
    return J


def quadratic_jacobian(system: SystemConfig, delta_bar, n_c, xbars):
    """Classical Jacobian at a quadratic fixed point (q_j = 2 x_j)."""
    kappa = system.cavity.kappa
    alpha = system.cavity.eta / complex(-delta_bar * 1j + kappa / 2.0)
    ar, ai = alpha.real, alpha.imag
    n = system.n_modes
    J = np.zeros((2 + 2 * n, 2 + 2 * n))
    J[0, 0] = -kappa / 2.0
    J[0, 1] = -delta_bar
    J[1, 0] = delta_bar
    J[1, 1] = -kappa / 2.0
    for j, m in enumerate(system.modes):
        iq, ip = 2 + 2 * j, 3 + 2 * j
        g0 = m.coupling
        qbar = 2.0 * xbars[j]
        J[0, iq] = 2.0 * g0 * qbar * ai
        J[1, iq] = -2.0 * g0 * qbar * ar
        J[iq, ip] = m.omega
        J[ip, iq] = -(m.omega + 4.0 * g0 * n_c)
        J[ip, ip] = -m.gamma
        J[ip, 0] = -8.0 * g0 * qbar * ar
        J[ip, 1] = -8.0 * g0 * qbar * ai
    return J


def _is_stable(J, scale):
    return np.linalg.eigvals(J).real.max() < 1e-9 * scale


def solve_linear(system: SystemConfig):
    """All classical fixed points for linear coupling, sorted by delta_bar.

    Returns a list of MeanFieldSolution; the cubic always has at least one
    real root. Stability comes from the linearized cavity+mechanics drift.
    """
    if system.coupling_kind is not CouplingKind.LINEAR:
        raise ValidationError("solve_linear requires linear coupling kind",
                              field="coupling_kind")
    _require_drive(system)
    cav = system.cavity
    kappa, delta_c, eta = cav.kappa, cav.delta_c, cav.eta
    K = sum(2.0 * m.coupling**2 / m.omega for m in system.modes)
    L = kappa * kappa / 4.0

    # delta^3 - delta_c delta^2 + L delta - (delta_c L + K eta^2) = 0
    roots = _real_cubic_roots(-delta_c, L, -(delta_c * L + K * eta * eta))

    def residual(d):
        return d - delta_c - K * eta * eta / (d * d + L)

    scale = max(kappa, abs(delta_c), max(m.omega for m in system.modes))
    out = []
    seen = []
    for r in roots:
        r = _polish_root(residual, r, scale)
        if any(abs(r - s) <= 1e-9 * scale for s in seen):
            continue
        seen.append(r)
        alpha = _alpha_s(cav, r)
        n_c = abs(alpha) ** 2
        disp = tuple(2.0 * m.coupling * n_c / m.omega for m in system.modes)
        if abs(residual(r)) > _RESIDUAL_TOL * max(kappa, 1.0):
            raise NonConvergence(f"linear self-consistency residual too large at root {r}")
        out.append(MeanFieldSolution(
            alpha_s=alpha, n_c=n_c, displacements=disp, delta_bar=r,
            stable=_is_stable(linear_jacobian(system, r), scale),
            branch=0, kind=CouplingKind.LINEAR))
    out.sort(key=lambda s: s.delta_bar)
    return [MeanFieldSolution(**{**s.__dict__, "branch": i}) for i, s in enumerate(out)]


def solve_quadratic(system: SystemConfig):
    """Classical fixed points for quadratic coupling.

    Minima (all couplings > 0): the unique branch has every x_j = 0 and
    effective detuning delta_c - sum_j g0_j^(2) (the vacuum contribution of
    <(b+b^dag)^2> survives at zero displacement).

    Maxima (all couplings < 0): the x = 0 branch always exists (detuning
    delta_c, classical displacement term only); in addition, each mode j
    whose pinned photon number omega_j / (4 |g0_j|) is reachable by the
    drive contributes a symmetric pair of displaced branches. A displaced
    branch requires 4 |g0_j| n_c(x=0) > omega_j for the zero branch to
    have lost stability in that mode. Simultaneously displacing several
    modes requires their omega_j/|g0_j| ratios to coincide, which leaves a
    one-parameter family; such branches are flagged degenerate rather than
    resolved.
    """
    if system.coupling_kind is CouplingKind.LINEAR:
        raise ValidationError("solve_quadratic requires a quadratic coupling kind",
                              field="coupling_kind")
    _require_drive(system)
    cav = system.cavity
    kappa, delta_c, eta = cav.kappa, cav.delta_c, cav.eta
    L = kappa * kappa / 4.0
    scale = max(kappa, abs(delta_c), max(m.omega for m in system.modes))
    n = system.n_modes

    if system.coupling_kind is CouplingKind.QUADRATIC_MINIMA:
        delta_bar2 = delta_c - sum(m.coupling for m in system.modes)
        alpha = _alpha_s(cav, delta_bar2)
        n_c = abs(alpha) ** 2
        J = quadratic_jacobian(system, delta_bar2, n_c, [0.0] * n)
        return [MeanFieldSolution(
            alpha_s=alpha, n_c=n_c, displacements=tuple(0.0 for _ in range(n)),
            delta_bar=delta_bar2, stable=_is_stable(J, scale), branch=0,
            kind=CouplingKind.QUADRATIC_MINIMA)]

    # quadratic maxima
    out = []
    alpha0 = _alpha_s(cav, delta_c)
    n_c0 = abs(alpha0) ** 2
    J0 = quadratic_jacobian(system, delta_c, n_c0, [0.0] * n)
    out.append(MeanFieldSolution(
        alpha_s=alpha0, n_c=n_c0, displacements=tuple(0.0 for _ in range(n)),
        delta_bar=delta_c, stable=_is_stable(J0, scale), branch=0,
        delta_shifted=delta_c, kind=CouplingKind.QUADRATIC_MAXIMA))

    ratios = [m.omega / (4.0 * abs(m.coupling)) for m in system.modes]
    for j, m in enumerate(system.modes):
        n_c = ratios[j]                      # pinned photon number
        if eta == 0.0 or eta * eta < n_c * L:
            continue
        degen = any(abs(ratios[k] - n_c) <= 1e-9 * n_c for k in range(n) if k != j)
        root = math.sqrt(eta * eta / n_c - L)
        for s in (+1.0, -1.0):
            delta_bar2 = s * root
            x_sq = (delta_c - delta_bar2) / (4.0 * m.coupling)
            if x_sq <= 0.0:
                continue
            x = math.sqrt(x_sq)
            # verify the pinning equation closed
            if abs(4.0 * m.coupling * n_c + m.omega) > _RESIDUAL_TOL * m.omega:
                raise NonConvergence("displaced-branch photon-number pinning failed")
            delta_shifted = delta_c - 8.0 * m.coupling * x_sq
            for sign in (system.sign_choice[j], -system.sign_choice[j]):
                xb = [0.0] * n
                xb[j] = sign * x
                J = quadratic_jacobian(system, delta_bar2, n_c, xb)
                out.append(MeanFieldSolution(
                    alpha_s=_alpha_s(cav, delta_bar2), n_c=n_c,
                    displacements=tuple(xb), delta_bar=delta_bar2,
                    stable=_is_stable(J, scale), branch=len(out),
                    delta_shifted=delta_shifted,
                    kind=CouplingKind.QUADRATIC_MAXIMA,
                    degenerate_family=degen))
    return out
