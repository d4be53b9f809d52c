import numpy as np
import pytest

from optomech.errors import ValidationError
from optomech.meanfield import solve_linear, solve_quadratic
from optomech.model import CouplingKind

from conftest import TWO_PI, make_system


def linear_system(kappa_hz=1e5, omega_hz=1e6, g0_hz=2e3, eta_hz=9.7e6,
                  delta_c_hz=-3e5, gamma_hz=100.0):
    return make_system(kappa_hz, [(omega_hz, gamma_hz, g0_hz, 0.0)],
                       delta_c_hz=delta_c_hz, eta_hz=eta_hz, amplified=False)


def test_decoupled_on_resonance():
    system = make_system(1e5, [(1e6, 10.0, 0.0, 0.0)], eta_hz=1e4, amplified=False)
    (sol,) = solve_linear(system)
    assert sol.delta_bar == pytest.approx(0.0, abs=1e-12 * system.cavity.kappa)
    assert sol.alpha_s == pytest.approx(2 * system.cavity.eta / system.cavity.kappa)


def test_decoupled_half_linewidth_detuned():
    system = make_system(1e5, [(1e6, 10.0, 0.0, 0.0)], eta_hz=1e4,
                         delta_c_hz=-0.5e5, amplified=False)
    (sol,) = solve_linear(system)
    # n_c = |eta|^2 * 2 / kappa^2 at delta = -kappa/2
    assert sol.n_c == pytest.approx(2 * system.cavity.eta**2 / system.cavity.kappa**2,
                                    rel=1e-12)


def test_bistable_three_roots_middle_unstable():
    system = linear_system()
    sols = solve_linear(system)

    # oracle: sign changes of the self-consistency residual on a dense grid
    K = sum(2 * m.coupling**2 / m.omega for m in system.modes)
    cav = system.cavity
    grid = np.linspace(cav.delta_c - 3 * cav.kappa, abs(cav.delta_c), 200001)
    resid = grid - cav.delta_c - K * cav.eta**2 / (grid**2 + cav.kappa**2 / 4)
    n_oracle = int((np.diff(np.sign(resid)) != 0).sum())

    assert len(sols) == n_oracle == 3
    assert [s.stable for s in sols] == [True, False, True]
    assert sols[0].delta_bar < sols[1].delta_bar < sols[2].delta_bar


def test_residual_invariant():
    system = linear_system()
    K = sum(2 * m.coupling**2 / m.omega for m in system.modes)
    cav = system.cavity
    for s in solve_linear(system):
        resid = s.delta_bar - cav.delta_c - K * cav.eta**2 / (
            s.delta_bar**2 + cav.kappa**2 / 4)
        assert abs(resid) < 1e-10 * cav.kappa


def test_zero_coupling_matches_bare_lorentzian():
    for delta_c_hz in (-3e5, -1e5, 0.0, 2e5):
        lin = make_system(1e5, [(1e6, 10.0, 0.0, 0.0)], eta_hz=1e4,
                          delta_c_hz=delta_c_hz, amplified=False)
        (sol,) = solve_linear(lin)
        cav = lin.cavity
        bare = cav.eta**2 / (cav.delta_c**2 + cav.kappa**2 / 4)
        assert sol.n_c == pytest.approx(bare, rel=1e-12)

        quad = make_system(1e5, [(1e6, 10.0, 1e-30, 0.0)], eta_hz=1e4,
                           delta_c_hz=delta_c_hz, amplified=False,
                           kind=CouplingKind.QUADRATIC_MINIMA)
        (qsol,) = solve_quadratic(quad)
        assert qsol.n_c == pytest.approx(bare, rel=1e-9)


def test_displacements_follow_photon_number():
    system = linear_system()
    for s in solve_linear(system):
        for m, d in zip(system.modes, s.displacements):
            assert d == pytest.approx(2 * m.coupling * s.n_c / m.omega, rel=1e-12)


def test_kind_dispatch_guards():
    with pytest.raises(ValidationError):
        solve_quadratic(linear_system())
    quad = make_system(1e5, [(1e5, 10.0, 100.0, 0.0)], eta_hz=1e4,
                       kind=CouplingKind.QUADRATIC_MINIMA, amplified=False)
    with pytest.raises(ValidationError):
        solve_linear(quad)


class TestQuadratic:
    def maxima_system(self, eta_factor=3.0, delta_c_hz=-2e5, gamma_hz=1e3):
        # pinned photon number omega/(4|g0|) = 250
        kappa_hz = 1e5
        eta_hz = eta_factor * np.sqrt(250.0) * kappa_hz / 2
        return make_system(kappa_hz, [(1e5, gamma_hz, -100.0, 0.0)],
                           delta_c_hz=delta_c_hz, eta_hz=eta_hz,
                           kind=CouplingKind.QUADRATIC_MAXIMA, amplified=False)

    def test_minima_zero_displacement_and_vacuum_shift(self):
        system = make_system(1e5, [(1e6, 0.0, 150.0, 0.0), (2e6, 0.0, 50.0, 0.0)],
                             delta_c_hz=5e4, eta_hz=1e4,
                             kind=CouplingKind.QUADRATIC_MINIMA, amplified=False)
        (sol,) = solve_quadratic(system)
        assert all(x == 0.0 for x in sol.displacements)
        assert sol.stable
        expected = system.cavity.delta_c - sum(m.coupling for m in system.modes)
        assert sol.delta_bar == pytest.approx(expected, rel=1e-15)

    def test_maxima_below_threshold_only_zero_stable(self):
        # 4|g0| n_c(x=0) < omega: zero branch stable, displaced pair unstable
        system = self.maxima_system()
        sols = solve_quadratic(system)
        n_c0 = sols[0].n_c
        g0 = system.modes[0].coupling
        assert 4 * abs(g0) * n_c0 < system.modes[0].omega
        assert sols[0].stable
        assert all(not s.stable for s in sols if s.displacements[0] != 0.0)

        # oracle: residual of (4 g0 n_c + omega) x = 0 over an x grid admits
        # nonzero solutions only at the pinned photon number
        cav = system.cavity
        xs = np.linspace(0.1, 60.0, 20000)
        db = cav.delta_c - g0 * (2 * xs) ** 2
        n_c = cav.eta**2 / (db**2 + cav.kappa**2 / 4)
        resid = (4 * g0 * n_c + system.modes[0].omega) * (2 * xs)
        crossing_x = xs[np.nonzero(np.diff(np.sign(resid)))[0]]
        found = sorted(abs(s.displacements[0]) for s in sols if s.displacements[0] > 0)
        assert len(crossing_x) == len(found)
        np.testing.assert_allclose(sorted(crossing_x), found, rtol=1e-2)

    def test_displaced_pairs_exact(self):
        sols = solve_quadratic(self.maxima_system())
        displaced = [s for s in sols if s.displacements[0] != 0.0]
        assert displaced and len(displaced) % 2 == 0
        by_branch = {}
        for s in displaced:
            by_branch.setdefault(round(s.delta_bar, 6), []).append(s.displacements[0])
        for pair in by_branch.values():
            assert abs(pair[0] + pair[1]) <= 1e-12 * abs(pair[0])

    def test_factor_two_detuning_identity(self):
        system = self.maxima_system()
        dc = system.cavity.delta_c
        for s in solve_quadratic(system):
            if s.displacements[0] == 0.0:
                continue
            lhs = dc - s.delta_shifted
            rhs = 2.0 * (dc - s.delta_bar)
            assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(dc))

    def test_sign_choice_orders_pair(self):
        base = self.maxima_system()
        flipped = make_system(1e5, [(1e5, 1e3, -100.0, 0.0)], delta_c_hz=-2e5,
                              eta_hz=3.0 * np.sqrt(250.0) * 1e5 / 2,
                              kind=CouplingKind.QUADRATIC_MAXIMA, amplified=False,
                              sign_choice=(-1,))
        first = [s for s in solve_quadratic(base) if s.displacements[0] != 0][0]
        first_f = [s for s in solve_quadratic(flipped) if s.displacements[0] != 0][0]
        assert first.displacements[0] > 0 > first_f.displacements[0]

    def test_stability_matches_time_domain_oracle(self):
        # classical RK4 integration of the exact mean-field ODEs as oracle
        system = self.maxima_system(delta_c_hz=-1e5)
        sols = solve_quadratic(system)
        cav = system.cavity
        mode = system.modes[0]

        def rhs(y):
            ar, ai, q, p = y
            delta = cav.delta_c - mode.coupling * q * q
            return np.array([
                -delta * ai - cav.kappa / 2 * ar + cav.eta,
                delta * ar - cav.kappa / 2 * ai,
                mode.omega * p,
                -(mode.omega + 4 * mode.coupling * (ar * ar + ai * ai)) * q
                - mode.gamma * p])

        def stays_near(sol, steps=120000, dt=1e-8):
            x0 = sol.displacements[0]
            y = np.array([sol.alpha_s.real, sol.alpha_s.imag,
                          2 * x0 * 1.001 + (0.02 if x0 == 0 else 0.0), 0.0])
            start = y.copy()
            for _ in range(steps):
                k1 = rhs(y)
                k2 = rhs(y + dt / 2 * k1)
                k3 = rhs(y + dt / 2 * k2)
                k4 = rhs(y + dt * k3)
                y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > 1e7:
                    return False
            return abs(y[2] - start[2]) < 1.0 + 0.1 * abs(start[2])

        checked = 0
        for sol in sols:
            if sol.displacements[0] < 0:
                continue  # mirror image of the + branch
            assert stays_near(sol) == sol.stable
            checked += 1
        assert checked >= 2
