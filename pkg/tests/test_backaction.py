import numpy as np
import pytest

from optomech.backaction import (doppler_shift_damping, linear_shift_damping,
                                 quadratic_maxima_shift_damping,
                                 quadratic_minima_coefficients,
                                 self_consistent_frequencies)
from optomech.errors import DegenerateCoupling, MultivaluedFrequency
from optomech.meanfield import solve_quadratic
from optomech.model import CouplingKind

from conftest import TWO_PI, make_system


class TestLinearShiftDamping:
    def test_zero_detuning_vanishes(self):
        om, ga = linear_shift_damping(TWO_PI * 1e3, TWO_PI * 1e6, 0.0, TWO_PI * 1e5)
        assert om == pytest.approx(0.0, abs=1e-30)
        assert ga == pytest.approx(0.0, abs=1e-30)

    def test_cooling_rate_on_red_sideband(self):
        # delta = -nu, kappa << nu: Gamma -> 4 g^2 / kappa up to O(kappa^2/nu^2)
        g, nu, kappa = TWO_PI * 1e3, TWO_PI * 1e7, TWO_PI * 1e5
        _, ga = linear_shift_damping(g, nu, -nu, kappa)
        assert ga == pytest.approx(4 * g**2 / kappa, rel=2 * (kappa / nu) ** 2 + 1e-12)

    @pytest.mark.parametrize("delta_frac", [-2.0, -0.7, -0.3, 0.4, 1.5])
    def test_odd_symmetry(self, delta_frac):
        g, nu, kappa = TWO_PI * 2e3, TWO_PI * 3e4, TWO_PI * 1e6
        d = delta_frac * kappa
        om_p, ga_p = linear_shift_damping(g, nu, d, kappa)
        om_m, ga_m = linear_shift_damping(g, nu, -d, kappa)
        assert om_m == pytest.approx(-om_p, rel=1e-14)
        assert ga_m == pytest.approx(-ga_p, rel=1e-14)

    def test_red_detuned_cooling_positive(self):
        g, kappa = TWO_PI * 1e3, TWO_PI * 1e6
        for nu in np.linspace(0.01, 30, 40) * kappa:
            for d in -np.linspace(0.01, 30, 40) * kappa:
                _, ga = linear_shift_damping(g, nu, d, kappa)
                assert ga > 0

    @pytest.mark.parametrize("nu_frac", [0.001, 0.01, 0.02])
    def test_doppler_limit_agreement(self, nu_frac):
        # small-nu expansion agrees to O(nu^2/kappa^2) relative
        g, kappa = TWO_PI * 1e3, TWO_PI * 1e6
        nu = nu_frac * kappa
        for d in (-1.5 * kappa, -0.45 * kappa, 0.8 * kappa):
            om, ga = linear_shift_damping(g, nu, d, kappa)
            om_a, ga_a = doppler_shift_damping(g, nu, d, kappa)
            assert abs(om - om_a) <= 20 * nu_frac**2 * abs(om)
            assert abs(ga - ga_a) <= 20 * nu_frac**2 * abs(ga)

    def test_doppler_damping_leading_coefficient(self):
        # finite-difference oracle: Gamma(nu)/nu -> -4 g^2 d kappa / (d^2+k^2/4)^2
        g, kappa = 1.0, TWO_PI
        d = -0.6 * kappa
        h = 1e-7 * kappa
        _, ga = linear_shift_damping(g, h, d, kappa)
        slope = ga / h
        expected = -4 * g**2 * d * kappa / (d**2 + kappa**2 / 4) ** 2
        assert slope == pytest.approx(expected, rel=1e-9)


class TestQuadraticCoefficients:
    def test_maxima_zero_displacement(self):
        om, ga = quadratic_maxima_shift_damping(TWO_PI * 100, 0.0, TWO_PI * 1e5,
                                                -TWO_PI * 1e5, TWO_PI * 1e5)
        assert om == 0.0 and ga == 0.0

    def test_maxima_equals_linear_substitution(self):
        g2, xbar, nu, d, kappa = TWO_PI * 50, 3.7, TWO_PI * 1e5, -TWO_PI * 2e5, TWO_PI * 9e4
        assert quadratic_maxima_shift_damping(g2, xbar, nu, d, kappa) == \
            linear_shift_damping(4 * g2 * xbar, nu, d, kappa)

    def test_maxima_red_detuned_cooling_sign(self):
        _, ga = quadratic_maxima_shift_damping(TWO_PI * 50, 2.0, TWO_PI * 1e5,
                                               -TWO_PI * 1e5, TWO_PI * 1e4)
        assert ga > 0

    def test_minima_odd_symmetry_and_zero(self):
        g2, nu, kappa = TWO_PI * 40, TWO_PI * 1e5, TWO_PI * 1e5
        om0, ga0, lam0 = quadratic_minima_coefficients(g2, nu, 0.0, kappa)
        assert om0 == ga0 == lam0 == 0.0
        om, ga, lam = quadratic_minima_coefficients(g2, nu, 0.7 * kappa, kappa)
        om_m, ga_m, lam_m = quadratic_minima_coefficients(g2, nu, -0.7 * kappa, kappa)
        assert (om_m, ga_m, lam_m) == pytest.approx((-om, -ga, -lam), rel=1e-14)

    def test_minima_cooling_rate_at_twice_nu(self):
        # delta2 = -2 nu, kappa << nu: Gamma -> 4 (2 g2)^2 / kappa
        g2, nu, kappa = TWO_PI * 40, TWO_PI * 1e7, TWO_PI * 1e4
        _, ga, _ = quadratic_minima_coefficients(g2, nu, -2 * nu, kappa)
        assert ga == pytest.approx(4 * (2 * g2) ** 2 / kappa, rel=1e-5)

    def test_minima_lambda_at_half_linewidth(self):
        g2, nu, kappa = TWO_PI * 40, TWO_PI * 1e6, TWO_PI * 1e5
        _, _, lam = quadratic_minima_coefficients(g2, nu, kappa / 2, kappa)
        assert lam == pytest.approx((2 * g2) ** 2 * 2 / kappa, rel=1e-12)


class TestSelfConsistent:
    def test_zero_coupling_keeps_bare_frequency(self):
        system = make_system(1e6, [(20e6, 0.0, 0.0, 0.0)])
        back = self_consistent_frequencies(system, -TWO_PI * 20e6, mode="weak")
        assert back.nu[0] == system.modes[0].omega
        back = self_consistent_frequencies(system, -TWO_PI * 20e6,
                                           mode="self_consistent")
        assert back.nu[0] == pytest.approx(system.modes[0].omega, rel=1e-14)

    def test_fig2_dispersive_features(self, fig2_system):
        # nu_1(delta) - omega_1 peaks within ~kappa of +-omega_1 with width ~kappa
        omega1 = fig2_system.modes[0].omega
        kappa = fig2_system.cavity.kappa
        deltas = np.linspace(-omega1 - 4 * kappa, -omega1 + 4 * kappa, 241)
        shifts = [self_consistent_frequencies(fig2_system, d).omega_shift[0]
                  for d in deltas]
        shifts = np.array(shifts)
        i_min, i_max = shifts.argmin(), shifts.argmax()
        assert abs(deltas[i_min] + omega1) < 1.2 * kappa
        assert abs(deltas[i_max] + omega1) < 1.2 * kappa
        # dispersive: minimum below the sideband center, maximum above
        assert deltas[i_min] < -omega1 < deltas[i_max]
        half = 0.45 * (shifts.max() - shifts.min())
        wide = deltas[np.abs(shifts) > half]
        assert wide.size and (wide.max() - wide.min()) < 6 * kappa

    def test_weak_vs_self_consistent_difference_bound(self):
        # first-order estimate: |nu_sc - nu_wc| ~ |dOmega/dnu| |Omega|, and
        # |dOmega/dnu| <= 4 (g/kappa)^2; on the dispersion wing the slope
        # drops below (g/kappa)^2 so the tight bound holds there
        kappa_hz = 1e6
        g_hz = 0.05 * kappa_hz
        system = make_system(kappa_hz, [(20e6, 0.0, g_hz, 0.0)])
        for d_hz, factor in ((-21.0e6, 1.0), (-20.3e6, 4.0)):
            d = TWO_PI * d_hz
            weak = self_consistent_frequencies(system, d, mode="weak")
            sc = self_consistent_frequencies(system, d, mode="self_consistent")
            bound = factor * (g_hz / kappa_hz) ** 2 * abs(weak.omega_shift[0])
            assert abs(sc.nu[0] - weak.nu[0]) < bound

    def test_multivalued_raises_with_branches(self):
        system = make_system(1e6, [(20e6, 0.0, 0.7e6, 0.0)])
        with pytest.raises(MultivaluedFrequency) as err:
            self_consistent_frequencies(system, -TWO_PI * 20e6,
                                        mode="self_consistent")
        assert len(err.value.branches) > 1

    def test_cross_product_identity(self, fig2_system):
        back = self_consistent_frequencies(fig2_system, -TWO_PI * 20.2e6)
        lhs = back.omega_c[0, 1] * back.omega_c[1, 0]
        assert lhs == pytest.approx(back.omega_shift[0] * back.omega_shift[1],
                                    rel=1e-12)
        lhs = back.gamma_c[0, 1] * back.gamma_c[1, 0]
        assert lhs == pytest.approx(back.gamma[0] * back.gamma[1], rel=1e-12)

    def test_matched_point_cross_coefficients_equal(self, fig2_system):
        back = self_consistent_frequencies(fig2_system, -TWO_PI * 20.2e6,
                                           nu_override=TWO_PI * 20e6)
        assert back.omega_c[0, 1] == pytest.approx(back.omega_c[1, 0], rel=1e-12)
        assert back.gamma_c[0, 1] == pytest.approx(back.gamma_c[1, 0], rel=1e-12)

    def test_gamma_e_adds_intrinsic_damping(self, fig3_system):
        back = self_consistent_frequencies(fig3_system, -TWO_PI * 20e6)
        for j, m in enumerate(fig3_system.modes):
            assert back.gamma_e[j] == pytest.approx(back.gamma[j] + m.gamma, rel=1e-14)

    def test_degenerate_coupling_for_mixed_displacements(self):
        system = make_system(
            1e5, [(1e5, 1e3, -100.0, 0.0), (2.4e5, 1e3, -55.0, 0.0)],
            delta_c_hz=-2e5, eta_hz=3.0 * np.sqrt(250.0) * 1e5 / 2,
            kind=CouplingKind.QUADRATIC_MAXIMA, amplified=False)
        sols = [s for s in solve_quadratic(system)
                if any(x != 0 for x in s.displacements)]
        assert sols
        with pytest.raises(DegenerateCoupling):
            self_consistent_frequencies(system, sols[0].delta_bar,
                                        solution=sols[0])
