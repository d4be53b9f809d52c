import json

import numpy as np
import pytest

from optomech.errors import ScenarioError, ValidationError
from optomech.model import (TWO_PI, CavityConfig, CouplingKind, MechanicalMode,
                            SystemConfig, classify_regime, dump_config,
                            load_config, system_from_dict, system_to_dict)

from conftest import make_system


def test_hz_to_angular_conversion(tmp_path):
    path = tmp_path / "sys.json"
    path.write_text(json.dumps({
        "cavity": {"kappa_hz": 1e6, "delta_c_hz": -2e6, "eta_hz": 5e5},
        "modes": [{"omega_hz": 20e6, "gamma_hz": 100.0, "coupling_hz": 300.0,
                   "n_th": 2.0}],
    }))
    system = load_config(path)
    assert system.modes[0].omega == pytest.approx(TWO_PI * 20e6, rel=1e-15)
    assert system.cavity.kappa == pytest.approx(TWO_PI * 1e6, rel=1e-15)
    assert system.cavity.delta_c == pytest.approx(-TWO_PI * 2e6, rel=1e-15)


def test_round_trip_identity(tmp_path, fig2_system):
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    dump_config(fig2_system, p1)
    again = load_config(p1)
    dump_config(again, p2)
    assert p1.read_text() == p2.read_text()
    for m1, m2 in zip(fig2_system.modes, again.modes):
        assert m1.omega == pytest.approx(m2.omega, rel=1e-12)
        assert m1.coupling == pytest.approx(m2.coupling, rel=1e-12)


def test_mixed_sign_quadratic_rejected():
    with pytest.raises(ValidationError, match="coupling_kind/sign mismatch"):
        make_system(1e5, [(1e5, 0, -100.0, 0), (1e5, 0, 100.0, 0)],
                    kind=CouplingKind.QUADRATIC_MAXIMA)
    with pytest.raises(ValidationError, match="coupling_kind/sign mismatch"):
        make_system(1e5, [(1e5, 0, -100.0, 0)], kind=CouplingKind.QUADRATIC_MINIMA)


def test_invariant_messages_name_field():
    with pytest.raises(ValidationError) as err:
        MechanicalMode(omega=-1.0, gamma=0.0, coupling=0.0)
    assert err.value.field == "omega"
    with pytest.raises(ValidationError) as err:
        CavityConfig(kappa=0.0, delta_c=0.0)
    assert err.value.field == "kappa"


def test_unknown_keys_rejected():
    with pytest.raises(ScenarioError, match="unknown keys"):
        system_from_dict({"cavity": {"kappa_hz": 1.0}, "modes": [], "bogus": 1})


def test_photon_number_drive_inversion():
    system = system_from_dict({
        "cavity": {"kappa_hz": 1e6, "delta_c_hz": 0.0,
                   "photon_number": 100.0, "at_detuning_hz": -1e6},
        "modes": [{"omega_hz": 1e6, "coupling_hz": 10.0}],
    })
    d = -TWO_PI * 1e6
    n_c = system.cavity.eta**2 / (d**2 + system.cavity.kappa**2 / 4)
    assert n_c == pytest.approx(100.0, rel=1e-12)


def test_missing_file_reports_path(tmp_path):
    with pytest.raises(ScenarioError) as err:
        load_config(tmp_path / "nope.json")
    assert err.value.path is not None


class TestRegime:
    def test_fig2_resolved_sideband_weak(self, fig2_system):
        report = classify_regime(fig2_system, -TWO_PI * 20e6)
        assert report.resolved_sideband
        assert not report.doppler
        assert report.weak_coupling
        assert not report.strong_coupling_warning

    def test_fig4_doppler(self, fig4_system):
        report = classify_regime(fig4_system, -TWO_PI * 100e3)
        assert report.doppler
        assert not report.resolved_sideband

    def test_strong_coupling_threshold(self):
        system = make_system(1e6, [(20e6, 0.0, 0.6e6, 0.0)])
        report = classify_regime(system, -TWO_PI * 20e6)
        assert report.strong_coupling_warning
        assert not report.weak_coupling

    def test_blue_detuned_warning(self, fig2_system):
        assert classify_regime(fig2_system, TWO_PI * 1e6).blue_detuned_warning
        assert not classify_regime(fig2_system, -TWO_PI * 1e6).blue_detuned_warning

    def test_flags_mutually_consistent(self):
        # one mode above kappa, one below: neither flag may be set
        system = make_system(1e6, [(10e6, 0, 1e3, 0), (10e3, 0, 1e3, 0)])
        report = classify_regime(system, -TWO_PI * 1e6)
        assert not (report.resolved_sideband and report.doppler)
        assert not report.resolved_sideband
        assert not report.doppler
