import numpy as np
import pytest

from optomech.errors import UnphysicalState, ValidationError
from optomech.gaussian import (GaussianState, coherent_state, join_states,
                               squeezed_state, symplectic_eigenvalues,
                               thermal_state, vacuum_state)


def test_vacuum_and_thermal_variances():
    v = vacuum_state(2)
    assert np.allclose(v.cov, 0.25 * np.eye(4))
    th = thermal_state(3.0)
    assert np.allclose(th.cov, (2 * 3 + 1) / 4 * np.eye(2))
    assert th.phonon_number(0) == pytest.approx(3.0, rel=1e-14)


def test_symplectic_eigenvalues_thermal():
    st = join_states(thermal_state(1.0), thermal_state(4.0))
    np.testing.assert_allclose(sorted(st.symplectic_eigenvalues()),
                               [0.75, 2.25], rtol=1e-12)


def test_physicality_floor():
    assert vacuum_state(1).is_physical()
    st = GaussianState(np.zeros(2), 0.2 * np.eye(2))
    assert not st.is_physical()
    with pytest.raises(UnphysicalState):
        st.require_physical()
    with pytest.raises(ValidationError):
        squeezed_state(0.01, 0.1)   # product below 1/16


def test_coherent_state_mean():
    st = coherent_state(1.5 - 0.5j)
    assert st.mean[0] == 1.5 and st.mean[1] == -0.5
    assert st.phonon_number(0) == pytest.approx(abs(1.5 - 0.5j) ** 2, rel=1e-12)


def test_rotation_preserves_symplectic_spectrum():
    st = squeezed_state(0.05, 1.5)
    for th in (0.3, 1.0, 2.2):
        rot = st.rotated([th])
        np.testing.assert_allclose(rot.symplectic_eigenvalues(),
                                   st.symplectic_eigenvalues(), rtol=1e-12)
    # quarter turn swaps the variances
    rot = st.rotated([np.pi / 2])
    assert rot.cov[0, 0] == pytest.approx(1.5, rel=1e-12)
    assert rot.cov[1, 1] == pytest.approx(0.05, rel=1e-12)


def test_reduced_marginal():
    st = join_states(thermal_state(2.0), squeezed_state(0.05, 1.5))
    sub = st.reduced(1)
    assert sub.cov[0, 0] == pytest.approx(0.05)
    assert sub.n_modes == 1


def test_asymmetric_covariance_rejected():
    cov = np.array([[0.25, 0.1], [0.0, 0.25]])
    with pytest.raises(ValidationError):
        GaussianState(np.zeros(2), cov)
