"""Gaussian states over mechanical quadratures (X_1, P_1, X_2, P_2, ...).

Quadratures follow X = (b e^{-i nu t} + b^dag e^{i nu t})/2, so the vacuum
variance is 1/4 and physicality requires every symplectic eigenvalue of
the covariance matrix to sit at or above 1/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnphysicalState, ValidationError

VACUUM_VARIANCE = 0.25
SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9


def symplectic_form(n_modes):
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), j)


def symplectic_eigenvalues(cov):
    """Symplectic spectrum of a 2N x 2N covariance matrix (N values)."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ cov)
    return np.sort(np.abs(ev))[::2]


@dataclass
class GaussianState:
    """Mean quadrature vector and symmetric covariance matrix."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).reshape(-1)
        self.cov = np.asarray(self.cov, dtype=float)
        dim = self.mean.size
        if dim % 2 or self.cov.shape != (dim, dim):
            raise ValidationError("mean/cov dimensions inconsistent", field="cov")
        if np.max(np.abs(self.cov - self.cov.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(self.cov))):
            raise ValidationError("covariance matrix not symmetric", field="cov")
        self.cov = 0.5 * (self.cov + self.cov.T)

    @property
    def n_modes(self):
        return self.mean.size // 2

    def symplectic_eigenvalues(self):
        return symplectic_eigenvalues(self.cov)

    def is_physical(self, tol=PHYSICALITY_TOL):
        return bool(self.symplectic_eigenvalues().min() >= VACUUM_VARIANCE - tol)

    def require_physical(self, tol=PHYSICALITY_TOL):
        nu_min = self.symplectic_eigenvalues().min()
        if nu_min < VACUUM_VARIANCE - tol:
            raise UnphysicalState(
                f"symplectic eigenvalue {nu_min:.3e} below vacuum floor {VACUUM_VARIANCE}")

    def reduced(self, j):
        """Single-mode marginal state of mode j."""
        s = slice(2 * j, 2 * j + 2)
        return GaussianState(self.mean[s].copy(), self.cov[s, s].copy())

    def phonon_number(self, j):
        """<X^2> + <P^2> + mean^2 - 1/2 for mode j."""
        s = slice(2 * j, 2 * j + 2)
        return float(self.cov[s, s].trace() + np.dot(self.mean[s], self.mean[s]) - 0.5)

    def rotated(self, angles):
        """State with each mode's quadratures rotated by angles[j]."""
        R = block_rotation(angles)
        return GaussianState(R @ self.mean, R @ self.cov @ R.T)


def block_rotation(angles):
    """Block-diagonal phase-space rotation, one angle per mode."""
    blocks = []
    for th in angles:
        c, s = math.cos(th), math.sin(th)
        blocks.append(np.array([[c, s], [-s, c]]))
    n = len(blocks)
    R = np.zeros((2 * n, 2 * n))
    for j, b in enumerate(blocks):
        R[2 * j:2 * j + 2, 2 * j:2 * j + 2] = b
    return R


# ----------------------------------------------------------- state library

def vacuum_state(n_modes=1):
    return GaussianState(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))


def thermal_state(nbar, n_modes=1):
    if nbar < 0:
        raise ValidationError("thermal nbar must be >= 0", field="nbar")
    v = (2.0 * nbar + 1.0) / 4.0
    return GaussianState(np.zeros(2 * n_modes), v * np.eye(2 * n_modes))


def coherent_state(alpha, n_modes=1, mode=0):
    st = vacuum_state(n_modes)
    st.mean[2 * mode] = np.real(alpha)
    st.mean[2 * mode + 1] = np.imag(alpha)
    return st


def squeezed_state(x_var, p_var):
    """Single-mode Gaussian with the given quadrature variances.

    Physicality (x_var * p_var >= 1/16) is enforced.
    """
    if x_var <= 0 or p_var <= 0:
        raise ValidationError("variances must be positive", field="x_var")
    st = GaussianState(np.zeros(2), np.diag([float(x_var), float(p_var)]))
    st.require_physical()
    return st


def join_states(*states):
    """Tensor product of single- or multi-mode Gaussian states."""
    means = np.concatenate([s.mean for s in states])
    dims = [s.cov.shape[0] for s in states]
    cov = np.zeros((sum(dims), sum(dims)))
    off = 0
    for s, d in zip(states, dims):
        cov[off:off + d, off:off + d] = s.cov
        off += d
    return GaussianState(means, cov)
