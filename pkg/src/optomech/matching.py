"""Find pump detunings that bring two mechanical modes into resonance.

The effective frequencies nu_j(delta_bar) = omega_j + Omega_j(delta_bar)
cross where the mode with the larger coupling is pulled onto the other.
Each crossing is classified by side of the resonance, by distance from
the mechanical sideband (center vs wing), and by which cross-coefficient
dominates there (cold damping vs coherent coupling).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .backaction import self_consistent_frequencies
from .errors import StrongCouplingRegime, ValidationError
from .model import SystemConfig, classify_regime

DEFAULT_GRID_POINTS = 4001
CENTER_THRESHOLD_KAPPA = 1.0
COHERENT_DOMINANCE = 3.0


class Side(enum.Enum):
    RED = "red"
    BLUE = "blue"


class Location(enum.Enum):
    SIDEBAND_CENTER = "sideband_center"
    WING = "wing"


class Dominant(enum.Enum):
    COLD_DAMPING = "cold_damping"
    COHERENT = "coherent"


@dataclass(frozen=True)
class MatchPoint:
    delta_bar: float
    nu: float
    side: Side
    location: Location
    dominant: Dominant
    omega_c: float
    gamma_c: float


def default_delta_range(system: SystemConfig):
    """[-3 omega_max - 3 kappa, +3 omega_max + 3 kappa]."""
    span = 3.0 * max(m.omega for m in system.modes) + 3.0 * system.cavity.kappa
    return (-span, span)


def find_matching_detunings(system: SystemConfig, pair=(0, 1), delta_range=None,
                            tol=None, grid_points=DEFAULT_GRID_POINTS,
                            coherent_threshold=COHERENT_DOMINANCE,
                            center_threshold=CENTER_THRESHOLD_KAPPA):
    """All detunings in delta_range where nu_i = nu_j, sorted by delta_bar.

    Weak-coupling evaluation only; a strong-coupling system raises. A pair
    with identical frequency curves (omega and g both equal) never has
    isolated crossings and returns an empty list with a Degenerate
    warning. ``tol`` is the bisection tolerance on delta_bar (default
    kappa * 1e-4).
    """
    i, j = pair
    if i == j:
        raise ValidationError("pair must name two distinct modes", field="pair")
    kappa = system.cavity.kappa
    tol = kappa * 1e-4 if tol is None else tol
    if delta_range is None:
        delta_range = default_delta_range(system)
    lo, hi = delta_range
    if not hi > lo:
        raise ValidationError("delta_range must be a nonempty interval",
                              field="delta_range")

    def nu_pair(delta):
        back = self_consistent_frequencies(system, delta, mode="weak")
        return back

    # strong-coupling screen at the most pessimistic grid point
    worst = max(abs(lo), abs(hi))
    report = classify_regime(system, -worst)
    if report.strong_coupling_warning:
        raise StrongCouplingRegime(
            "frequency matching is defined for weak coupling (all g <= kappa/2)")

    grid = np.linspace(lo, hi, grid_points)
    diffs = np.empty_like(grid)
    for idx, d in enumerate(grid):
        back = nu_pair(d)
        diffs[idx] = back.nu[i] - back.nu[j]

    scale = max(m.omega for m in system.modes)
    if np.max(np.abs(diffs)) < 1e-12 * scale:
        warnings.warn("degenerate pair: effective frequencies identical over the "
                      "whole range; no isolated matching detunings", stacklevel=2)
        return []

    points = []
    sign = np.sign(diffs)
    for idx in np.nonzero(np.diff(sign) != 0)[0]:
        a, b = grid[idx], grid[idx + 1]
        fa = diffs[idx]
        if fa == 0.0:
            root = a
        else:
            while (b - a) > tol:
                m = 0.5 * (a + b)
                back = nu_pair(m)
                fm = back.nu[i] - back.nu[j]
                if fm == 0.0:
                    a = b = m
                    break
                if fa * fm < 0:
                    b = m
                else:
                    a, fa = m, fm
            root = 0.5 * (a + b)
        back = nu_pair(root)
        nu = 0.5 * (back.nu[i] + back.nu[j])
        oc = 0.5 * (back.omega_c[i, j] + back.omega_c[j, i])
        gc = 0.5 * (back.gamma_c[i, j] + back.gamma_c[j, i])
        dist = min(abs(root + nu), abs(root - nu)) / kappa
        points.append(MatchPoint(
            delta_bar=root,
            nu=nu,
            side=Side.RED if root < 0 else Side.BLUE,
            location=(Location.SIDEBAND_CENTER if dist <= center_threshold
                      else Location.WING),
            dominant=(Dominant.COHERENT if abs(oc) > coherent_threshold * abs(gc)
                      else Dominant.COLD_DAMPING),
            omega_c=oc,
            gamma_c=gc,
        ))
    points.sort(key=lambda p: p.delta_bar)
    return points
