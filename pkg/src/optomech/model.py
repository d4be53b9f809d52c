"""System configuration, unit handling, validation, and regime flags.

Configuration files carry ordinary frequencies in Hz; everything internal
is angular (rad/s). Conversion happens exactly once, in ``load_config``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

from .errors import ScenarioError, ValidationError

TWO_PI = 2.0 * math.pi

SCHEMA_VERSION = 1


class CouplingKind(enum.Enum):
    LINEAR = "linear"
    QUADRATIC_MAXIMA = "quadratic_maxima"
    QUADRATIC_MINIMA = "quadratic_minima"


@dataclass(frozen=True)
class MechanicalMode:
    """One mechanical oscillator.

    omega, gamma and coupling are angular rates (rad/s). ``coupling`` is
    the signed single-photon constant (linear or quadratic depending on
    the system's CouplingKind), or the amplified coupling g_j when the
    system is declared with ``couplings_amplified``.
    """

    omega: float
    gamma: float
    coupling: float
    n_th: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValidationError("mode omega must be > 0", field="omega")
        if self.gamma < 0:
            raise ValidationError("mode gamma must be >= 0", field="gamma")
        if self.n_th < 0:
            raise ValidationError("mode n_th must be >= 0", field="n_th")


@dataclass(frozen=True)
class CavityConfig:
    """Cavity decay rate, bare pump-cavity detuning and drive amplitude.

    The drive phase is chosen so the steady cavity amplitude is real at
    zero effective detuning; only |eta| enters anywhere.
    """

    kappa: float
    delta_c: float
    eta: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValidationError("cavity kappa must be > 0", field="kappa")
        if self.eta < 0:
            raise ValidationError("cavity eta must be >= 0", field="eta")


@dataclass(frozen=True)
class SystemConfig:
    """Cavity plus an ordered list of mechanical modes.

    All modes share one coupling kind. For quadratic kinds the sign of
    every coupling must agree with the kind (maxima: negative, minima:
    positive). ``sign_choice`` selects the reported branch of the
    degenerate displaced steady states at field maxima.

    ``couplings_amplified`` declares that mode couplings are already the
    amplified values g_j = g0_j * sqrt(n_c); mean-field solvers then
    require no drive, and photon-number-dependent quantities use the
    couplings as given.
    """

    cavity: CavityConfig
    modes: tuple
    coupling_kind: CouplingKind = CouplingKind.LINEAR
    sign_choice: tuple = ()
    couplings_amplified: bool = False

    def __post_init__(self):
        modes = tuple(self.modes)
        object.__setattr__(self, "modes", modes)
        if not modes:
            raise ValidationError("at least one mechanical mode required", field="modes")
        sign = tuple(self.sign_choice) if self.sign_choice else tuple(1 for _ in modes)
        if len(sign) != len(modes) or any(s not in (-1, 1) for s in sign):
            raise ValidationError("sign_choice must hold +-1 per mode", field="sign_choice")
        object.__setattr__(self, "sign_choice", sign)
        couplings = [m.coupling for m in modes]
        if self.coupling_kind is CouplingKind.QUADRATIC_MAXIMA and any(c >= 0 for c in couplings):
            raise ValidationError(
                "coupling_kind/sign mismatch: quadratic_maxima requires all couplings < 0",
                field="coupling_kind")
        if self.coupling_kind is CouplingKind.QUADRATIC_MINIMA and any(c <= 0 for c in couplings):
            raise ValidationError(
                "coupling_kind/sign mismatch: quadratic_minima requires all couplings > 0",
                field="coupling_kind")

    @property
    def n_modes(self):
        return len(self.modes)

    def amplified_couplings(self, n_c):
        """Amplified couplings g_j (or g^(2)_j) at photon number n_c."""
        if self.couplings_amplified:
            return [m.coupling for m in self.modes]
        root = math.sqrt(n_c)
        return [m.coupling * root for m in self.modes]

    def with_gammas(self, gamma):
        """Copy with every mode's gamma replaced (scenario convenience)."""
        return replace(self, modes=tuple(replace(m, gamma=gamma) for m in self.modes))


@dataclass(frozen=True)
class RegimeReport:
    """Coupling/linewidth ratios and the regime flags derived from them."""

    g_over_kappa: tuple
    omega_over_kappa: tuple
    resolved_sideband: bool
    doppler: bool
    weak_coupling: bool
    strong_coupling_warning: bool
    blue_detuned_warning: bool


def bare_photon_number(cavity: CavityConfig, delta_bar):
    """Intracavity photon number |eta|^2 / (delta^2 + kappa^2/4)."""
    return cavity.eta**2 / (delta_bar**2 + cavity.kappa**2 / 4.0)


def invert_drive_for_photon_number(kappa, delta_bar, n_c):
    """Drive amplitude eta giving photon number n_c at effective detuning delta_bar."""
    return math.sqrt(n_c * (delta_bar**2 + kappa**2 / 4.0))


def classify_regime(system: SystemConfig, delta_bar) -> RegimeReport:
    """Classify sideband resolution and coupling strength at a working point.

    Resolved sideband: every mode frequency exceeds kappa. Doppler: every
    mode frequency is below kappa. Weak coupling is the complement of the
    strong-coupling warning (any g_j > kappa/2), where g_j is the
    amplified coupling at the photon number implied by ``delta_bar``.
    """
    kappa = system.cavity.kappa
    if system.couplings_amplified:
        gs = [abs(m.coupling) for m in system.modes]
    else:
        n_c = bare_photon_number(system.cavity, delta_bar)
        gs = [abs(g) for g in system.amplified_couplings(n_c)]
    omegas = [m.omega for m in system.modes]
    strong = any(g > kappa / 2.0 for g in gs)
    return RegimeReport(
        g_over_kappa=tuple(g / kappa for g in gs),
        omega_over_kappa=tuple(w / kappa for w in omegas),
        resolved_sideband=min(omegas) > kappa,
        doppler=max(omegas) < kappa,
        weak_coupling=not strong,
        strong_coupling_warning=strong,
        blue_detuned_warning=delta_bar > 0,
    )


# ----------------------------------------------------------------- file I/O

_CAVITY_KEYS = {"kappa_hz", "delta_c_hz", "eta_hz", "photon_number", "at_detuning_hz"}
_MODE_KEYS = {"omega_hz", "gamma_hz", "coupling_hz", "n_th"}
_SYSTEM_KEYS = {"schema_version", "cavity", "modes", "coupling_kind", "sign_choice",
                "couplings_amplified"}


def _reject_unknown(mapping, allowed, where):
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioError(f"unknown keys in {where}: {sorted(unknown)}",
                            field=where)


def system_from_dict(data: dict) -> SystemConfig:
    """Build a SystemConfig from the documented JSON dictionary (Hz units)."""
    if not isinstance(data, dict):
        raise ScenarioError("system block must be an object", field="system")
    _reject_unknown(data, _SYSTEM_KEYS, "system")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {version}", field="schema_version")

    cav = data.get("cavity")
    if not isinstance(cav, dict):
        raise ScenarioError("system.cavity block required", field="cavity")
    _reject_unknown(cav, _CAVITY_KEYS, "cavity")
    kappa = TWO_PI * float(cav["kappa_hz"])
    delta_c = TWO_PI * float(cav.get("delta_c_hz", 0.0))
    if "eta_hz" in cav and "photon_number" in cav:
        raise ScenarioError("give either eta_hz or photon_number, not both", field="cavity")
    if "photon_number" in cav:
        at = TWO_PI * float(cav.get("at_detuning_hz", cav.get("delta_c_hz", 0.0)))
        eta = invert_drive_for_photon_number(kappa, at, float(cav["photon_number"]))
    else:
        eta = TWO_PI * float(cav.get("eta_hz", 0.0))
    cavity = CavityConfig(kappa=kappa, delta_c=delta_c, eta=eta)

    raw_modes = data.get("modes")
    if not isinstance(raw_modes, list) or not raw_modes:
        raise ScenarioError("system.modes must be a non-empty list", field="modes")
    modes = []
    for i, rm in enumerate(raw_modes):
        _reject_unknown(rm, _MODE_KEYS, f"modes[{i}]")
        modes.append(MechanicalMode(
            omega=TWO_PI * float(rm["omega_hz"]),
            gamma=TWO_PI * float(rm.get("gamma_hz", 0.0)),
            coupling=TWO_PI * float(rm["coupling_hz"]),
            n_th=float(rm.get("n_th", 0.0)),
        ))

    kind = CouplingKind(data.get("coupling_kind", "linear"))
    return SystemConfig(
        cavity=cavity,
        modes=tuple(modes),
        coupling_kind=kind,
        sign_choice=tuple(data.get("sign_choice", ())),
        couplings_amplified=bool(data.get("couplings_amplified", False)),
    )


def system_to_dict(system: SystemConfig) -> dict:
    """Inverse of ``system_from_dict`` (angular back to Hz)."""
    return {
        "schema_version": SCHEMA_VERSION,
        "cavity": {
            "kappa_hz": system.cavity.kappa / TWO_PI,
            "delta_c_hz": system.cavity.delta_c / TWO_PI,
            "eta_hz": system.cavity.eta / TWO_PI,
        },
        "modes": [
            {
                "omega_hz": m.omega / TWO_PI,
                "gamma_hz": m.gamma / TWO_PI,
                "coupling_hz": m.coupling / TWO_PI,
                "n_th": m.n_th,
            }
            for m in system.modes
        ],
        "coupling_kind": system.coupling_kind.value,
        "sign_choice": list(system.sign_choice),
        "couplings_amplified": system.couplings_amplified,
    }


def load_config(path) -> SystemConfig:
    """Load and validate a system configuration file (JSON, Hz units)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ScenarioError(f"config file not found: {path}", path=str(path))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"config file is not valid JSON: {exc}", path=str(path))
    try:
        return system_from_dict(data)
    except KeyError as exc:
        raise ScenarioError(f"missing required key {exc}", path=str(path))


def dump_config(system: SystemConfig, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(system_to_dict(system), fh, indent=2, sort_keys=True)
        fh.write("\n")
