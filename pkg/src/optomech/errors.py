"""Exception types shared across the package.

Validation problems (bad config, bad scenario) map to CLI exit code 2,
numerical failures (instability, non-convergence, step control) to exit
code 3.
"""


class OptomechError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class ValidationError(OptomechError):
    """A configuration or argument violates an invariant."""

    exit_code = 2

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ScenarioError(ValidationError):
    """A scenario file is missing, malformed, or has unknown keys."""

    def __init__(self, message, path=None, field=None):
        super().__init__(message, field=field)
        self.path = path


class NonConvergence(OptomechError):
    """An iterative solve failed to converge within its iteration cap."""


class MultivaluedFrequency(OptomechError):
    """The self-consistent frequency equation has several fixed points.

    Carries all branches found; interpreting them requires the hybridized
    (strong coupling) treatment, which is out of scope.
    """

    def __init__(self, message, branches=None):
        super().__init__(message)
        self.branches = branches if branches is not None else []


class DegenerateCoupling(OptomechError):
    """A cross-coupling ratio g_jk is ill-defined (zero denominator)."""


class StrongCouplingRegime(ValidationError):
    """Requested operation is only valid in the weak-coupling regime."""


class MismatchedFrequencies(OptomechError):
    """A drift variant requiring matched effective frequencies was asked
    to operate on modes whose frequencies differ beyond tolerance."""


class UnstableDrift(OptomechError):
    """The drift matrix has an eigenvalue with nonnegative real part, so
    no steady state exists (heating / blue-detuned amplification)."""


class StepTooLarge(OptomechError):
    """The integrator step size violates its stability/accuracy bound."""


class AmplitudeOverflow(OptomechError):
    """A semiclassical trajectory grew beyond the instability threshold."""


class UnphysicalState(OptomechError):
    """A Gaussian state violates the symplectic uncertainty floor."""
