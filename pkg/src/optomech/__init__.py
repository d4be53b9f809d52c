"""Optically mediated multimode optomechanics.

Mean-field steady states, radiation-pressure backaction, reduced Gaussian
covariance dynamics with a full linearized cavity+mechanics oracle,
detuning-matched two-mode state transfer under vacuum or squeezed input,
and semiclassical four-wave-mixing trajectories for quadratic coupling at
field minima.
"""

__version__ = "0.1.0"

from .backaction import (BackactionSet, doppler_shift_damping,
                         linear_shift_damping, quadratic_maxima_shift_damping,
                         quadratic_minima_coefficients,
                         self_consistent_frequencies)
from .calibration import C_MECH, C_OPT, calibrate_diffusion
from .dynamics import (DriftDiffusion, build_diffusion, build_drift,
                       dark_mode_analysis, evolve_covariance,
                       sample_covariance, steady_state_covariance)
from .errors import (AmplitudeOverflow, DegenerateCoupling,
                     MismatchedFrequencies, MultivaluedFrequency,
                     NonConvergence, OptomechError, ScenarioError,
                     StepTooLarge, StrongCouplingRegime, UnphysicalState,
                     UnstableDrift, ValidationError)
from .fullmodel import build_full, compare_reduced_full
from .fwm import TrajectoryEnsemble, integrate_fwm
from .gaussian import (GaussianState, coherent_state, join_states,
                       squeezed_state, symplectic_eigenvalues, thermal_state,
                       vacuum_state)
from .matching import MatchPoint, find_matching_detunings
from .meanfield import MeanFieldSolution, solve_linear, solve_quadratic
from .model import (CavityConfig, CouplingKind, MechanicalMode, RegimeReport,
                    SystemConfig, classify_regime, dump_config, load_config)
from .noise import NoiseModel, effective_noise_coefficient
from .transfer import (TransferScenario, gaussian_fidelity,
                       make_transfer_scenario, run_transfer, sweep_phase)
