"""Storage and release of single-photon wave packets in the dark state of an
intracavity EIT medium: reduced and full amplitude dynamics, drive-schedule
synthesis for impedance-matched loading, storage cycles and a classical
Fabry-Perot cross-check."""

from .errors import (ConvergenceError, DomainError, GridMismatchError, InfeasibleError,
                     SingularityError, TruncationError)
from .model import (AmplitudeState, MixingAngle, SystemParams, dark_bright_rotate,
                    dark_state_decay_rate, mixing_angle_from_omega, omega_from_cos_theta)
from .pulses import (PulseEnvelope, TimeGrid, make_gaussian, make_hyper_gaussian, make_pulse,
                     make_sech, shift)
from .control import (ControlSchedule, check_adiabaticity, sech_matched_cos_theta,
                      sech_matched_omega, solve_impedance_matching)
from .reduced import (integrate_dark_state, loading_output, quadrature_solution,
                      timing_sensitivity)
from .cycle import (CyclePlan, CycleResult, PolarizationState, release_envelope, run_cycle,
                    run_polarization_cycle)

__version__ = "0.1.0"
