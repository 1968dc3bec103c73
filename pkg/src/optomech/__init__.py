"""Steady-state solver for a driven optomechanical cavity with laser phase
noise: bistable branch structure, stationary covariance matrix from the
Lyapunov equation with a phase-noise-corrected diffusion matrix, phonon
occupation and logarithmic negativity."""

from .params import (PhysicalConstants, SystemParams, DerivedParams, derive,
                     thermal_occupation)
from .steady_state import (SteadyState, HysteresisTrace, solve_branches,
                           branch_at_detuning, bistability_parameter,
                           hysteresis_sweep)
from .dynamics import (drift_matrix, matrix_exponential, stability,
                       resolvent_entry_44, NumericalError)
from .noise import (NoiseModel, DiffusionMatrix, phase_noise_spectrum,
                    phase_noise_term, diffusion_matrix)
from .covariance import (CovarianceMatrix, CoolingLimits, solve_lyapunov,
                         integrate_lyapunov_ode, phonon_number,
                         phonon_asymptotic)
from .entanglement import EntanglementResult, log_negativity
from .sweep import (SweepAxis, SweepConfig, run_sweep, emit, read_records,
                    regrid_eta_detuning, parse_config, build_config)

__version__ = "0.1.0"
