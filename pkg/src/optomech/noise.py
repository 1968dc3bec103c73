"""Laser phase-noise model and the diffusion matrix.

The laser phase drifts as an Ornstein-Uhlenbeck process with linewidth
gamma_l and correlation rate gamma_c; its frequency-noise spectrum is a
Lorentzian of width gamma_c.  The phase noise enters the stationary noise
budget as an additive term n_corr on the cavity-phase diagonal of the
diffusion matrix.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import dynamics


@dataclass(frozen=True)
class NoiseModel:
    linewidth: float          # laser linewidth Gamma_L (rad/s)
    correlation_rate: float   # inverse correlation time gamma_c (rad/s)

    def __post_init__(self):
        if self.linewidth < 0.0:
            raise ValueError(f"linewidth must be >= 0, got {self.linewidth}")
        if not self.correlation_rate > 0.0:
            raise ValueError(
                "correlation_rate must be > 0 (take the white-noise limit "
                f"with a large finite value), got {self.correlation_rate}")


@dataclass(frozen=True)
class DiffusionMatrix:
    matrix: np.ndarray        # diag[0, gamma_m(2 nbar + 1), kappa, kappa + N]
    phase_noise_term: float   # the N component, kept separate for reporting


def phase_noise_spectrum(omega, nm: NoiseModel):
    """Frequency-noise spectral density 2*Gamma_L/(1 + omega^2/gamma_c^2)."""
    x = omega / nm.correlation_rate
    return 2.0 * nm.linewidth / (1.0 + x * x)


def phase_noise_term(a, alpha_s, nm: NoiseModel, method="resolvent"):
    """Phase-noise addition N to the cavity-phase diffusion entry.

    N = 2|alpha_s|^2 gamma_c Gamma_L * integral_0^inf [exp(A s)]_44
    e^(-gamma_c s) ds.  The resolvent method evaluates the integral in
    closed form; the quadrature method integrates it directly and exists
    as an independent cross-check.
    """
    a = np.asarray(a, dtype=float)
    if not dynamics.stability(a):
        raise ValueError(
            "phase-noise term requires a stable drift matrix (max Re "
            f"eigenvalue = {dynamics.max_eigenvalue_real_part(a):.3e})")
    n_cav = abs(alpha_s) ** 2
    prefactor = 2.0 * n_cav * nm.correlation_rate * nm.linewidth
    if prefactor == 0.0:
        return 0.0
    if method == "resolvent":
        integral = dynamics.resolvent_entry_44(a, nm.correlation_rate)
    elif method == "quadrature":
        integral = _quadrature_integral(a, nm.correlation_rate)
    else:
        raise ValueError(f"unknown method {method!r}")
    return prefactor * integral


def _quadrature_integral(a, gamma_c):
    # integrand decays like e^-(gamma_c + |max Re eig|) s; truncate where
    # the envelope is far below 1e-10 of the running scale
    rate = gamma_c - dynamics.max_eigenvalue_real_part(a)
    s_max = 40.0 / rate

    def integrand(s):
        return dynamics.matrix_exponential(a, s)[3, 3] * np.exp(-gamma_c * s)

    val, _ = quad(integrand, 0.0, s_max, limit=400, epsabs=0.0, epsrel=1e-11)
    return val


def diffusion_matrix(params, derived, n_term):
    """Diagonal diffusion matrix diag[0, gamma_m(2 nbar + 1), kappa, kappa+N]."""
    if n_term < 0.0:
        raise ValueError(f"phase-noise term must be >= 0, got {n_term}")
    gm = params.mechanical_damping
    kappa = params.cavity_decay
    nbar = derived.thermal_occupation
    d = np.diag([0.0, gm * (2.0 * nbar + 1.0), kappa, kappa + n_term])
    return DiffusionMatrix(matrix=d, phase_noise_term=float(n_term))
