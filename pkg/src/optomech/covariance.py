"""Stationary covariance matrix from the Lyapunov equation, phonon number,
and the closed-form cooling limits.

The 4x4 Lyapunov equation A V + V A^T = -D is solved by Kronecker
vectorization: (I (x) A + A (x) I) vec(V) = -vec(D) as a 16x16 dense system.
At this size the direct solve is exact and the conditioning is surfaced
explicitly; near branch termination (eta ~ 0) the problem is genuinely
stiff, so badly conditioned solves carry a warning flag instead of failing.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import dynamics
from .dynamics import NumericalError
from .noise import phase_noise_spectrum, phase_noise_term

CONDITION_WARN = 1e12
RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True)
class CovarianceMatrix:
    matrix: np.ndarray        # symmetric 4x4, ordering (q, p, X, Y)
    residual: float           # ||A V + V A^T + D||_F / ||D||_F
    condition: float          # condition estimate of the vectorized system
    ill_conditioned: bool


def solve_lyapunov(a, d):
    """Unique symmetric stationary covariance for stable A.

    d may be a DiffusionMatrix or a raw 4x4 array.
    """
    a = np.asarray(a, dtype=float)
    dm = np.asarray(getattr(d, "matrix", d), dtype=float)
    if not dynamics.stability(a):
        raise ValueError(
            "Lyapunov solve requires a stable drift matrix (max Re "
            f"eigenvalue = {dynamics.max_eigenvalue_real_part(a):.3e})")
    k = np.kron(np.eye(4), a) + np.kron(a, np.eye(4))
    try:
        v = np.linalg.solve(k, -dm.flatten(order="F")).reshape((4, 4),
                                                               order="F")
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"vectorized Lyapunov solve failed: {exc}") from exc
    v = 0.5 * (v + v.T)
    d_norm = np.linalg.norm(dm)
    res = np.linalg.norm(a @ v + v @ a.T + dm) / d_norm if d_norm > 0 else 0.0
    if res > RESIDUAL_RTOL:
        raise NumericalError(
            f"Lyapunov residual {res:.3e} exceeds tolerance {RESIDUAL_RTOL:.1e}")
    cond = float(np.linalg.cond(k))
    return CovarianceMatrix(matrix=v, residual=float(res), condition=cond,
                            ill_conditioned=bool(cond > CONDITION_WARN))


def integrate_lyapunov_ode(a, d, v0, t_final, rtol=1e-10, atol=1e-12,
                           stationary_tol=1e-9, method="RK45"):
    """Time-integrate dV/dt = A V + V A^T + D to its stationary point.

    Test-side oracle for solve_lyapunov; not used in the production path.
    """
    a = np.asarray(a, dtype=float)
    dm = np.asarray(getattr(d, "matrix", d), dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if not dynamics.stability(a):
        raise ValueError("integration to a stationary point requires stable A")

    def rhs(_t, y):
        v = y.reshape(4, 4)
        return (a @ v + v @ a.T + dm).ravel()

    sol = solve_ivp(rhs, (0.0, t_final), v0.ravel(), rtol=rtol, atol=atol,
                    method=method, dense_output=False)
    if not sol.success:
        raise NumericalError(f"covariance ODE integration failed: {sol.message}")
    v = sol.y[:, -1].reshape(4, 4)
    drift = np.linalg.norm(a @ v + v @ a.T + dm)
    scale = max(np.linalg.norm(dm), 1.0)
    if drift > stationary_tol * scale:
        raise NumericalError(
            f"covariance ODE not stationary at t = {t_final:.3e}: "
            f"||dV/dt|| = {drift:.3e}")
    return CovarianceMatrix(matrix=0.5 * (v + v.T), residual=float(drift / scale),
                            condition=float("nan"), ill_conditioned=False)


def phonon_number(v, clamp=True):
    """Mechanical occupation (V11 + V22 - 1)/2 from the covariance matrix.

    Small negative values from floating error are clamped at 0 unless
    clamp=False (sweep records keep the raw value too).
    """
    m = np.asarray(getattr(v, "matrix", v), dtype=float)
    raw = 0.5 * (m[0, 0] + m[1, 1] - 1.0)
    return max(0.0, raw) if clamp else raw


@dataclass(frozen=True)
class CoolingLimits:
    """Closed-form phonon-number limits for the resolved-sideband regime.

    sideband_limit:       kappa^2 / 4 omega_m^2 (no phase noise)
    with_exact_noise:     adds N/4kappa with N from the full resolvent
    with_resonant_noise:  adds N/4kappa with the Delta = omega_m closed form
    with_spectral_noise:  adds |alpha_s|^2 S(omega_m) / 2kappa
    """

    sideband_limit: float
    with_exact_noise: float
    with_resonant_noise: float
    with_spectral_noise: float


def phonon_asymptotic(params, derived, nm, steady):
    """Evaluate all cooling-limit variants at an operating point.

    Formulas are evaluated unconditionally; they are meaningful only for
    eta ~ 1, kappa << omega_m and effective detuning near omega_m.
    """
    kappa = params.cavity_decay
    wm = params.mechanical_freq
    n_cav = abs(steady.alpha_s) ** 2
    base = kappa * kappa / (4.0 * wm * wm)

    a = dynamics.drift_matrix(steady, params)
    n_exact = phase_noise_term(a, steady.alpha_s, nm)
    gc = nm.correlation_rate
    n_resonant = (2.0 * n_cav * nm.linewidth * gc * (gc + kappa)
                  / (wm * wm + (gc + kappa) ** 2))
    spectral = n_cav * phase_noise_spectrum(wm, nm) / (2.0 * kappa)
    return CoolingLimits(
        sideband_limit=base,
        with_exact_noise=base + n_exact / (4.0 * kappa),
        with_resonant_noise=base + n_resonant / (4.0 * kappa),
        with_spectral_noise=base + spectral,
    )
