"""Linearized quadrature dynamics: 4x4 drift matrix, its exponential,
stability test and the resolvent entry used by the phase-noise correction.

Quadrature ordering is (q, p, X, Y): mirror position/momentum, then cavity
amplitude/phase.
"""

import numpy as np
from scipy.linalg import expm


class NumericalError(RuntimeError):
    pass


def drift_matrix(steady, params):
    """Drift matrix of the linearized fluctuation dynamics.

    `steady` supplies the enhanced coupling G and effective detuning Delta,
    `params` supplies omega_m, gamma_m, kappa.
    """
    wm = params.mechanical_freq
    gm = params.mechanical_damping
    kappa = params.cavity_decay
    g = steady.enhanced_coupling
    delta = steady.effective_detuning
    return np.array([
        [0.0,  wm,    0.0,    0.0],
        [-wm,  -gm,   g,      0.0],
        [0.0,  0.0,   -kappa, delta],
        [g,    0.0,   -delta, -kappa],
    ])


def matrix_exponential(a, t):
    """exp(A t) via scaling-and-squaring with Pade approximation."""
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    a = np.asarray(a, dtype=float)
    return expm(a * t)


def stability(a):
    """True iff every eigenvalue of A has real part below -1e-9*||A||.

    The margin scales with the matrix norm so the test is unit-robust;
    marginal (purely oscillatory) systems count as unstable.
    """
    a = np.asarray(a, dtype=float)
    try:
        eig = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc
    margin = 1e-9 * np.linalg.norm(a)
    return bool(np.max(eig.real) < -margin)


def max_eigenvalue_real_part(a):
    return float(np.max(np.linalg.eigvals(np.asarray(a, dtype=float)).real))


def resolvent_entry_44(a, gamma_c):
    """Entry (4,4) of (gamma_c*I - A)^-1, the Y-Y component.

    Equals the Laplace transform of [exp(A s)]_{44} at gamma_c; valid for
    stable A and gamma_c > 0.
    """
    if gamma_c <= 0.0:
        raise ValueError(f"gamma_c must be > 0, got {gamma_c}")
    a = np.asarray(a, dtype=float)
    if not stability(a):
        raise ValueError(
            "resolvent requires a stable drift matrix "
            f"(max Re eigenvalue = {max_eigenvalue_real_part(a):.3e})")
    rhs = np.zeros(4)
    rhs[3] = 1.0
    try:
        col = np.linalg.solve(gamma_c * np.eye(4) - a, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"resolvent solve failed: {exc}") from exc
    return float(col[3])
