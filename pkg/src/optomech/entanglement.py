"""Logarithmic negativity of the stationary two-mode Gaussian state.

Block convention: rows/cols (1,2) are the mechanical mode, (3,4) the optical
mode, matching the (q, p, X, Y) quadrature ordering used everywhere else.
Determinants use explicit cofactor formulas so the branch-point clamp is
bit-reproducible.
"""

from dataclasses import dataclass
import math

import numpy as np

BRANCH_CLAMP_RTOL = 1e-12


@dataclass(frozen=True)
class EntanglementResult:
    nu_min: float             # smallest symplectic eigenvalue of the PT state
    log_negativity: float     # max{0, -ln(2 nu_min)}
    sigma: float              # det(mech) + det(opt) - 2 det(corr)
    det_mech: float
    det_opt: float
    det_corr: float
    det_full: float


def _det2(m):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def _det3(m):
    return (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))


def _det4(m):
    total = 0.0
    for j in range(4):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1.0) ** j * m[0, j] * _det3(minor)
    return total


def log_negativity(v):
    """Logarithmic negativity and the symplectic invariants behind it.

    nu_min = sqrt((sigma - sqrt(sigma^2 - 4 det V))/2) with
    sigma = det A + det B - 2 det C for blocks V = [[A, C], [C^T, B]];
    entanglement iff nu_min < 1/2 in this (vacuum variance 1/2) convention.
    """
    m = np.asarray(getattr(v, "matrix", v), dtype=float)
    det_mech = _det2(m[:2, :2])
    det_opt = _det2(m[2:, 2:])
    det_corr = _det2(m[:2, 2:])
    det_full = _det4(m)
    sigma = det_mech + det_opt - 2.0 * det_corr

    disc = sigma * sigma - 4.0 * det_full
    if disc < 0.0:
        if disc < -BRANCH_CLAMP_RTOL * sigma * sigma:
            raise ValueError(
                f"unphysical covariance matrix: sigma^2 - 4 det V = {disc:.3e}")
        disc = 0.0
    nu_sq = 0.5 * (sigma - math.sqrt(disc))
    if nu_sq <= 0.0:
        raise ValueError(
            f"unphysical covariance matrix: nu_min^2 = {nu_sq:.3e} <= 0")
    nu_min = math.sqrt(nu_sq)
    e_n = max(0.0, -math.log(2.0 * nu_min))
    return EntanglementResult(nu_min=nu_min, log_negativity=e_n, sigma=sigma,
                              det_mech=det_mech, det_opt=det_opt,
                              det_corr=det_corr, det_full=det_full)
