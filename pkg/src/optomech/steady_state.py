"""Nonlinear steady state of the driven cavity: branch enumeration from the
cubic in the intracavity photon number, bistability parameter, hysteresis.

Phase gauge: the intracavity amplitude returned in `alpha_s` is the complex
value E/(kappa + i*Delta); all linearized matrices use its modulus (the
quadrature phase reference is rotated so the enhanced coupling is real and
non-negative).
"""

from dataclasses import dataclass, replace
from typing import NamedTuple
import math

import numpy as np

from . import dynamics
from .dynamics import NumericalError
from .params import derive

RESIDUAL_RTOL = 1e-12    # on the cubic residual, relative to its largest term
ROOT_IMAG_RTOL = 1e-7    # imaginary part tolerance for accepting a real root


@dataclass(frozen=True)
class SteadyState:
    alpha_s: complex            # intracavity amplitude E/(kappa + i Delta)
    q_s: float                  # static mirror displacement (dimensionless)
    p_s: float                  # always 0
    effective_detuning: float   # Delta = Delta0 - g0*q_s (rad/s)
    enhanced_coupling: float    # G = sqrt(2)*g0*|alpha_s| (rad/s)
    bistability_eta: float
    branch_index: int
    stable: bool

    @property
    def intracavity_n(self):
        return abs(self.alpha_s) ** 2


class TracePoint(NamedTuple):
    power: float
    intracavity_n: float
    branch_index: int
    eta: float


@dataclass(frozen=True)
class HysteresisTrace:
    up: list
    down: list


def bistability_parameter(g, delta, kappa, omega_m):
    """1 - G^2 Delta / (omega_m (kappa^2 + Delta^2)), unclamped.

    Equals 1 for a decoupled system and 0 at the end of a stable branch.
    """
    if omega_m <= 0.0:
        raise ValueError(f"omega_m must be > 0, got {omega_m}")
    if kappa <= 0.0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    return 1.0 - g * g * delta / (omega_m * (kappa * kappa + delta * delta))


def _cubic_real_roots(b, delta0, kappa, e_drive):
    """Real non-negative roots n of  n[kappa^2 + (delta0 - b n)^2] = E^2.

    b = g0^2/omega_m.  Expanded: b^2 n^3 - 2 delta0 b n^2
    + (kappa^2 + delta0^2) n - E^2 = 0.  Roots come from the companion
    matrix (np.roots) polished by one or two Newton steps.
    """
    cc = kappa * kappa + delta0 * delta0
    e2 = e_drive * e_drive
    if e2 == 0.0:
        return [0.0]
    if b == 0.0:
        return [e2 / cc]

    coeffs = [b * b, -2.0 * delta0 * b, cc, -e2]
    roots = np.roots(coeffs)

    def f(n):
        return ((b * b * n - 2.0 * delta0 * b) * n + cc) * n - e2

    def fp(n):
        return (3.0 * b * b * n - 4.0 * delta0 * b) * n + cc

    out = []
    for r in roots:
        scale = abs(r.real) + e2 / cc
        if abs(r.imag) > ROOT_IMAG_RTOL * scale:
            continue
        n = r.real
        for _ in range(2):
            d = fp(n)
            if d != 0.0:
                n -= f(n) / d
        if n < 0.0:
            if n > -ROOT_IMAG_RTOL * scale:
                n = 0.0
            else:
                continue
        res_scale = max(b * b * n ** 3, abs(2.0 * delta0 * b) * n * n,
                        cc * n, e2)
        if abs(f(n)) > RESIDUAL_RTOL * res_scale:
            raise NumericalError(
                f"cubic root polish did not converge: residual {f(n):.3e} "
                f"(scale {res_scale:.3e}) at n = {n:.6e}")
        out.append(n)
    return sorted(out)


def _build_state(n, params, derived, branch_index):
    g0 = derived.single_photon_coupling
    wm = params.mechanical_freq
    kappa = params.cavity_decay
    delta = params.detuning_zero - g0 * g0 * n / wm
    alpha = derived.drive_amplitude / (kappa + 1j * delta)
    g = math.sqrt(2.0) * g0 * math.sqrt(n)
    eta = bistability_parameter(g, delta, kappa, wm)
    ss = SteadyState(alpha_s=alpha, q_s=g0 * n / wm, p_s=0.0,
                     effective_detuning=delta, enhanced_coupling=g,
                     bistability_eta=eta, branch_index=branch_index,
                     stable=False)
    stable = dynamics.stability(dynamics.drift_matrix(ss, params))
    return replace(ss, stable=stable)


def solve_branches(params, derived):
    """All steady-state branches, sorted ascending by intracavity power."""
    b = derived.single_photon_coupling ** 2 / params.mechanical_freq
    roots = _cubic_real_roots(b, params.detuning_zero, params.cavity_decay,
                              derived.drive_amplitude)
    return [_build_state(n, params, derived, i) for i, n in enumerate(roots)]


def branch_at_detuning(params, derived, delta_eff):
    """The unique steady state with a prescribed effective detuning.

    Sweeping the effective detuning directly sidesteps the multivalued
    bare-detuning map: n = E^2/(kappa^2 + Delta^2) is single-valued in Delta.
    """
    kappa = params.cavity_decay
    g0 = derived.single_photon_coupling
    wm = params.mechanical_freq
    n = derived.drive_amplitude ** 2 / (kappa * kappa + delta_eff * delta_eff)
    alpha = derived.drive_amplitude / (kappa + 1j * delta_eff)
    g = math.sqrt(2.0) * g0 * math.sqrt(n)
    eta = bistability_parameter(g, delta_eff, kappa, wm)
    ss = SteadyState(alpha_s=alpha, q_s=g0 * n / wm, p_s=0.0,
                     effective_detuning=delta_eff, enhanced_coupling=g,
                     bistability_eta=eta, branch_index=0, stable=False)
    stable = dynamics.stability(dynamics.drift_matrix(ss, params))
    return replace(ss, stable=stable)


def _branches_at_power(params, power):
    p = replace(params, input_power=power)
    return p, solve_branches(p, derive(p))


def _closest(branches, n_ref, stable_only=True):
    cands = [b for b in branches if b.stable] if stable_only else branches
    if not cands:
        return None
    return min(cands, key=lambda b: abs(b.intracavity_n - n_ref))


def _refine_termination(params, p_inside, p_outside, n_ref, rtol=1e-9):
    """Bisect for the power where the occupied branch ceases to exist.

    p_inside has 3 roots (occupied branch alive), p_outside has 1.
    Returns (power, branch) just inside the window, where eta ~ 0.
    """
    lo, hi = p_inside, p_outside
    best = None
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        _, branches = _branches_at_power(params, mid)
        if len(branches) == 3:
            lo = mid
            best = _closest(branches, n_ref, stable_only=False)
            if best is not None:
                n_ref = best.intracavity_n
        else:
            hi = mid
        if abs(hi - lo) <= rtol * max(abs(hi), abs(lo)):
            break
    return lo, best


def hysteresis_sweep(params, p_range):
    """Up then down power sweep with continuity branch tracking.

    On each leg the occupied branch is followed until it terminates; the
    refined termination point (where eta -> 0) is inserted into the trace
    before the jump to the other stable branch.
    """
    p_range = list(p_range)
    if len(p_range) < 2 or any(b <= a for a, b in zip(p_range, p_range[1:])):
        raise ValueError("p_range must be strictly monotone ascending")

    def leg(powers, start_low):
        pts = []
        n_prev = None
        prev_power = None
        prev_roots = None
        for power in powers:
            try:
                _, branches = _branches_at_power(params, power)
            except NumericalError as exc:
                raise NumericalError(f"at power {power:.6e} W: {exc}") from exc
            if n_prev is None:
                stable = [b for b in branches if b.stable]
                pick = (stable[0] if start_low else stable[-1]) if stable else None
            else:
                pick = _closest(branches, n_prev)
            if pick is None:
                raise NumericalError(
                    f"no stable branch at power {power:.6e} W")
            # the occupied branch terminated if, across a 3 -> 1 root-count
            # transition, the surviving root continues a different branch
            if (n_prev is not None and prev_roots is not None and
                    len(prev_roots) == 3 and len(branches) == 1):
                survived = min(prev_roots,
                               key=lambda n: abs(n - pick.intracavity_n))
                occupied = min(prev_roots, key=lambda n: abs(n - n_prev))
                if survived != occupied:
                    p_term, term = _refine_termination(params, prev_power,
                                                       power, n_prev)
                    if term is not None:
                        pts.append(TracePoint(p_term, term.intracavity_n,
                                              term.branch_index,
                                              term.bistability_eta))
            pts.append(TracePoint(power, pick.intracavity_n,
                                  pick.branch_index, pick.bistability_eta))
            n_prev = pick.intracavity_n
            prev_power = power
            prev_roots = [b.intracavity_n for b in branches]
        return pts

    return HysteresisTrace(up=leg(p_range, start_low=True),
                           down=leg(p_range[::-1], start_low=False))
