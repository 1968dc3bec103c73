"""Physical inputs, constants and derived single-photon quantities.

All internal frequencies are angular (rad/s).  Configuration files and CLI
flags carry ordinary frequencies in Hz; the loader multiplies by 2*pi at the
boundary (see sweep module).
"""

from dataclasses import dataclass
import math

# CODATA 2018 exact values
HBAR = 1.054571817e-34      # J s
KBOLTZ = 1.380649e-23       # J/K
CLIGHT = 299792458.0        # m/s


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR
    boltzmann: float = KBOLTZ
    light_speed: float = CLIGHT


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs for the cavity + mirror + drive + bath system.

    cavity_length   L (m)
    mirror_mass     m (kg)
    mechanical_freq omega_m (rad/s)
    mechanical_damping gamma_m (rad/s)
    cavity_decay    kappa (rad/s)
    laser_wavelength lambda (m)
    input_power     P (W)
    detuning_zero   bare detuning omega_c - omega_L (rad/s), any sign
    bath_temperature T (K)
    """

    cavity_length: float
    mirror_mass: float
    mechanical_freq: float
    mechanical_damping: float
    cavity_decay: float
    laser_wavelength: float
    input_power: float
    detuning_zero: float
    bath_temperature: float

    def __post_init__(self):
        for name in ("cavity_length", "mirror_mass", "mechanical_freq",
                     "cavity_decay", "laser_wavelength"):
            v = getattr(self, name)
            if not v > 0.0:
                raise ValueError(f"{name} must be strictly positive, got {v}")
        if self.input_power < 0.0:
            raise ValueError(f"input_power must be >= 0, got {self.input_power}")
        if self.mechanical_damping < 0.0:
            raise ValueError(
                f"mechanical_damping must be >= 0, got {self.mechanical_damping}")
        if self.bath_temperature < 0.0:
            raise ValueError(
                f"bath_temperature must be >= 0, got {self.bath_temperature}")


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived from SystemParams, all deterministic.

    laser_freq      omega_L = 2*pi*c/lambda (rad/s)
    cavity_freq     omega_c = omega_L + detuning_zero (rad/s)
    single_photon_coupling  g0 = (omega_c/L) sqrt(hbar/(m omega_m)) (rad/s)
    drive_amplitude e = sqrt(2 P kappa / (hbar omega_L)) (rad/s)
    thermal_occupation  mean bath phonon number (dimensionless)
    """

    laser_freq: float
    cavity_freq: float
    single_photon_coupling: float
    drive_amplitude: float
    thermal_occupation: float


def thermal_occupation(omega_m, temperature, consts=PhysicalConstants()):
    """Mean thermal phonon number 1/(exp(hbar w/kT) - 1); 0 at T = 0."""
    if omega_m <= 0.0:
        raise ValueError(f"omega_m must be > 0, got {omega_m}")
    if temperature < 0.0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    x = consts.hbar * omega_m / (consts.boltzmann * temperature)
    return 1.0 / math.expm1(x)


def derive(params: SystemParams, consts=PhysicalConstants()) -> DerivedParams:
    """Compute laser/cavity frequencies, couplings and bath occupation."""
    omega_l = 2.0 * math.pi * consts.light_speed / params.laser_wavelength
    omega_c = omega_l + params.detuning_zero
    g0 = (omega_c / params.cavity_length) * math.sqrt(
        consts.hbar / (params.mirror_mass * params.mechanical_freq))
    e_drive = math.sqrt(
        2.0 * params.input_power * params.cavity_decay / (consts.hbar * omega_l))
    nbar = thermal_occupation(params.mechanical_freq, params.bath_temperature,
                              consts)
    return DerivedParams(
        laser_freq=omega_l,
        cavity_freq=omega_c,
        single_photon_coupling=g0,
        drive_amplitude=e_drive,
        thermal_occupation=nbar,
    )
