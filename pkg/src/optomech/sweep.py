"""Parameter-grid sweeps over the full pipeline, CSV/JSON emission, and the
(eta, detuning) regridding used for entanglement maps.

Records are flat dicts with a fixed column order.  Grid evaluation is pure
per point, so points run on a worker pool and are collected back in
row-major grid order; serial and parallel runs produce identical output.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
import csv
import json
import math

import numpy as np

from . import covariance, dynamics, entanglement, noise, steady_state
from .params import SystemParams, derive
from .noise import NoiseModel

TWO_PI = 2.0 * math.pi

# config keys carrying ordinary frequencies in Hz, converted to rad/s on load
_PARAM_KEYS = {
    "length_m": ("cavity_length", 1.0),
    "mass_kg": ("mirror_mass", 1.0),
    "mechanical_freq_hz": ("mechanical_freq", TWO_PI),
    "mechanical_damping_hz": ("mechanical_damping", TWO_PI),
    "cavity_decay_hz": ("cavity_decay", TWO_PI),
    "wavelength_m": ("laser_wavelength", 1.0),
    "power_w": ("input_power", 1.0),
    "detuning_hz": ("detuning_zero", TWO_PI),
    "temperature_k": ("bath_temperature", 1.0),
}
_NOISE_KEYS = {
    "linewidth_hz": ("linewidth", TWO_PI),
    "correlation_rate_hz": ("correlation_rate", TWO_PI),
}

COLUMNS = [
    # inputs (internal units: rad/s for rates, SI otherwise)
    "cavity_length", "mirror_mass", "mechanical_freq", "mechanical_damping",
    "cavity_decay", "laser_wavelength", "input_power", "detuning_zero",
    "bath_temperature", "linewidth", "correlation_rate",
    # steady state
    "branch_index", "re_alpha", "im_alpha", "intracavity_n", "q_s",
    "effective_detuning", "enhanced_coupling", "eta", "stable",
    # noise
    "phase_noise_term", "phase_noise_over_kappa", "spectrum_at_mech_freq",
    # covariance (upper triangle) and phonon number
    "v11", "v12", "v13", "v14", "v22", "v23", "v24", "v33", "v34", "v44",
    "phonon_raw", "phonon", "condition", "condition_warning",
    # entanglement
    "log_negativity", "nu_min", "sigma",
    "error",
]


@dataclass(frozen=True)
class SweepAxis:
    name: str                 # one of the config keys above
    start: float              # in config units (Hz for frequencies)
    stop: float
    count: int
    scale: str = "linear"     # or "log"

    def values(self):
        if self.count < 1:
            raise ValueError(f"axis {self.name}: count must be >= 1")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError(f"axis {self.name}: range must be finite")
        if self.count == 1:
            return [self.start]
        if self.scale == "linear":
            return list(np.linspace(self.start, self.stop, self.count))
        if self.scale == "log":
            if self.start <= 0 or self.stop <= 0:
                raise ValueError(f"axis {self.name}: log scale needs > 0 range")
            return list(np.geomspace(self.start, self.stop, self.count))
        raise ValueError(f"axis {self.name}: unknown scale {self.scale!r}")


@dataclass(frozen=True)
class SweepConfig:
    params: SystemParams
    noise: NoiseModel
    axes: tuple = ()
    branch_policy: str = "all"      # all | lowest | continuity
    output_path: str = "sweep.csv"
    output_format: str = "csv"      # csv | json

    def __post_init__(self):
        if len(self.axes) > 2:
            raise ValueError("at most 2 sweep axes are supported")
        if self.branch_policy not in ("all", "lowest", "continuity"):
            raise ValueError(f"unknown branch policy {self.branch_policy!r}")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        known = set(_PARAM_KEYS) | set(_NOISE_KEYS)
        for ax in self.axes:
            if ax.name not in known:
                raise ValueError(f"unknown sweep axis {ax.name!r}")


def _apply(params, nm, name, value):
    if name in _PARAM_KEYS:
        attr, factor = _PARAM_KEYS[name]
        return replace(params, **{attr: factor * value}), nm
    attr, factor = _NOISE_KEYS[name]
    return params, replace(nm, **{attr: factor * value})


def _blank_record(params, nm):
    rec = {c: None for c in COLUMNS}
    rec.update(
        cavity_length=params.cavity_length, mirror_mass=params.mirror_mass,
        mechanical_freq=params.mechanical_freq,
        mechanical_damping=params.mechanical_damping,
        cavity_decay=params.cavity_decay,
        laser_wavelength=params.laser_wavelength,
        input_power=params.input_power, detuning_zero=params.detuning_zero,
        bath_temperature=params.bath_temperature,
        linewidth=nm.linewidth, correlation_rate=nm.correlation_rate,
    )
    return rec


def evaluate_branch(params, derived, nm, branch):
    """Full pipeline record for one steady-state branch.

    Unstable branches keep their steady-state fields but leave every
    downstream output absent.
    """
    rec = _blank_record(params, nm)
    rec.update(
        branch_index=branch.branch_index,
        re_alpha=branch.alpha_s.real, im_alpha=branch.alpha_s.imag,
        intracavity_n=branch.intracavity_n, q_s=branch.q_s,
        effective_detuning=branch.effective_detuning,
        enhanced_coupling=branch.enhanced_coupling,
        eta=branch.bistability_eta, stable=branch.stable,
        spectrum_at_mech_freq=noise.phase_noise_spectrum(
            params.mechanical_freq, nm),
    )
    if not branch.stable:
        return rec
    try:
        a = dynamics.drift_matrix(branch, params)
        n_term = noise.phase_noise_term(a, branch.alpha_s, nm)
        d = noise.diffusion_matrix(params, derived, n_term)
        vc = covariance.solve_lyapunov(a, d)
        ent = entanglement.log_negativity(vc)
    except (ValueError, dynamics.NumericalError) as exc:
        rec["error"] = str(exc)
        return rec
    v = vc.matrix
    rec.update(
        phase_noise_term=n_term,
        phase_noise_over_kappa=n_term / params.cavity_decay,
        v11=v[0, 0], v12=v[0, 1], v13=v[0, 2], v14=v[0, 3],
        v22=v[1, 1], v23=v[1, 2], v24=v[1, 3],
        v33=v[2, 2], v34=v[2, 3], v44=v[3, 3],
        phonon_raw=covariance.phonon_number(vc, clamp=False),
        phonon=covariance.phonon_number(vc),
        condition=vc.condition, condition_warning=vc.ill_conditioned,
        log_negativity=ent.log_negativity, nu_min=ent.nu_min,
        sigma=ent.sigma,
    )
    return rec


def _eval_point(args):
    cfg, values = args
    params, nm = cfg.params, cfg.noise
    try:
        for ax, val in zip(cfg.axes, values):
            params, nm = _apply(params, nm, ax.name, val)
        derived = derive(params)
        branches = steady_state.solve_branches(params, derived)
    except (ValueError, dynamics.NumericalError) as exc:
        rec = _blank_record(params, nm)
        rec["error"] = str(exc)
        return [rec]
    if cfg.branch_policy == "lowest":
        stable = [b for b in branches if b.stable]
        branches = stable[:1] if stable else branches[:1]
    return [evaluate_branch(params, derived, nm, b) for b in branches]


def _grid_points(cfg):
    if not cfg.axes:
        return [()]
    grids = [ax.values() for ax in cfg.axes]
    if len(grids) == 1:
        return [(v,) for v in grids[0]]
    return [(u, v) for u in grids[0] for v in grids[1]]


def run_sweep(cfg: SweepConfig, workers=1):
    """Evaluate the pipeline over the grid; row-major, then branch index.

    Per-point failures are captured in the record's error field; the sweep
    itself never aborts on a single bad point.
    """
    points = [(cfg, vals) for vals in _grid_points(cfg)]
    if cfg.branch_policy == "continuity":
        return _run_continuity(cfg, points)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(_eval_point, points, chunksize=8))
    else:
        per_point = [_eval_point(p) for p in points]
    return [rec for recs in per_point for rec in recs]


def _run_continuity(cfg, points):
    # continuity tracking is inherently serial
    records = []
    n_prev = None
    for pt in points:
        recs = _eval_point(pt)
        with_n = [r for r in recs if r["intracavity_n"] is not None
                  and r["stable"]]
        if not with_n:
            records.extend(recs[:1])
            n_prev = None
            continue
        if n_prev is None:
            pick = with_n[0]
        else:
            pick = min(with_n, key=lambda r: abs(r["intracavity_n"] - n_prev))
        records.append(pick)
        n_prev = pick["intracavity_n"]
    return records


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def emit(records, fmt, path):
    """Write records as CSV (fixed header) or JSON (array of flat objects).

    Floats carry 17 significant digits so a parse round-trips bit-exactly.
    """
    try:
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(COLUMNS)
                for rec in records:
                    writer.writerow(_fmt(rec[c]) for c in COLUMNS)
        elif fmt == "json":
            with open(path, "w") as fh:
                fh.write(_json_text(records))
        else:
            raise ValueError(f"unknown output format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _json_text(records):
    lines = []
    for rec in records:
        items = []
        for c in COLUMNS:
            v = rec[c]
            if v is None:
                txt = "null"
            elif isinstance(v, (bool, np.bool_)):
                txt = "true" if v else "false"
            elif isinstance(v, (int, np.integer)):
                txt = str(int(v))
            elif isinstance(v, str):
                txt = json.dumps(v)
            else:
                txt = format(float(v), ".17g")
            items.append(f"{json.dumps(c)}: {txt}")
        lines.append("  {" + ", ".join(items) + "}")
    return "[\n" + ",\n".join(lines) + "\n]\n"


def read_records(path, fmt="csv"):
    """Parse a file written by emit back into records (floats where possible)."""
    if fmt == "json":
        with open(path) as fh:
            return json.load(fh)
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rec = {}
            for key, txt in row.items():
                if txt == "":
                    rec[key] = None
                elif txt in ("true", "false"):
                    rec[key] = txt == "true"
                elif key in ("branch_index",):
                    rec[key] = int(txt)
                elif key == "error":
                    rec[key] = txt
                else:
                    rec[key] = float(txt)
            out.append(rec)
    return out


@dataclass(frozen=True)
class Raster:
    eta_edges: np.ndarray
    detuning_edges: np.ndarray       # effective detuning / omega_m
    max_log_negativity: np.ndarray   # shape (eta bins, detuning bins), NaN empty


def regrid_eta_detuning(records, bins=(60, 60), eta_range=None,
                        detuning_range=None):
    """Bin sweep records into an (eta, detuning/omega_m) raster of max E_N.

    Only stable branches with a computed log-negativity participate; empty
    bins are NaN.
    """
    pts = [(r["eta"], r["effective_detuning"] / r["mechanical_freq"],
            r["log_negativity"])
           for r in records
           if r.get("stable") and r.get("log_negativity") is not None]
    n_eta, n_det = bins
    if eta_range is None:
        eta_range = ((min(p[0] for p in pts), max(p[0] for p in pts))
                     if pts else (0.0, 1.0))
    if detuning_range is None:
        detuning_range = ((min(p[1] for p in pts), max(p[1] for p in pts))
                          if pts else (0.0, 1.0))
    eta_edges = np.linspace(eta_range[0], eta_range[1], n_eta + 1)
    det_edges = np.linspace(detuning_range[0], detuning_range[1], n_det + 1)
    grid = np.full((n_eta, n_det), np.nan)
    for eta, det, en in pts:
        i = min(np.searchsorted(eta_edges, eta, side="right") - 1, n_eta - 1)
        j = min(np.searchsorted(det_edges, det, side="right") - 1, n_det - 1)
        if i < 0 or j < 0:
            continue
        if np.isnan(grid[i, j]) or en > grid[i, j]:
            grid[i, j] = en
    return Raster(eta_edges=eta_edges, detuning_edges=det_edges,
                  max_log_negativity=grid)


def parse_config(path):
    """Line-oriented key = value config; '#' starts a comment.

    Parameter keys are listed in _PARAM_KEYS/_NOISE_KEYS (SI units,
    frequencies in Hz).  Axis lines:
        axis = <key> <start> <stop> <count> [linear|log]
    Plus: branch_policy, output, format.
    """
    values = {}
    axes = []
    extra = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key == "axis":
                parts = val.split()
                if len(parts) not in (4, 5):
                    raise ValueError(
                        f"{path}:{lineno}: axis needs 'name start stop count "
                        "[scale]'")
                axes.append(SweepAxis(parts[0], float(parts[1]),
                                      float(parts[2]), int(parts[3]),
                                      parts[4] if len(parts) == 5 else "linear"))
            elif key in _PARAM_KEYS or key in _NOISE_KEYS:
                values[key] = float(val)
            elif key in ("branch_policy", "output", "format"):
                extra[key] = val
            else:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return build_config(values, axes, **extra)


def build_config(values, axes=(), branch_policy="all", output="sweep.csv",
                 format="csv"):
    """Assemble a SweepConfig from config-unit values (Hz frequencies)."""
    required = set(_PARAM_KEYS) | set(_NOISE_KEYS)
    missing = sorted(required - set(values))
    if missing:
        raise ValueError(f"missing config keys: {', '.join(missing)}")
    pkw = {}
    for key, (attr, factor) in _PARAM_KEYS.items():
        pkw[attr] = factor * values[key]
    nkw = {}
    for key, (attr, factor) in _NOISE_KEYS.items():
        nkw[attr] = factor * values[key]
    return SweepConfig(params=SystemParams(**pkw), noise=NoiseModel(**nkw),
                       axes=tuple(axes), branch_policy=branch_policy,
                       output_path=output, output_format=format)
