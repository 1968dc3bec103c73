"""Command-line interface.

Subcommands:
  steady  print steady-state branches at one operating point
  sweep   run a configured parameter-grid sweep and write CSV/JSON
  fig1    input-power hysteresis trace of the intracavity power
  fig2    effective-detuning sweep of the phase-noise term and eta
  fig3    (power x detuning) sweep regridded to an (eta, detuning) raster
          of maximal log-negativity
  check   run the randomized oracle suites

All frequency-like flags take ordinary frequencies in Hz and are converted
to angular units internally.  There is no default phase-noise correlation
rate; pass --correlation-rate-hz explicitly (e.g. 1e6).

Exit codes: 0 success, 1 config error, 2 I/O error, 3 numerical failure
in `check`.
"""

import argparse
import csv
import math
import sys

import numpy as np

from . import noise, selfcheck, steady_state, sweep
from .params import derive
from .steady_state import hysteresis_sweep
from .sweep import SweepAxis, build_config, parse_config

TWO_PI = 2.0 * math.pi

_PARAM_FLAGS = {
    "length_m": 1e-3,
    "mass_kg": 5e-12,
    "mechanical_freq_hz": 10e6,
    "mechanical_damping_hz": 100.0,
    "cavity_decay_hz": 14e6,
    "wavelength_m": 810e-9,
    "power_w": 50e-3,
    "detuning_hz": 10e6,
    "temperature_k": 0.0,
    "linewidth_hz": 0.0,
    "correlation_rate_hz": None,
}


def _add_param_flags(parser):
    for key in _PARAM_FLAGS:
        flag = "--" + key.replace("_", "-")
        parser.add_argument(flag, type=float, dest=key, default=None)
    parser.add_argument("--config", help="key = value config file")


def _gather_values(args):
    # precedence: built-in defaults < config file < explicit flags
    values = dict(_PARAM_FLAGS)
    if args.config is not None:
        cfg = parse_config(args.config)
        for key, (attr, factor) in sweep._PARAM_KEYS.items():
            values[key] = getattr(cfg.params, attr) / factor
        for key, (attr, factor) in sweep._NOISE_KEYS.items():
            values[key] = getattr(cfg.noise, attr) / factor
    for key in _PARAM_FLAGS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if values.get("correlation_rate_hz") is None:
        values["correlation_rate_hz"] = float("nan")  # caught where required
    return values


def _config_from(args, axes=(), **kw):
    values = _gather_values(args)
    if math.isnan(values["correlation_rate_hz"]):
        values["correlation_rate_hz"] = 1.0  # placeholder for noise-free paths
    return build_config(values, axes=axes, **kw)


def _write_rows(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow(format(x, ".17g") if isinstance(x, float) else x
                           for x in row)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def cmd_steady(args):
    cfg = _config_from(args)
    derived = derive(cfg.params)
    branches = steady_state.solve_branches(cfg.params, derived)
    w = csv.writer(sys.stdout)
    w.writerow(["input_power", "re_alpha", "im_alpha", "intracavity_n",
                "q_s", "effective_detuning", "enhanced_coupling", "eta",
                "stable", "branch_index"])
    for b in branches:
        w.writerow([format(x, ".17g") if isinstance(x, float) else x
                    for x in (cfg.params.input_power, b.alpha_s.real,
                              b.alpha_s.imag, b.intracavity_n, b.q_s,
                              b.effective_detuning, b.enhanced_coupling,
                              b.bistability_eta, b.stable, b.branch_index)])
    return 0


def cmd_sweep(args):
    axes = []
    for spec in args.axis or []:
        parts = spec.split()
        if len(parts) not in (4, 5):
            raise ValueError(f"bad axis spec {spec!r}")
        axes.append(SweepAxis(parts[0], float(parts[1]), float(parts[2]),
                              int(parts[3]),
                              parts[4] if len(parts) == 5 else "linear"))
    values = _gather_values(args)
    if math.isnan(values["correlation_rate_hz"]):
        raise ValueError("sweep requires --correlation-rate-hz (e.g. 1e6)")
    base = None
    if args.config is not None:
        base = parse_config(args.config)
    cfg = build_config(
        values,
        axes=tuple(axes) or (base.axes if base else ()),
        branch_policy=args.branch_policy or
        (base.branch_policy if base else "all"),
        output=args.output or (base.output_path if base else "sweep.csv"),
        format=args.format or (base.output_format if base else "csv"),
    )
    records = sweep.run_sweep(cfg, workers=args.workers)
    sweep.emit(records, cfg.output_format, cfg.output_path)
    print(f"wrote {len(records)} records to {cfg.output_path}")
    return 0


def cmd_fig1(args):
    cfg = _config_from(args)
    powers = list(np.linspace(args.power_min, args.power_max, args.points))
    trace = hysteresis_sweep(cfg.params, powers)
    rows = [("up", p.power, p.intracavity_n, p.branch_index, p.eta)
            for p in trace.up]
    rows += [("down", p.power, p.intracavity_n, p.branch_index, p.eta)
             for p in trace.down]
    _write_rows(args.output, ["leg", "input_power", "intracavity_n",
                              "branch_index", "eta"], rows)
    print(f"wrote {len(rows)} trace points to {args.output}")
    return 0


def cmd_fig2(args):
    values = _gather_values(args)
    if math.isnan(values["correlation_rate_hz"]):
        raise ValueError("fig2 requires --correlation-rate-hz (e.g. 1e6)")
    linewidths = [float(x) for x in args.linewidths_hz.split(",")]
    rows = []
    for lw_hz in linewidths:
        values["linewidth_hz"] = lw_hz
        cfg = build_config(values)
        derived = derive(cfg.params)
        wm = cfg.params.mechanical_freq
        for x in np.linspace(args.detuning_min_wm, args.detuning_max_wm,
                             args.points):
            rows.append(fig2_point(cfg.params, derived, cfg.noise, x * wm))
    _write_rows(args.output,
                ["linewidth", "effective_detuning", "delta_over_wm", "eta",
                 "stable", "phase_noise_term", "n_over_kappa",
                 "spectrum_at_mech_freq"], rows)
    print(f"wrote {len(rows)} points to {args.output}")
    return 0


def fig2_point(params, derived, nm, delta_eff):
    """One effective-detuning sweep point: (eta, N, N/kappa, spectrum)."""
    wm = params.mechanical_freq
    ss = steady_state.branch_at_detuning(params, derived, delta_eff)
    spectrum = noise.phase_noise_spectrum(wm, nm)
    if ss.stable:
        from . import dynamics
        a = dynamics.drift_matrix(ss, params)
        n_term = noise.phase_noise_term(a, ss.alpha_s, nm)
        return (nm.linewidth, delta_eff, delta_eff / wm, ss.bistability_eta,
                True, n_term, n_term / params.cavity_decay, spectrum)
    return (nm.linewidth, delta_eff, delta_eff / wm, ss.bistability_eta,
            False, "", "", spectrum)


def cmd_fig3(args):
    values = _gather_values(args)
    if math.isnan(values["correlation_rate_hz"]):
        raise ValueError("fig3 requires --correlation-rate-hz (e.g. 1e6)")
    if args.temperature_k is None and args.config is None:
        raise ValueError("fig3 requires an explicit --temperature-k "
                         "(the bath temperature is not implied by the "
                         "other inputs)")
    linewidths = [float(x) for x in args.linewidths_hz.split(",")]
    axes = (
        SweepAxis("power_w", args.power_min, args.power_max,
                  args.power_points),
        SweepAxis("detuning_hz", args.detuning_min_hz, args.detuning_max_hz,
                  args.detuning_points),
    )
    rows = []
    for lw_hz in linewidths:
        values["linewidth_hz"] = lw_hz
        cfg = build_config(values, axes=axes)
        records = sweep.run_sweep(cfg, workers=args.workers)
        raster = sweep.regrid_eta_detuning(records, bins=(args.bins,
                                                          args.bins))
        eta_c = 0.5 * (raster.eta_edges[:-1] + raster.eta_edges[1:])
        det_c = 0.5 * (raster.detuning_edges[:-1] + raster.detuning_edges[1:])
        for i, ec in enumerate(eta_c):
            for j, dc in enumerate(det_c):
                v = raster.max_log_negativity[i, j]
                rows.append((TWO_PI * lw_hz, float(ec), float(dc),
                             "" if np.isnan(v) else float(v)))
    _write_rows(args.output, ["linewidth", "eta", "delta_over_wm",
                              "max_log_negativity"], rows)
    print(f"wrote {len(rows)} raster bins to {args.output}")
    return 0


def cmd_check(args):
    ok = selfcheck.run_all(seed=args.seed)
    return 0 if ok else 3


def build_parser():
    parser = argparse.ArgumentParser(prog="optomech", description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady", help="steady-state branches at one point")
    _add_param_flags(p)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sweep", help="parameter-grid sweep")
    _add_param_flags(p)
    p.add_argument("--axis", action="append",
                   help="'name start stop count [linear|log]' (max 2)")
    p.add_argument("--branch-policy", choices=["all", "lowest", "continuity"])
    p.add_argument("--output")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fig1", help="input-power hysteresis trace")
    _add_param_flags(p)
    p.add_argument("--power-min", type=float, default=1e-4)
    p.add_argument("--power-max", type=float, default=50e-3)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--output", default="fig1.csv")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", help="effective-detuning sweep of N/kappa")
    _add_param_flags(p)
    p.add_argument("--linewidths-hz", default="30,100",
                   help="comma-separated laser linewidths in Hz")
    p.add_argument("--detuning-min-wm", type=float, default=0.2)
    p.add_argument("--detuning-max-wm", type=float, default=4.0)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--output", default="fig2.csv")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("fig3", help="entanglement raster over (eta, detuning)")
    _add_param_flags(p)
    p.add_argument("--linewidths-hz", default="0,10,100")
    p.add_argument("--power-min", type=float, default=1e-4)
    p.add_argument("--power-max", type=float, default=50e-3)
    p.add_argument("--power-points", type=int, default=120)
    p.add_argument("--detuning-min-hz", type=float, default=1e6)
    p.add_argument("--detuning-max-hz", type=float, default=40e6)
    p.add_argument("--detuning-points", type=int, default=120)
    p.add_argument("--bins", type=int, default=60)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", default="fig3.csv")
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("check", help="randomized oracle suites")
    p.add_argument("--seed", type=int, default=20260826)
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
