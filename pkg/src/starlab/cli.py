"""Command-line entry point.

Subcommands:
    simulate    one trajectory, CSV out
    sweep       custom grid over parameter keys
    rates       analytic rate model as JSON
    klcheck     error-correction condition report as JSON
    fit         fit an exponential lifetime to a CSV trace column
    reproduce   run a named figure preset
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .codes import codewords, kl_check, stray_states
from .config import ExperimentConfig, SweepAxis, params_from_config, parse_param_file
from .fitters import FitError, fit_exponential
from .presets import PRESETS, run_preset
from .rates import logical_rates
from .sweeps import emit_report, run_custom, run_single_trajectory


def _load_params(path: str | None, overrides: dict | None = None):
    cfg = dict(parse_param_file(path)) if path else {}
    cfg.update(overrides or {})
    return params_from_config(cfg)


def _add_common(p: argparse.ArgumentParser, timing: bool = True):
    p.add_argument("--params", metavar="FILE", help="flat key=value parameter file (MHz/us)")
    p.add_argument("--out", metavar="DIR", default="out", help="output directory")
    if timing:
        p.add_argument("--t-max-us", type=float, default=None)
        p.add_argument("--dt-us", type=float, default=None)
        p.add_argument("--burn-in-us", type=float, default=None)


def cmd_simulate(args) -> int:
    params = _load_params(args.params)
    t_max = args.t_max_us if args.t_max_us is not None else 200.0
    dt = args.dt_us if args.dt_us is not None else 0.5
    traj = run_single_trajectory(params, args.init, t_max, dt)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "trajectory.csv")
    traj.to_csv(path)
    print(path)
    return 0


def cmd_sweep(args) -> int:
    axes = []
    for spec in args.axis:
        parts = spec.split(":")
        if len(parts) not in (4, 5):
            raise SystemExit(f"--axis expects name:start:stop:points[:log], got {spec!r}")
        name, start, stop, points = parts[0], float(parts[1]), float(parts[2]), int(parts[3])
        scale = parts[4] if len(parts) == 5 else "lin"
        axes.append(SweepAxis(name, start, stop, points, scale))
    config = ExperimentConfig(
        param_file=args.params,
        axes=tuple(axes),
        initial_state=args.init,
        t_max_us=args.t_max_us if args.t_max_us is not None else 200.0,
        dt_us=args.dt_us if args.dt_us is not None else 0.5,
        burn_in_us=args.burn_in_us if args.burn_in_us is not None else 20.0,
        out_dir=args.out,
        workers=args.workers,
        store_trajectories=args.store_trajectories,
    )
    result = run_custom(config)
    meta = emit_report(result, args.out)
    print(json.dumps({"rows": meta["rows"], "out": args.out}, indent=2))
    return 0


def cmd_rates(args) -> int:
    params = _load_params(args.params)
    nu = (params.nu0 - params.nu1) / 2
    k_s = stray_states(params.W, nu).k_s
    rs = logical_rates(params, k_s)
    out = rs.as_dict()
    out["k_s"] = k_s
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_klcheck(args) -> int:
    report = kl_check(codewords())
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    return 0 if report.passed else 1


def cmd_fit(args) -> int:
    data = np.genfromtxt(args.csv, delimiter=",", names=True)
    if args.column not in (data.dtype.names or ()):
        raise SystemExit(f"column {args.column!r} not in {data.dtype.names}")
    try:
        fit = fit_exponential(data["time_us"], data[args.column],
                              burn_in=args.burn_in_us or 0.0)
    except FitError as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}))
        return 1
    print(json.dumps(fit.as_dict(), indent=2, sort_keys=True))
    return 0


def cmd_reproduce(args) -> int:
    result = run_preset(args.preset, points=args.points, t_max_us=args.t_max_us,
                        dt_us=args.dt_us, burn_in_us=args.burn_in_us,
                        workers=args.workers, store_trajectories=args.store_trajectories)
    meta = emit_report(result, args.out)
    print(json.dumps({"preset": args.preset, "rows": meta["rows"],
                      "runtime_s": round(result.runtime_s, 2), "out": args.out}, indent=2))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="starlab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="single trajectory")
    _add_common(p)
    p.add_argument("--init", default="L0", choices=["L0", "L1", "Lx", "e"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="custom parameter sweep")
    _add_common(p)
    p.add_argument("--axis", action="append", default=[],
                   metavar="NAME:START:STOP:POINTS[:log]",
                   help="sweep axis over a parameter key (repeat for 2d)")
    p.add_argument("--init", default="L0", choices=["L0", "L1", "Lx", "e"])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--store-trajectories", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rates", help="analytic rate model as JSON")
    p.add_argument("--params", metavar="FILE")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("klcheck", help="error-correction condition report")
    p.set_defaults(func=cmd_klcheck)

    p = sub.add_parser("fit", help="fit a lifetime to a CSV trace")
    p.add_argument("csv")
    p.add_argument("--column", default="fidelity")
    p.add_argument("--burn-in-us", type=float, default=0.0)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("reproduce", help="run a figure preset")
    p.add_argument("preset", choices=sorted(PRESETS))
    _add_common(p)
    p.add_argument("--points", type=int, default=None, help="grid resolution override")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--store-trajectories", action="store_true")
    p.set_defaults(func=cmd_reproduce)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
