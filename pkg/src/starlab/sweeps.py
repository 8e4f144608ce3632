"""Sweep engine: run propagate-then-fit jobs over parameter grids.

Each job is independent (embarrassingly parallel); results are merged
by job index so the emitted CSV is byte-identical for any worker count.
Workers pin their BLAS pools to one thread -- parallelism must not
change the floating-point reduction order.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import time
from dataclasses import dataclass

from threadpoolctl import threadpool_limits

from . import __version__
from .codes import codewords, stray_states
from .config import UNIT_NOTE, ExperimentConfig, params_from_config
from .fitters import FitError, FitResult, fit_exponential
from .lindblad import SectorPropagator, logical_observables, process_observables
from .qspace import DEFAULT_LAYOUT, basis_ket
from .rates import RateSet, logical_rates
from .starmodel import SystemParams, build_rot_hamiltonian, collapse_channels

__all__ = ["PointJob", "PointRow", "SweepResult", "run_jobs", "run_custom",
           "emit_report", "predicted_lifetime", "run_single_trajectory"]


@dataclass(frozen=True)
class PointJob:
    index: int
    coords: dict
    params: SystemParams
    initial: str
    t_max_us: float
    dt_us: float
    burn_in_us: float
    store_trajectory: bool = False


@dataclass
class PointRow:
    index: int
    coords: dict
    fit: FitResult | None
    predicted_T_L_us: float
    rates: RateSet | None = None
    fit_error: str | None = None
    max_trace_error: float = 0.0
    min_eigenvalue: float = 0.0
    trajectory: dict | None = None


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list[PointRow]
    runtime_s: float = 0.0
    axis_names: tuple[str, ...] = ()
    extra_columns: tuple[str, ...] = ()

    @property
    def max_trace_error(self) -> float:
        return max((r.max_trace_error for r in self.rows), default=0.0)

    @property
    def min_eigenvalue(self) -> float:
        return min((r.min_eigenvalue for r in self.rows), default=0.0)


def initial_state(label: str, layout=DEFAULT_LAYOUT):
    cw = codewords(layout)
    if label in ("L0", "L1", "Lx"):
        return getattr(cw, label)
    if label == "e":
        return basis_ket((1, 0, 0, 0), layout)
    raise ValueError(f"unknown initial state {label!r}")


def predicted_rates(params: SystemParams) -> RateSet | None:
    """Rate model at this point, or None off its domain of validity
    (asymmetric detuning or W <= 0)."""
    nu = (params.nu0 - params.nu1) / 2
    sym = abs(params.nu0 + params.nu1) <= 1e-9 * max(abs(params.nu0), abs(params.nu1), 1.0)
    if params.W <= 0 or not sym:
        return None
    k_s = stray_states(params.W, nu).k_s
    return logical_rates(params, k_s)


def predicted_lifetime(params: SystemParams, initial: str,
                       rates: RateSet | None = None) -> float:
    """Rate-model lifetime for the trace fitted on an `initial`-state run.

    L0/L1 runs fit the population difference and are predicted by T_Z;
    Lx by T_X = 4 T_Z / 3.  NaN when the model assumptions (symmetric
    detuning, W > 0) do not hold at this point.  chi does not enter the
    rate model, so nonzero chi rows carry the chi = 0 reference value.
    """
    if initial == "e":
        return math.inf if params.gamma1 == 0 else 1.0 / params.gamma1
    rs = rates if rates is not None else predicted_rates(params)
    if rs is None:
        return float("nan")
    return rs.T_X if initial == "Lx" else rs.T_Z


def run_point(job: PointJob) -> PointRow:
    """Propagate one parameter point and fit its fidelity trace."""
    with threadpool_limits(limits=1):
        params = job.params
        h = build_rot_hamiltonian(params)
        prop = SectorPropagator(h, collapse_channels(params))
        obs = logical_observables()
        n_steps = int(round(job.t_max_us / job.dt_us))
        traj = prop.propagate(initial_state(job.initial), job.dt_us, n_steps, obs)
        series = process_observables(traj, job.initial, params.nu0, params.nu1)

        fit = None
        err = None
        try:
            fit = fit_exponential(traj.times, series, burn_in=job.burn_in_us)
        except FitError as exc:
            err = f"{type(exc).__name__}: {exc}"

        stored = None
        if job.store_trajectory:
            stored = {"times": traj.times,
                      "observables": dict(traj.observables),
                      "fidelity": series}
        rates = predicted_rates(params)
        return PointRow(job.index, job.coords, fit,
                        predicted_lifetime(params, job.initial, rates), rates, err,
                        traj.max_trace_error, traj.min_eigenvalue, stored)


def run_jobs(jobs: list[PointJob], workers: int = 1) -> list[PointRow]:
    """Execute jobs, merging results in job order regardless of scheduling."""
    t0 = time.perf_counter()
    if workers <= 1:
        rows = [run_point(j) for j in jobs]
    else:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(processes=workers) as pool:
            rows = pool.map(run_point, jobs, chunksize=1)
    rows.sort(key=lambda r: r.index)
    _ = time.perf_counter() - t0
    return rows


def build_grid_jobs(config: ExperimentConfig) -> tuple[list[PointJob], tuple[str, ...]]:
    """Cartesian-product jobs from the config's sweep axes (C order)."""
    base_cfg = {}
    if config.param_file:
        from .config import parse_param_file

        base_cfg.update(parse_param_file(config.param_file))
    base_cfg.update(config.param_overrides)

    axis_names = tuple(a.name for a in config.axes)
    axis_values = [a.values() for a in config.axes]
    jobs = []
    for idx, combo in enumerate(itertools.product(*axis_values) if config.axes else [()]):
        cfg = dict(base_cfg)
        coords = {}
        for name, val in zip(axis_names, combo):
            cfg[name] = float(val)
            coords[name] = float(val)
        jobs.append(PointJob(idx, coords, params_from_config(cfg), config.initial_state,
                             config.t_max_us, config.dt_us, config.burn_in_us,
                             config.store_trajectories))
    return jobs, axis_names


def run_custom(config: ExperimentConfig) -> SweepResult:
    """Generic sweep over the config's declared axes."""
    t0 = time.perf_counter()
    jobs, axis_names = build_grid_jobs(config)
    rows = run_jobs(jobs, config.workers)
    return SweepResult(config, rows, time.perf_counter() - t0, axis_names)


def _fmt(x) -> str:
    if x is None:
        return "nan"
    x = float(x)
    return repr(x)


def emit_report(result: SweepResult, out_dir) -> dict:
    """Write sweep.csv, meta.json, and optional per-point trajectory CSVs."""
    os.makedirs(out_dir, exist_ok=True)
    axis_cols = list(result.axis_names) + list(result.extra_columns)
    header = axis_cols + ["T_L_us", "T_L_stderr_us", "A", "C", "rms_residual",
                          "predicted_T_L_us"]
    csv_path = os.path.join(out_dir, "sweep.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in result.rows:
            cells = [_csv_cell(row.coords.get(c)) for c in axis_cols]
            if row.fit is not None:
                f = row.fit
                cells += [_fmt(f.T_L), _fmt(f.stderr_TL), _fmt(f.A), _fmt(f.C),
                          _fmt(f.rms_residual)]
            else:
                cells += ["nan"] * 5
            cells.append(_fmt(row.predicted_T_L_us))
            fh.write(",".join(cells) + "\n")

    traj_files = []
    for row in result.rows:
        if row.trajectory is None:
            continue
        name = f"trajectory_{row.index:04d}.csv"
        path = os.path.join(out_dir, name)
        names = list(row.trajectory["observables"]) + ["fidelity"]
        arrays = list(row.trajectory["observables"].values()) + [row.trajectory["fidelity"]]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("time_us," + ",".join(names) + "\n")
            for k, t in enumerate(row.trajectory["times"]):
                fh.write(",".join([repr(float(t))] + [repr(float(a[k])) for a in arrays]) + "\n")
        traj_files.append(name)

    meta = {
        "config": result.config.to_dict(),
        "config_hash": result.config.config_hash(),
        "unit_convention": UNIT_NOTE,
        "code_version": __version__,
        "runtime_s": result.runtime_s,
        "rows": len(result.rows),
        "max_trace_error": result.max_trace_error,
        "min_eigenvalue": result.min_eigenvalue,
        "fit_errors": {str(r.index): r.fit_error for r in result.rows if r.fit_error},
        "trajectory_files": traj_files,
    }
    with open(os.path.join(out_dir, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta


def _csv_cell(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, str):
        return value
    return repr(float(value))


def run_single_trajectory(params: SystemParams, initial: str, t_max_us: float,
                          dt_us: float):
    """One propagation with the standard observables (no fit)."""
    with threadpool_limits(limits=1):
        h = build_rot_hamiltonian(params)
        prop = SectorPropagator(h, collapse_channels(params))
        n_steps = int(round(t_max_us / dt_us))
        traj = prop.propagate(initial_state(initial), dt_us, n_steps,
                              logical_observables())
    series = process_observables(traj, initial, params.nu0, params.nu1)
    traj.observables["fidelity"] = series
    return traj
