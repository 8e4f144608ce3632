"""Figure-reproduction presets.

Each preset fixes the published parameter set and grid, builds the job
list, and returns a SweepResult; `emit_report` writes the artifacts.
Grid resolutions are artifact defaults (the source figures tabulate
none) chosen to resolve the reported optima at desk runtime.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .config import ExperimentConfig, params_from_config
from .sweeps import PointJob, SweepResult, run_jobs

__all__ = ["PRESETS", "run_preset"]

# published operating points (MHz / us)
_DETUNING_SCAN_BASE = {"alpha1_mhz": -160.0, "alpha2_mhz": -260.0, "w_mhz": 5.0,
                       "omega_mhz": 1.0, "kappa_mhz": 0.5, "t1_us": 20.0}
_LIFETIME_BASE = {"alpha1_mhz": -160.0, "alpha2_mhz": -260.0, "w_mhz": 10.0,
                  "nu0_mhz": 5.77, "nu1_mhz": -5.77, "omega_mhz": 0.71,
                  "kappa_mhz": 0.5}


def _jobs_fig3a(points: int, t_max: float, dt: float, burn_in: float,
                store: bool) -> tuple[list[PointJob], tuple[str, ...], tuple[str, ...]]:
    w = _DETUNING_SCAN_BASE["w_mhz"]
    lim = 1.2 * w
    grid = np.linspace(-lim, lim, points)
    jobs = []
    idx = 0
    for nu0 in grid:
        for nu1 in grid:
            cfg = dict(_DETUNING_SCAN_BASE, nu0_mhz=float(nu0), nu1_mhz=float(nu1))
            jobs.append(PointJob(idx, {"nu0_mhz": float(nu0), "nu1_mhz": float(nu1)},
                                 params_from_config(cfg), "Lx", t_max, dt, burn_in, store))
            idx += 1
    return jobs, ("nu0_mhz", "nu1_mhz"), ()


def _jobs_fig3b(points: int, t_max: float, dt: float, burn_in: float,
                store: bool) -> tuple[list[PointJob], tuple[str, ...], tuple[str, ...]]:
    ws = np.geomspace(2.0, 20.0, points)
    oms = np.geomspace(0.1, 5.0, points)
    jobs = []
    idx = 0
    for w in ws:
        nu = float(w) / math.sqrt(3)
        for om in oms:
            cfg = dict(_DETUNING_SCAN_BASE, w_mhz=float(w), nu0_mhz=nu, nu1_mhz=-nu,
                       omega_mhz=float(om), kappa_mhz=float(om))
            jobs.append(PointJob(idx, {"w_mhz": float(w), "omega_mhz": float(om)},
                                 params_from_config(cfg), "Lx", t_max, dt, burn_in, store))
            idx += 1
    return jobs, ("w_mhz", "omega_mhz"), ()


def _jobs_fig4(points: int, t_max: float, dt: float, burn_in: float,
               store: bool) -> tuple[list[PointJob], tuple[str, ...], tuple[str, ...]]:
    t1s = (20.0, 30.0, 40.0, 60.0, 80.0, 100.0)
    jobs = []
    idx = 0
    for state in ("L0", "Lx"):
        for t1 in t1s:
            cfg = dict(_LIFETIME_BASE, t1_us=t1)
            jobs.append(PointJob(idx, {"t1_us": t1, "initial_state": state},
                                 params_from_config(cfg), state, t_max, dt, burn_in, store))
            idx += 1
    return jobs, ("t1_us",), ("initial_state",)


def _jobs_figa1(points: int, t_max: float, dt: float, burn_in: float,
                store: bool) -> tuple[list[PointJob], tuple[str, ...], tuple[str, ...]]:
    chis = (0.0, 0.125, 0.25, 0.5, 1.0)
    jobs = []
    idx = 0
    for state in ("L0", "L1", "Lx"):
        for chi in chis:
            cfg = dict(_LIFETIME_BASE, t1_us=60.0, chi_mhz=chi)
            jobs.append(PointJob(idx, {"chi_mhz": chi, "initial_state": state},
                                 params_from_config(cfg), state, t_max, dt, burn_in, store))
            idx += 1
    return jobs, ("chi_mhz",), ("initial_state",)


def _jobs_figa2(points: int, t_max: float, dt: float, burn_in: float,
                store: bool) -> tuple[list[PointJob], tuple[str, ...], tuple[str, ...]]:
    jobs = []
    for idx, state in enumerate(("Lx", "L0", "e")):
        cfg = dict(_LIFETIME_BASE, t1_us=60.0)
        if state == "e":
            # bare physical reference: qutrit decay only, all drives off
            cfg.update(w_mhz=0.0, omega_mhz=0.0)
        jobs.append(PointJob(idx, {"initial_state": state},
                             params_from_config(cfg), state, t_max, dt, burn_in, True))
    return jobs, (), ("initial_state",)


PRESETS = {
    "fig3a": dict(builder=_jobs_fig3a, points=21, t_max_us=200.0, dt_us=0.5,
                  burn_in_us=20.0,
                  doc="2d scan of the two sideband detunings; superposition lifetime"),
    "fig3b": dict(builder=_jobs_fig3b, points=13, t_max_us=200.0, dt_us=0.5,
                  burn_in_us=20.0,
                  doc="2d scan of drive rates W, Omega with nu = W/sqrt(3), kappa = Omega"),
    "fig4": dict(builder=_jobs_fig4, points=6, t_max_us=800.0, dt_us=0.5,
                 burn_in_us=80.0,
                 doc="qutrit T1 scan: logical lifetime and analytic overlay"),
    "figA1": dict(builder=_jobs_figa1, points=5, t_max_us=800.0, dt_us=0.5,
                  burn_in_us=80.0,
                  doc="dispersive-shift scan of the three logical lifetimes"),
    "figA2": dict(builder=_jobs_figa2, points=3, t_max_us=800.0, dt_us=0.5,
                  burn_in_us=80.0,
                  doc="process-fidelity traces and bare-qutrit reference"),
}


def run_preset(name: str, points: int | None = None, t_max_us: float | None = None,
               dt_us: float | None = None, burn_in_us: float | None = None,
               workers: int = 1, store_trajectories: bool = False) -> SweepResult:
    """Run a named preset, optionally overriding grid size and timing."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    spec = PRESETS[name]
    points = spec["points"] if points is None else int(points)
    t_max = spec["t_max_us"] if t_max_us is None else float(t_max_us)
    dt = spec["dt_us"] if dt_us is None else float(dt_us)
    burn = spec["burn_in_us"] if burn_in_us is None else float(burn_in_us)
    if points < 1 or t_max <= burn:
        raise ValueError("invalid preset override (points >= 1, t_max > burn_in)")

    t0 = time.perf_counter()
    jobs, axis_names, extra = spec["builder"](points, t_max, dt, burn, store_trajectories)
    rows = run_jobs(jobs, workers)
    for row, job in zip(rows, jobs):
        for col in extra:
            row.coords.setdefault(col, job.coords.get(col))
    config = ExperimentConfig(
        preset=name,
        axes=(),
        initial_state="L0",
        t_max_us=t_max, dt_us=dt, burn_in_us=burn,
        workers=workers, store_trajectories=store_trajectories,
        param_overrides={},
    )
    return SweepResult(config, rows, time.perf_counter() - t0, axis_names, extra)
