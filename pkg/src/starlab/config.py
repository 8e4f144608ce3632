"""Parameter-file ingestion and experiment configuration.

Parameter files are flat ``key = value`` text.  Frequencies are quoted
in MHz exactly as published and converted to angular rad/us (x 2*pi);
quoted linewidths (``kappa``) convert the same way so the golden-rule
formulas combine them with the sideband rates in one unit; qutrit decay
comes from ``t1_us`` as ``gamma = 1/T1``.

Recognized keys (all optional; defaults in starmodel.SystemParams):

    omega_q1_mhz, omega_q2_mhz, omega_r1_mhz, omega_r2_mhz
    alpha1_mhz, alpha2_mhz
    w_mhz, nu0_mhz, nu1_mhz
    omega_mhz  (sets both QR sideband rates) / omega1_mhz, omega2_mhz
    kappa_mhz  (sets both)                   / kappa1_mhz, kappa2_mhz
    chi_mhz    (sets both)                   / chi1_mhz,  chi2_mhz
    t1_us      (sets both gammas)            / t1_q1_us,  t1_q2_us
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict

from .starmodel import SystemParams

__all__ = [
    "UNIT_NOTE",
    "parse_param_file",
    "params_from_config",
    "params_to_config",
    "SweepAxis",
    "ExperimentConfig",
]

TWO_PI = 2 * math.pi

UNIT_NOTE = ("frequencies quoted in MHz are angular (multiplied by 2*pi -> rad/us), "
             "including kappa; gamma = 1/T1_us")

_SIMPLE_MHZ = {
    "omega_q1_mhz": "omega_q1", "omega_q2_mhz": "omega_q2",
    "omega_r1_mhz": "omega_r1", "omega_r2_mhz": "omega_r2",
    "alpha1_mhz": "alpha1", "alpha2_mhz": "alpha2",
    "w_mhz": "W", "nu0_mhz": "nu0", "nu1_mhz": "nu1",
    "omega1_mhz": "Omega1", "omega2_mhz": "Omega2",
    "kappa1_mhz": "kappa1", "kappa2_mhz": "kappa2",
    "chi1_mhz": "chi1", "chi2_mhz": "chi2",
}
_PAIR_MHZ = {
    "omega_mhz": ("Omega1", "Omega2"),
    "kappa_mhz": ("kappa1", "kappa2"),
    "chi_mhz": ("chi1", "chi2"),
}
_T1_KEYS = ("t1_us", "t1_q1_us", "t1_q2_us")

KNOWN_KEYS = tuple(sorted(set(_SIMPLE_MHZ) | set(_PAIR_MHZ) | set(_T1_KEYS)))


def parse_param_file(path) -> dict[str, float]:
    """Read a flat key=value file; '#' starts a comment."""
    out: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            try:
                out[key] = float(val)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric value {val!r}") from exc
    return out


def params_from_config(cfg: dict[str, float]) -> SystemParams:
    """Convert MHz/us config values into a SystemParams (rad/us)."""
    unknown = sorted(set(cfg) - set(KNOWN_KEYS))
    if unknown:
        raise ValueError(f"unknown parameter keys: {', '.join(unknown)}; "
                         f"known keys: {', '.join(KNOWN_KEYS)}")
    changes: dict[str, float] = {}
    for key, field_name in _SIMPLE_MHZ.items():
        if key in cfg:
            changes[field_name] = TWO_PI * cfg[key]
    for key, fields_ in _PAIR_MHZ.items():
        if key in cfg:
            for f in fields_:
                changes.setdefault(f, TWO_PI * cfg[key])
    if "t1_us" in cfg:
        if cfg["t1_us"] <= 0:
            raise ValueError("t1_us must be > 0")
        changes.setdefault("gamma1", 1.0 / cfg["t1_us"])
        changes.setdefault("gamma2", 1.0 / cfg["t1_us"])
    for key, f in (("t1_q1_us", "gamma1"), ("t1_q2_us", "gamma2")):
        if key in cfg:
            if cfg[key] <= 0:
                raise ValueError(f"{key} must be > 0")
            changes[f] = 1.0 / cfg[key]
    return SystemParams().replace(**changes)


def params_to_config(p: SystemParams) -> dict[str, float]:
    """Inverse of params_from_config (per-mode keys, MHz/us)."""
    out = {key: getattr(p, f) / TWO_PI for key, f in _SIMPLE_MHZ.items()}
    out["t1_q1_us"] = math.inf if p.gamma1 == 0 else 1.0 / p.gamma1
    out["t1_q2_us"] = math.inf if p.gamma2 == 0 else 1.0 / p.gamma2
    return out


@dataclass(frozen=True)
class SweepAxis:
    """One swept config key: `points` values from `start` to `stop`."""

    name: str
    start: float
    stop: float
    points: int
    scale: str = "lin"  # 'lin' | 'log'

    def __post_init__(self):
        if self.name not in KNOWN_KEYS:
            raise ValueError(f"axis {self.name!r} is not a parameter key; "
                             f"known keys: {', '.join(KNOWN_KEYS)}")
        if self.points < 1:
            raise ValueError("axis needs points >= 1")
        if self.scale not in ("lin", "log"):
            raise ValueError(f"axis scale must be 'lin' or 'log', got {self.scale!r}")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log axis requires positive endpoints")

    def values(self):
        import numpy as np

        if self.points == 1:
            return np.array([self.start])
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one run or sweep."""

    preset: str | None = None
    param_file: str | None = None
    param_overrides: dict = field(default_factory=dict)
    axes: tuple[SweepAxis, ...] = ()
    initial_state: str = "L0"
    t_max_us: float = 200.0
    dt_us: float = 0.5
    burn_in_us: float = 20.0
    out_dir: str | None = None
    workers: int = 1
    store_trajectories: bool = False

    def __post_init__(self):
        if self.initial_state not in ("L0", "L1", "Lx", "e"):
            raise ValueError(f"initial state must be L0|L1|Lx|e, got {self.initial_state!r}")
        if self.t_max_us <= self.burn_in_us:
            raise ValueError("t_max_us must exceed burn_in_us")
        if self.dt_us <= 0 or self.t_max_us <= 0:
            raise ValueError("dt_us and t_max_us must be > 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        bad = sorted(set(self.param_overrides) - set(KNOWN_KEYS))
        if bad:
            raise ValueError(f"unknown override keys: {', '.join(bad)}")
        object.__setattr__(self, "axes", tuple(self.axes))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["axes"] = [asdict(a) for a in self.axes]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["axes"] = tuple(SweepAxis(**a) for a in d.get("axes", ()))
        d["param_overrides"] = dict(d.get("param_overrides", {}))
        return cls(**d)

    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]

    def resolve_params(self) -> SystemParams:
        cfg = dict(parse_param_file(self.param_file)) if self.param_file else {}
        cfg.update(self.param_overrides)
        return params_from_config(cfg)
