"""Analytic rate model: golden-rule refilling and leakage rates, the
two-level rate ODE with its closed-form solution, and derived logical
lifetimes.

Conventions: `Omega`, `kappa`, `W`, `nu` must be supplied in one common
angular unit (rad/us here); `gamma` is the single-qutrit e->g decay
rate.  Everything returned is a plain rate (1/us) or lifetime (us).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

__all__ = [
    "RateSet",
    "gamma_r",
    "gamma_s",
    "gamma_t",
    "delta_root",
    "pl_closed_form",
    "pl_slow_approx",
    "rate_ode_oracle",
    "rate_matrix",
    "slow_rate_exact",
    "logical_rates",
]


def gamma_r(Omega: float, kappa: float) -> float:
    """Refilling rate through the lossy resonator: Omega^2 kappa / (kappa^2 + Omega^2)."""
    if Omega < 0 or kappa < 0:
        raise ValueError("rates require Omega, kappa >= 0")
    if Omega == 0 and kappa == 0:
        raise ValueError("gamma_r undefined for Omega = kappa = 0")
    return Omega ** 2 * kappa / (kappa ** 2 + Omega ** 2)


def gamma_s(Omega: float, kappa: float, W: float, nu: float, k_s: float) -> float:
    """Leakage rate into the lower stray eigenvector (overlap factor k_s)."""
    if W <= 0:
        raise ValueError("gamma_s requires W > 0")
    det = -nu + math.sqrt(W ** 2 + nu ** 2)
    num = kappa * Omega ** 2 * k_s
    return num / (4 * det ** 2 + kappa ** 2 + Omega ** 2 * k_s)


def gamma_t(Omega: float, kappa: float, W: float, nu: float) -> float:
    """Leakage rate into the zero-energy stray eigenvector."""
    if W <= 0:
        raise ValueError("gamma_t requires W > 0")
    eff = Omega ** 2 / (1 + nu ** 2 / W ** 2)
    return kappa * eff / (16 * nu ** 2 + 4 * kappa ** 2 + eff)


def delta_root(gamma: float, Gamma_R: float) -> float:
    """Discriminant root of the two-level rate system: sqrt(g^2 + 6 g G + G^2)."""
    return math.sqrt(gamma ** 2 + 6 * gamma * Gamma_R + Gamma_R ** 2)


def pl_closed_form(t, gamma: float, Gamma_R: float):
    """Exact two-exponential survival probability of the refilling cycle.

    Solves dP_L/dt = -2 g P_L + 2 G P_E, dP_E/dt = g P_L - (g+G) P_E
    with P_L(0)=1, P_E(0)=0.
    """
    t = np.asarray(t, dtype=float)
    if gamma == 0:
        return np.ones_like(t)
    d = delta_root(gamma, Gamma_R)
    wp = (-gamma + Gamma_R + d) / (2 * d)
    wm = (gamma - Gamma_R + d) / (2 * d)
    lam_p = (d - 3 * gamma - Gamma_R) / 2
    lam_m = (-d - 3 * gamma - Gamma_R) / 2
    return wp * np.exp(lam_p * t) + wm * np.exp(lam_m * t)


def pl_slow_approx(t, gamma: float, Gamma_R: float):
    """Dominant slow branch: (1 - 2g/G) exp(-2 g^2 t / (G + 3g))."""
    t = np.asarray(t, dtype=float)
    return (1 - 2 * gamma / Gamma_R) * np.exp(-2 * gamma ** 2 * t / (Gamma_R + 3 * gamma))


def rate_matrix(gamma: float, Gamma_R: float, Gamma_S: float = 0.0,
                Gamma_T: float = 0.0) -> np.ndarray:
    """Generator of the (P_L, P_E) rate system, stray leakage included."""
    return np.array([
        [-2 * gamma, 2 * Gamma_R],
        [gamma, -(gamma + Gamma_R + Gamma_S + Gamma_T)],
    ])


def rate_ode_oracle(gamma: float, Gamma_R: float, Gamma_S: float, Gamma_T: float,
                    t_grid) -> tuple[np.ndarray, np.ndarray]:
    """Numerically integrate the rate ODE system to relative tolerance 1e-12.

    Independent of the closed form: this goes through an adaptive ODE
    integrator and serves as its cross-check.
    """
    from scipy.integrate import solve_ivp

    if min(gamma, Gamma_R, Gamma_S, Gamma_T) < 0:
        raise ValueError("rates must be >= 0")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] < 0:
        raise ValueError("time grid must be non-negative")
    m = rate_matrix(gamma, Gamma_R, Gamma_S, Gamma_T)
    # the initial condition is anchored at t = 0 even when the grid starts later
    sol = solve_ivp(lambda t, y: m @ y, (0.0, t_grid[-1]), [1.0, 0.0],
                    t_eval=t_grid, method="DOP853", rtol=1e-12, atol=1e-14)
    if not sol.success:
        raise RuntimeError(f"rate ODE integration failed: {sol.message}")
    return sol.y[0], sol.y[1]


def slow_rate_exact(gamma: float, Gamma_R: float, Gamma_S: float = 0.0,
                    Gamma_T: float = 0.0) -> float:
    """Magnitude of the slow eigenvalue of the rate matrix (exact)."""
    ev = np.linalg.eigvals(rate_matrix(gamma, Gamma_R, Gamma_S, Gamma_T))
    return float(-ev.real.max())


@dataclass(frozen=True)
class RateSet:
    """Full analytic rate model at one parameter point."""

    Gamma_R: float
    Gamma_S: float
    Gamma_T: float
    Gamma_L0: float
    Gamma_L1: float
    Gamma_Z: float
    T_Z: float
    T_X: float
    Delta: float

    def as_dict(self) -> dict:
        return asdict(self)


def logical_rates(params, k_s: float) -> RateSet:
    """Evaluate the full rate model from system parameters.

    `params` is a :class:`starlab.starmodel.SystemParams`; the formulas
    assume symmetric detuning (nu0 = -nu1) and symmetric drives, so the
    two sides are averaged.  `k_s` is the stray overlap factor from
    :func:`starlab.codes.stray_states`.
    """
    gamma = (params.gamma1 + params.gamma2) / 2
    Omega = (params.Omega1 + params.Omega2) / 2
    kappa = (params.kappa1 + params.kappa2) / 2
    nu = (params.nu0 - params.nu1) / 2
    W = params.W

    GR = gamma_r(Omega, kappa)
    GS = gamma_s(Omega, kappa, W, nu, k_s)
    GT = gamma_t(Omega, kappa, W, nu)
    GL0 = 2 * gamma * (gamma + GS + GT) / (3 * gamma + GR + GS + GT)
    GL1 = 2 * gamma * (3 * gamma + GS + GT) / (5 * gamma + GR + GS + GT)
    GZ = GL0 + GL1
    TZ = math.inf if GZ == 0 else 1.0 / GZ
    return RateSet(GR, GS, GT, GL0, GL1, GZ, TZ, 4 * TZ / 3,
                   delta_root(gamma, GR))
