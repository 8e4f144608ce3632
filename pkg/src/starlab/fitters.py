"""Exponential lifetime extraction from observable traces.

Fits ``y = A exp(-t/T) + C`` by damped Gauss-Newton after a burn-in cut;
the initial guess comes from a log-linear regression against a tail-mean
offset estimate.  A grid search over T backs up the damped iteration
when it stalls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["FitResult", "FitError", "NoDecayError", "fit_exponential"]

_MAX_ITER = 200
_GRAD_TOL = 1e-10


class FitError(RuntimeError):
    """Lifetime fit failed."""


class NoDecayError(FitError):
    """Trace is constant after burn-in; there is no decay to fit."""


@dataclass(frozen=True)
class FitResult:
    T_L: float
    A: float
    C: float
    stderr_TL: float
    rms_residual: float
    burn_in_used: float

    def as_dict(self) -> dict:
        return {"T_L_us": self.T_L, "A": self.A, "C": self.C,
                "stderr_TL_us": self.stderr_TL, "rms_residual": self.rms_residual,
                "burn_in_us": self.burn_in_used}


def _model(t, A, T, C):
    return A * np.exp(-t / T) + C


def _residual_jacobian(t, y, A, T, C):
    e = np.exp(-t / T)
    r = A * e + C - y
    # columns: d/dA, d/dT, d/dC
    jac = np.column_stack([e, A * e * t / T ** 2, np.ones_like(t)])
    return r, jac


def _initial_guess(t, y, fix_offset):
    if fix_offset is not None:
        c0 = float(fix_offset)
    else:
        tail = max(3, len(y) // 10)
        c0 = float(np.mean(y[-tail:]))
    resid = y - c0
    sign = 1.0 if resid[0] >= 0 else -1.0
    mag = sign * resid
    mask = mag > max(1e-12, 1e-3 * np.abs(mag).max())
    if mask.sum() >= 3:
        coef = np.polyfit(t[mask], np.log(mag[mask]), 1)
        rate = -coef[0]
        a0 = sign * float(np.exp(coef[1]))
    else:
        rate, a0 = 0.0, float(resid[0])
    if not np.isfinite(rate) or rate <= 0:
        rate = 1.0 / max(t[-1] - t[0], 1e-6)
    if fix_offset is None and abs(a0) < 1e-12:
        a0 = float(resid[0]) or 1e-6
    return a0, 1.0 / rate, c0


def _grid_refine(t, y, A0, C0, fix_offset):
    """Fallback: scan T on a log grid, solving the linear (A, C) subproblem."""
    span = t[-1] - t[0]
    best = None
    for T in np.geomspace(span * 1e-3, span * 1e3, 241):
        e = np.exp(-t / T)
        if fix_offset is None:
            design = np.column_stack([e, np.ones_like(t)])
            coef, *_ = np.linalg.lstsq(design, y, rcond=None)
            A, C = coef
        else:
            C = fix_offset
            denom = float(e @ e)
            A = float(e @ (y - C)) / denom if denom > 0 else 0.0
        rss = float(np.sum((_model(t, A, T, C) - y) ** 2))
        if best is None or rss < best[0]:
            best = (rss, A, T, C)
    return best[1], best[2], best[3]


def fit_exponential(times, values, burn_in: float = 0.0,
                    fix_offset: float | None = None) -> FitResult:
    """Least-squares fit of ``A exp(-t/T) + C`` on ``t >= burn_in``.

    Raises
    ------
    NoDecayError
        when the post-burn-in trace is constant.
    FitError
        on non-convergence or unusable input.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise FitError("times and values must be equal-length 1d arrays")
    sel = t >= burn_in
    t, y = t[sel], y[sel]
    if len(t) < 10:
        raise FitError(f"need >= 10 samples after burn-in, got {len(t)}")
    # fit relative to the window start; keeps the amplitude well scaled for
    # late windows and makes the result exactly shift invariant
    t_origin = t[0]
    t = t - t_origin
    if np.abs(y).max() >= 1.5:
        raise FitError("trace values outside (-1.5, 1.5); not a normalized observable")
    spread = y.max() - y.min()
    if spread <= 1e-10 * max(1.0, np.abs(y).max()):
        raise NoDecayError("trace is constant after burn-in")

    A, T, C = _initial_guess(t, y, fix_offset)
    lam = 1e-3
    stalled = False
    for _ in range(_MAX_ITER):
        r, jac = _residual_jacobian(t, y, A, T, C)
        if fix_offset is not None:
            jac = jac[:, :2]
        g = jac.T @ r
        if np.linalg.norm(g) <= _GRAD_TOL:
            break
        jtj = jac.T @ jac
        rss = float(r @ r)
        step_ok = False
        for _ in range(40):
            try:
                delta = np.linalg.solve(jtj + lam * np.diag(np.diag(jtj)) + 1e-300 * np.eye(len(g)), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            A_n = A + delta[0]
            T_n = T + delta[1]
            C_n = C if fix_offset is not None else C + delta[2]
            if T_n <= 0:
                lam *= 10
                continue
            r_n, _ = _residual_jacobian(t, y, A_n, T_n, C_n)
            if float(r_n @ r_n) < rss:
                A, T, C = A_n, T_n, C_n
                lam = max(lam / 10, 1e-12)
                step_ok = True
                break
            lam *= 10
        if not step_ok:
            stalled = True
            break

    if stalled or T <= 0:
        A, T, C = _grid_refine(t, y, A, C, fix_offset)
        # polish once from the grid point
        for _ in range(_MAX_ITER):
            r, jac = _residual_jacobian(t, y, A, T, C)
            if fix_offset is not None:
                jac = jac[:, :2]
            g = jac.T @ r
            if np.linalg.norm(g) <= _GRAD_TOL:
                break
            try:
                delta = np.linalg.solve(jac.T @ jac + 1e-12 * np.eye(len(g)), -g)
            except np.linalg.LinAlgError:
                break
            T_n = T + delta[1]
            if T_n <= 0:
                break
            A += delta[0]
            T = T_n
            if fix_offset is None:
                C += delta[2]

    r, jac = _residual_jacobian(t, y, A, T, C)
    if fix_offset is not None:
        jac = jac[:, :2]
    if np.linalg.norm(jac.T @ r) > 1e-6 * max(1.0, float(np.abs(r).max()) * len(t)):
        raise FitError("fit did not converge (gradient norm above tolerance)")

    n, p = len(t), jac.shape[1]
    rms = float(np.sqrt(np.mean(r ** 2)))
    stderr = float("nan")
    if n > p:
        sigma2 = float(r @ r) / (n - p)
        try:
            cov = sigma2 * np.linalg.inv(jac.T @ jac)
            stderr = float(np.sqrt(max(cov[1, 1], 0.0)))
        except np.linalg.LinAlgError:
            pass
    if T <= 0:
        raise FitError(f"converged to non-positive lifetime {T}")
    A_reported = A * math.exp(t_origin / T) if t_origin else A
    return FitResult(float(T), float(A_reported), float(C), stderr, rms, float(burn_in))
