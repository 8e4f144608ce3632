"""Lindblad propagation and observable recording.

Two propagation routes:

* :func:`propagate_fixed` -- the reference route: one dense matrix
  exponential of the full vectorized generator (column-stacking
  convention), then repeated matrix-vector products.  Exact for any
  step size.
* :class:`SectorPropagator` -- the production route for sweeps.  Every
  Hamiltonian term conserves total excitation parity and every jump
  operator flips it, so density matrices with no parity coherences stay
  in a 648-coordinate subspace; restricted to Hermitian matrices that
  subspace is a real vector space.  The propagator is the exact same
  semigroup compressed to that space (one real 648x648 exponential),
  cross-checked against the reference route in the tests.

* :func:`propagate_timedep` -- adaptive integration for time-dependent
  Hamiltonians (frame-validation runs).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .codes import codewords
from .qspace import DEFAULT_LAYOUT, ModeLayout, Operator, State

__all__ = [
    "Superoperator",
    "Trajectory",
    "liouvillian",
    "propagate_fixed",
    "propagate_timedep",
    "expectation",
    "logical_observables",
    "lx_corotating_series",
    "process_observables",
    "SectorPropagator",
]

TRACE_TOL = 1e-8
MIN_EIG_TOL = -1e-7


@dataclass(frozen=True)
class Superoperator:
    """Vectorized generator acting on column-stacked density matrices."""

    layout: ModeLayout
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        D2 = self.layout.total_dim ** 2
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (D2, D2):
            raise ValueError(f"superoperator shape {m.shape}, expected ({D2},{D2})")
        object.__setattr__(self, "matrix", m)

    def trace_residual(self) -> float:
        """Norm of the trace row acting from the left (0 for trace-preserving)."""
        D = self.layout.total_dim
        tr_vec = np.eye(D, dtype=complex).reshape(-1, order="F")
        return float(np.abs(tr_vec @ self.matrix).max())


@dataclass
class Trajectory:
    """Time grid, recorded expectation series, and propagation hygiene."""

    times: np.ndarray
    observables: dict[str, np.ndarray]
    checkpoints: list[tuple[float, np.ndarray]] = field(default_factory=list)
    max_trace_error: float = 0.0
    min_eigenvalue: float = 0.0
    max_hermiticity_error: float = 0.0

    def series(self, name: str) -> np.ndarray:
        return self.observables[name]

    def to_csv(self, path) -> None:
        names = list(self.observables)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("time_us," + ",".join(names) + "\n")
            for k, t in enumerate(self.times):
                row = [repr(float(t))] + [repr(float(self.observables[n][k])) for n in names]
                fh.write(",".join(row) + "\n")


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stacking: vec(A rho B) = (B^T kron A) vec(rho)."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape((dim, dim), order="F")


def liouvillian(H: Operator, channels: list[tuple[Operator, float]]) -> Superoperator:
    """Standard Lindblad generator for Hamiltonian `H` and jump `channels`."""
    layout = H.layout
    D = layout.total_dim
    hm = H.matrix
    if np.abs(hm - hm.conj().T).max() > 1e-9:
        raise ValueError("Hamiltonian must be Hermitian")
    eye = np.eye(D, dtype=complex)
    L = -1j * (np.kron(eye, hm) - np.kron(hm.T, eye))
    for C, rate in channels:
        if rate < 0:
            raise ValueError(f"negative channel rate {rate}")
        if C.layout.dims != layout.dims:
            raise ValueError("channel operator layout mismatch")
        cm = C.matrix
        cdc = cm.conj().T @ cm
        L += rate * (np.kron(cm.conj(), cm)
                     - 0.5 * np.kron(eye, cdc)
                     - 0.5 * np.kron(cdc.T, eye))
    return Superoperator(layout, L)


def expectation(O: Operator, rho: State | np.ndarray) -> float:
    """Re Tr(O rho); warns if the imaginary residue exceeds 1e-10."""
    mat = rho.density() if isinstance(rho, State) else np.asarray(rho, dtype=complex)
    val = complex(np.trace(O.matrix @ mat))
    if abs(val.imag) > 1e-10:
        warnings.warn(f"expectation has imaginary residue {val.imag:.2e}", stacklevel=2)
    return float(val.real)


def _hygiene_update(traj: Trajectory, rho: np.ndarray) -> None:
    herm = float(np.abs(rho - rho.conj().T).max())
    tr_err = float(abs(np.trace(rho).real - 1.0))
    mineig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
    traj.max_hermiticity_error = max(traj.max_hermiticity_error, herm)
    traj.max_trace_error = max(traj.max_trace_error, tr_err)
    traj.min_eigenvalue = min(traj.min_eigenvalue, mineig)


def propagate_fixed(L: Superoperator, rho0: State, dt: float = 0.01,
                    n_steps: int = 1000, observables: dict[str, Operator] | None = None,
                    checkpoint_every: float | None = None) -> Trajectory:
    """Fixed-step propagation: P = expm(L dt) once, then iterated products.

    Observables are recorded at every step.  Density-matrix checkpoints
    are stored every `checkpoint_every` us when requested; trace,
    Hermiticity, and positivity are monitored at every step.
    """
    D = L.layout.total_dim
    observables = observables or {}
    try:
        P = sla.expm(L.matrix * dt)
    except Exception as exc:  # pragma: no cover - expm failures are exotic
        norm = float(np.linalg.norm(L.matrix * dt, 1))
        raise RuntimeError(f"matrix exponential failed (1-norm {norm:.3g}): {exc}") from exc

    # Tr(O rho) = vec(O^T) . vec(rho) under column stacking
    rows = {name: op.matrix.T.reshape(-1, order="F")
            for name, op in observables.items()}

    v = vectorize(rho0.density())
    times = np.arange(n_steps + 1) * dt
    data = {name: np.empty(n_steps + 1) for name in observables}
    traj = Trajectory(times, data)

    every = max(1, int(round((checkpoint_every or 1.0) / dt))) if checkpoint_every else None

    def record(k, vec):
        rho = unvectorize(vec, D)
        for name, row in rows.items():
            val = row @ vec
            data[name][k] = val.real
        _hygiene_update(traj, rho)
        if every and k % every == 0:
            traj.checkpoints.append((times[k], rho))

    record(0, v)
    for k in range(1, n_steps + 1):
        v = P @ v
        record(k, v)
    return traj


def propagate_timedep(h_of_t, channels: list[tuple[Operator, float]], rho0: State,
                      t_span: tuple[float, float], tol: float = 1e-10,
                      t_eval=None, observables: dict[str, Operator] | None = None) -> Trajectory:
    """Adaptive integration of the master equation with `h_of_t` callable.

    `h_of_t(t)` returns an Operator (or a constant Operator may be passed
    directly).  The right-hand side works at the matrix level; suitable
    for the static-frame validation runs.
    """
    from scipy.integrate import solve_ivp

    layout = rho0.layout
    D = layout.total_dim
    observables = observables or {}
    if isinstance(h_of_t, Operator):
        h_const = h_of_t.matrix

        def h_of_t(_t, _m=h_const):  # noqa: ANN001
            return _m
    else:
        inner = h_of_t

        def h_of_t(t):  # noqa: ANN001
            out = inner(t)
            return out.matrix if isinstance(out, Operator) else out

    chans = [(C.matrix, rate) for C, rate in channels]
    cdc_sum = sum(rate * (cm.conj().T @ cm) for cm, rate in chans) if chans else np.zeros((D, D))

    def rhs(t, y):
        rho = y.reshape(D, D)
        hm = h_of_t(t)
        out = -1j * (hm @ rho - rho @ hm)
        for cm, rate in chans:
            out += rate * (cm @ rho @ cm.conj().T)
        out -= 0.5 * (cdc_sum @ rho + rho @ cdc_sum)
        return out.reshape(-1)

    if t_eval is None:
        t_eval = np.linspace(t_span[0], t_span[1], 101)
    sol = solve_ivp(rhs, t_span, rho0.density().reshape(-1), method="DOP853",
                    rtol=tol, atol=tol * 1e-2, t_eval=np.asarray(t_eval, dtype=float))
    if not sol.success:
        raise RuntimeError(f"adaptive propagation failed: {sol.message}")

    times = sol.t
    data = {name: np.empty(len(times)) for name in observables}
    traj = Trajectory(times, data)
    for k in range(len(times)):
        rho = sol.y[:, k].reshape(D, D)
        for name, op in observables.items():
            data[name][k] = float(np.trace(op.matrix @ rho).real)
        _hygiene_update(traj, rho)
    return traj


# ---------------------------------------------------------------------------
# standard observables and the co-rotating superposition fidelity


def logical_observables(layout: ModeLayout = DEFAULT_LAYOUT) -> dict[str, Operator]:
    """Projectors and logical coherence quadratures used by the runners.

    ``p_L0``/``p_L1`` are codeword projectors (resonators in vacuum),
    ``x_L``/``y_L`` the coherence quadratures between them, and
    ``p_e_q1`` the bare |e> population of qutrit 1 (physical reference).
    """
    from .qspace import embed, transition

    cw = codewords(layout)
    l0, l1 = cw.L0.data, cw.L1.data
    ops = {
        "p_L0": np.outer(l0, l0.conj()),
        "p_L1": np.outer(l1, l1.conj()),
        "x_L": np.outer(l0, l1.conj()) + np.outer(l1, l0.conj()),
        "y_L": -1j * np.outer(l0, l1.conj()) + 1j * np.outer(l1, l0.conj()),
    }
    out = {name: Operator(layout, m) for name, m in ops.items()}
    out["p_e_q1"] = embed(transition(3, 1, 1), 0, layout)
    return out


def lx_corotating_series(traj: Trajectory, nu0: float, nu1: float) -> np.ndarray:
    """Superposition-state fidelity with the deterministic frame phase removed.

    The codewords sit at frame energies -nu0 and -nu1, so their coherence
    rotates at omega = nu0 - nu1; projecting on the co-rotating
    superposition gives
    (p_L0 + p_L1)/2 + [x_L cos(omega t) - y_L sin(omega t)]/2,
    which is constant when the dynamics is pure frame rotation.
    """
    w = nu0 - nu1
    t = traj.times
    return (0.5 * (traj.series("p_L0") + traj.series("p_L1"))
            + 0.5 * (traj.series("x_L") * np.cos(w * t)
                     - traj.series("y_L") * np.sin(w * t)))


def process_observables(traj: Trajectory, initial: str, nu0: float, nu1: float) -> np.ndarray:
    """Named process-fidelity series for a run started in `initial`.

    ``L0``/``L1`` runs use the population difference p_L0 - p_L1; ``Lx``
    uses the co-rotating superposition fidelity.
    """
    if initial in ("L0", "L1"):
        return traj.series("p_L0") - traj.series("p_L1")
    if initial == "Lx":
        return lx_corotating_series(traj, nu0, nu1)
    if initial == "e":
        return traj.series("p_e_q1")
    raise ValueError(f"unknown initial state label {initial!r}")


# ---------------------------------------------------------------------------
# parity-sector fast path


def _parity_vector(layout: ModeLayout) -> np.ndarray:
    labels = np.array(layout.all_labels())
    return labels.sum(axis=1) % 2


class SectorPropagator:
    """Exact propagator on the parity-diagonal coherence sector.

    The Hamiltonian conserves total excitation parity and every jump
    operator flips it, so the pair sector {(i,j): parity(i) == parity(j)}
    is exactly closed under the generator.  Hermitian matrices supported
    there form a real vector space of half the complex dimension; the
    generator compressed to it is real, so one real ``expm`` replaces the
    full complex one at an eighth of the cost.
    """

    def __init__(self, H: Operator, channels: list[tuple[Operator, float]]):
        layout = H.layout
        self.layout = layout
        D = layout.total_dim
        par = _parity_vector(layout)
        self.even = np.where(par == 0)[0]
        self.odd = np.where(par == 1)[0]
        pairs = [(i, j) for cls in (self.even, self.odd) for i in cls for j in cls]
        self.pairs = pairs
        self.pair_flat = np.array([i * D + j for i, j in pairs])
        npair = len(pairs)
        pos = {p: k for k, p in enumerate(pairs)}

        hm = H.matrix
        if np.abs(hm - hm.conj().T).max() > 1e-9:
            raise ValueError("Hamiltonian must be Hermitian")
        # verify parity closure of every ingredient, then build the
        # sector generator from 18x18 blocks (row convention: L acts on
        # rho_{ij} with (H rho)_{ij} = sum_k H_{ik} rho_{kj})
        self._check_parity(hm, par, "Hamiltonian", same=True)
        blocks = {}
        for (name, cls) in (("e", self.even), ("o", self.odd)):
            blocks[name] = hm[np.ix_(cls, cls)]
        ne, no = len(self.even), len(self.odd)
        Lee = -1j * (np.kron(blocks["e"], np.eye(ne)) - np.kron(np.eye(ne), blocks["e"].T))
        Loo = -1j * (np.kron(blocks["o"], np.eye(no)) - np.kron(np.eye(no), blocks["o"].T))
        Leo = np.zeros((ne * ne, no * no), dtype=complex)
        Loe = np.zeros((no * no, ne * ne), dtype=complex)

        same_mask = par[:, None] == par[None, :]
        for C, rate in channels:
            if rate < 0:
                raise ValueError(f"negative channel rate {rate}")
            cm = C.matrix
            if np.abs(cm).max() == 0 or rate == 0:
                continue
            flips = np.abs(cm[same_mask]).max() == 0
            preserves = np.abs(cm[~same_mask]).max() == 0
            if not (flips or preserves):
                raise ValueError("jump operator mixes the parity grading; "
                                 "use the full propagator")
            cdc = cm.conj().T @ cm
            d_e = cdc[np.ix_(self.even, self.even)]
            d_o = cdc[np.ix_(self.odd, self.odd)]
            if flips:
                c_oe = cm[np.ix_(self.odd, self.even)]   # maps even -> odd
                c_eo = cm[np.ix_(self.even, self.odd)]
                Loe += rate * np.kron(c_oe, c_oe.conj())
                Leo += rate * np.kron(c_eo, c_eo.conj())
            else:
                c_ee = cm[np.ix_(self.even, self.even)]
                c_oo = cm[np.ix_(self.odd, self.odd)]
                Lee += rate * np.kron(c_ee, c_ee.conj())
                Loo += rate * np.kron(c_oo, c_oo.conj())
            Lee -= 0.5 * rate * (np.kron(d_e, np.eye(ne)) + np.kron(np.eye(ne), d_e.T))
            Loo -= 0.5 * rate * (np.kron(d_o, np.eye(no)) + np.kron(np.eye(no), d_o.T))

        # row-major pair coordinates within each class, even block first
        Lsec = np.block([[Lee, Leo], [Loe, Loo]])

        # realification: coordinates are rho_ii (diagonal) and the
        # real/imaginary parts of rho_ij for i<j within each class
        rows, cols, vals = [], [], []
        for k, (i, j) in enumerate(pairs):
            if i == j:
                rows.append(k); cols.append(k); vals.append(1.0)
            elif i < j:
                rows.append(k); cols.append(k); vals.append(1.0)
                rows.append(k); cols.append(pos[(j, i)]); vals.append(1j)
            else:
                rows.append(k); cols.append(pos[(j, i)]); vals.append(1.0)
                rows.append(k); cols.append(k); vals.append(-1j)
        self._decode = sp.csr_matrix((vals, (rows, cols)), shape=(npair, npair), dtype=complex)
        rows, cols, vals = [], [], []
        for k, (i, j) in enumerate(pairs):
            if i == j:
                rows.append(k); cols.append(k); vals.append(1.0)
            elif i < j:
                rows.append(k); cols.append(k); vals.append(0.5)
                rows.append(k); cols.append(pos[(j, i)]); vals.append(0.5)
            else:
                rows.append(k); cols.append(pos[(j, i)]); vals.append(-0.5j)
                rows.append(k); cols.append(k); vals.append(0.5j)
        self._encode = sp.csr_matrix((vals, (rows, cols)), shape=(npair, npair), dtype=complex)

        Lreal = (self._encode @ sp.csr_matrix(Lsec) @ self._decode).toarray()
        imag_resid = float(np.abs(Lreal.imag).max())
        if imag_resid > 1e-9:
            raise RuntimeError(f"sector generator has imaginary residue {imag_resid:.2e}")
        self.generator = Lreal.real

    @staticmethod
    def _check_parity(m: np.ndarray, par: np.ndarray, what: str, same: bool) -> None:
        bad = (par[:, None] == par[None, :]) != same
        if np.abs(m[bad]).max() > 0:
            raise ValueError(f"{what} breaks the parity grading; fast path invalid")

    # -- state and observable transport ------------------------------------

    def encode_state(self, rho: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        out_of_sector = rho.copy()
        out_of_sector.reshape(-1)[self.pair_flat] = 0
        if np.abs(out_of_sector).max() > tol:
            raise ValueError("state has parity coherences; use the full propagator")
        z = rho.reshape(-1)[self.pair_flat]
        x = self._encode @ z
        return x.real

    def decode_state(self, x: np.ndarray) -> np.ndarray:
        D = self.layout.total_dim
        rho = np.zeros((D, D), dtype=complex)
        rho.reshape(-1)[self.pair_flat] = self._decode @ x
        return rho

    def observable_row(self, O: Operator, tol: float = 1e-9) -> np.ndarray:
        """Real row r with r . x = Tr(O rho); O must be sector-supported."""
        z = O.matrix.T.reshape(-1)[self.pair_flat]
        row = self._decode.T @ z
        if np.abs(row.imag).max() > tol:
            raise ValueError("observable is not real on the sector (not Hermitian?)")
        return row.real

    def propagate(self, rho0: State, dt: float, n_steps: int,
                  observables: dict[str, Operator],
                  checkpoint_every: float | None = None) -> Trajectory:
        """Same contract as :func:`propagate_fixed`, compressed route."""
        P = sla.expm(self.generator * dt)
        x = self.encode_state(rho0.density())
        rows = {name: self.observable_row(op) for name, op in observables.items()}
        times = np.arange(n_steps + 1) * dt
        data = {name: np.empty(n_steps + 1) for name in observables}
        traj = Trajectory(times, data)
        every = max(1, int(round((checkpoint_every or 1.0) / dt))) if checkpoint_every else None

        def record(k, xv):
            rho = self.decode_state(xv)
            for name, row in rows.items():
                data[name][k] = float(row @ xv)
            _hygiene_update(traj, rho)
            if every and k % every == 0:
                traj.checkpoints.append((times[k], rho))

        record(0, x)
        for k in range(1, n_steps + 1):
            x = P @ x
            record(k, x)
        return traj
