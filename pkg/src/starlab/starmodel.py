"""Physical model of the driven two-qutrit / two-resonator system.

Hamiltonians come in three frames:

* lab frame: bare mode energies plus cosine-modulated transversal
  couplings (four two-photon qutrit-qutrit sidebands, one
  qutrit-resonator sideband per side);
* logical static frame: sideband interactions with explicit slow
  phases ``exp(-i nu t)``, codewords time independent;
* fully rotated frame: everything time independent; the default frame
  for simulation.

All coefficients are angular frequencies in rad/us; plain decay rates
(``gamma``, ``kappa``) are 1/us.  Config-file ingestion and the MHz
conversion live in :mod:`starlab.config`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields

import numpy as np

from .qspace import (
    DEFAULT_LAYOUT,
    ModeLayout,
    Operator,
    embed,
    lowering,
    number,
    projector,
    qutrit_pair_operator,
    transition,
)

__all__ = [
    "SystemParams",
    "DriveSnapshot",
    "ZZMetrics",
    "drive_envelopes",
    "build_lab_hamiltonian",
    "frame_unitary",
    "frame_unitary_composite",
    "build_static_hamiltonian",
    "build_rot_hamiltonian",
    "qq_sideband_coupling",
    "qr_sideband_coupling",
    "collapse_channels",
    "dispersive_terms",
    "zz_ff_metrics",
]

G, E, F = 0, 1, 2  # qutrit level indices

# (q1, q2) sectors entering the two detuning projector groups
_DETUNE0_SECTORS = ((G, F), (F, G), (G, E), (E, G))
_DETUNE1_SECTORS = ((G, G), (F, F), (E, F), (F, E))


@dataclass(frozen=True)
class SystemParams:
    """All physical parameters, as angular frequencies in rad/us.

    ``gamma*`` and ``kappa*`` are jump rates in 1/us (a linewidth quoted
    in MHz converts as ``2*pi*value`` so that the golden-rule formulas
    combine ``Omega`` and ``kappa`` in commensurate units).
    """

    omega_q1: float = 2 * math.pi * 3000.0
    omega_q2: float = 2 * math.pi * 3500.0
    alpha1: float = -2 * math.pi * 160.0
    alpha2: float = -2 * math.pi * 260.0
    omega_r1: float = 2 * math.pi * 5000.0
    omega_r2: float = 2 * math.pi * 5400.0
    W: float = 2 * math.pi * 10.0
    nu0: float = 2 * math.pi * 5.77
    nu1: float = -2 * math.pi * 5.77
    Omega1: float = 2 * math.pi * 0.71
    Omega2: float = 2 * math.pi * 0.71
    kappa1: float = 2 * math.pi * 0.5
    kappa2: float = 2 * math.pi * 0.5
    gamma1: float = 1.0 / 20.0
    gamma2: float = 1.0 / 20.0
    chi1: float = 0.0
    chi2: float = 0.0

    def __post_init__(self):
        for name in ("W", "Omega1", "Omega2", "kappa1", "kappa2", "gamma1", "gamma2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    def replace(self, **changes) -> "SystemParams":
        vals = {f.name: getattr(self, f.name) for f in fields(self)}
        vals.update(changes)
        return SystemParams(**vals)

    def regime_warnings(self) -> list[str]:
        """Check the recommended rate hierarchy W >> Omega ~ kappa >> gamma."""
        msgs = []
        om = max(self.Omega1, self.Omega2)
        kap = max(self.kappa1, self.kappa2)
        gam = max(self.gamma1, self.gamma2)
        if om > 0 and self.W < 5 * om:
            msgs.append(f"W={self.W:.3g} not well above Omega={om:.3g}")
        if gam > 0 and om > 0 and om < 5 * gam:
            msgs.append(f"Omega={om:.3g} not well above gamma={gam:.3g}")
        if gam > 0 and kap > 0 and kap < 5 * gam:
            msgs.append(f"kappa={kap:.3g} not well above gamma={gam:.3g}")
        return msgs


@dataclass(frozen=True)
class DriveSnapshot:
    """Instantaneous modulation amplitudes (rad/us)."""

    a_qq: float
    a_qr1: float
    a_qr2: float


def _qq_cosines(p: SystemParams):
    """(amplitude, angular frequency) of the four qutrit-qutrit sidebands."""
    diff = p.omega_q2 - p.omega_q1
    tot = p.omega_q1 + p.omega_q2
    return (
        (p.W / math.sqrt(2), diff - p.alpha1 - p.nu0),
        (p.W / math.sqrt(2), diff + p.alpha2 + p.nu0),
        (p.W, tot - p.nu1),
        (p.W / 2, tot + p.alpha1 + p.alpha2 + p.nu1),
    )


def drive_envelopes(p: SystemParams, t: float) -> DriveSnapshot:
    """Evaluate the modulation amplitudes at time `t` (us)."""
    a_qq = sum(a * math.cos(w * t) for a, w in _qq_cosines(p))
    a_qr1 = p.Omega1 / math.sqrt(2) * math.cos((p.omega_q1 + p.omega_r1 + p.alpha1) * t)
    a_qr2 = p.Omega2 / math.sqrt(2) * math.cos((p.omega_q2 + p.omega_r2 + p.alpha2) * t)
    return DriveSnapshot(a_qq, a_qr1, a_qr2)


def _mode_ops(layout: ModeLayout):
    aq1 = embed(lowering(layout.dims[0]), 0, layout).matrix
    aq2 = embed(lowering(layout.dims[1]), 1, layout).matrix
    ar1 = embed(lowering(layout.dims[2]), 2, layout).matrix
    ar2 = embed(lowering(layout.dims[3]), 3, layout).matrix
    return aq1, aq2, ar1, ar2


def build_lab_hamiltonian(p: SystemParams, t: float,
                          layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    """Lab-frame Hamiltonian at time `t`: bare energies plus cosine drives."""
    aq1, aq2, ar1, ar2 = _mode_ops(layout)
    nq1, nq2 = aq1.conj().T @ aq1, aq2.conj().T @ aq2
    nr1, nr2 = ar1.conj().T @ ar1, ar2.conj().T @ ar2
    eye = np.eye(layout.total_dim)
    h = (p.omega_q1 * nq1 + p.alpha1 / 2 * nq1 @ (nq1 - eye)
         + p.omega_q2 * nq2 + p.alpha2 / 2 * nq2 @ (nq2 - eye)
         + p.omega_r1 * nr1 + p.omega_r2 * nr2)
    drv = drive_envelopes(p, t)
    h = h + drv.a_qq * (aq1.conj().T + aq1) @ (aq2.conj().T + aq2)
    h = h + drv.a_qr1 * (aq1.conj().T + aq1) @ (ar1.conj().T + ar1)
    h = h + drv.a_qr2 * (aq2.conj().T + aq2) @ (ar2.conj().T + ar2)
    return Operator(layout, h)


def _frame_phase_rates(which: int, p: SystemParams, layout: ModeLayout) -> np.ndarray:
    """Diagonal phase-rate vector of one elementary frame generator."""
    aq1, aq2, ar1, ar2 = _mode_ops(layout)
    if which == 1:
        gen = ((p.omega_q1 + p.alpha1 / 2) * aq1.conj().T @ aq1
               + (p.omega_q2 + p.alpha2 / 2) * aq2.conj().T @ aq2)
    elif which == 2:
        gen = -(p.alpha1 + p.alpha2) / 2 * projector(E, E, layout).matrix
    elif which == 3:
        gen = p.nu0 * sum(projector(a, b, layout).matrix for a, b in _DETUNE0_SECTORS)
    elif which == 4:
        gen = p.nu1 * sum(projector(a, b, layout).matrix for a, b in _DETUNE1_SECTORS)
    elif which == 5:
        gen = ((p.omega_r1 + p.alpha1 / 2) * ar1.conj().T @ ar1
               + (p.omega_r2 + p.alpha2 / 2) * ar2.conj().T @ ar2)
    else:
        raise ValueError(f"frame index must be 1..5, got {which}")
    return np.diag(gen).real


def frame_unitary(which: int, p: SystemParams, t: float,
                  layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    """One of the five diagonal frame unitaries, evaluated at time `t`."""
    rates = _frame_phase_rates(which, p, layout)
    return Operator(layout, np.diag(np.exp(1j * rates * t)))


def frame_unitary_composite(name: str, p: SystemParams, t: float,
                            layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    """Composite frames: 'a' = U5 U2 U1, 'b' = U5 U4 U3 U2 U1, 'c' = U4 U3.

    All five generators are diagonal, so the factors commute and the
    composite is a single diagonal phase.
    """
    members = {"a": (1, 2, 5), "b": (1, 2, 3, 4, 5), "c": (3, 4)}
    if name not in members:
        raise ValueError(f"composite frame must be one of {sorted(members)}, got {name!r}")
    rates = sum(_frame_phase_rates(w, p, layout) for w in members[name])
    return Operator(layout, np.diag(np.exp(1j * rates * t)))


def _pair_ket(a: int, b: int) -> np.ndarray:
    v = np.zeros(9, dtype=complex)
    v[a * 3 + b] = 1.0
    return v


def qq_sideband_coupling(W: float, layout: ModeLayout = DEFAULT_LAYOUT,
                         phase0: complex = 1.0, phase1: complex = 1.0) -> Operator:
    """Hub coupling of |ee> to {|gf>, |fg>, |gg>, |ff>} at matrix element W/2.

    `phase0` / `phase1` multiply the |gf><ee|-type and |gg><ee|-type
    halves; the default (1, 1) is the fully rotated, time-independent
    form, and the codewords are exact null vectors of it.
    """
    ee = _pair_ket(E, E)
    m = np.zeros((9, 9), dtype=complex)
    for a, b in ((G, F), (F, G)):
        m += phase0 * np.outer(_pair_ket(a, b), ee)
    for a, b in ((G, G), (F, F)):
        m += phase1 * np.outer(_pair_ket(a, b), ee)
    m = (W / 2) * (m + m.conj().T)
    return qutrit_pair_operator(m, layout)


def qr_sideband_coupling(Omega: float, side: int,
                         layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    """Resonant e0 <-> f1 exchange between qutrit `side` (0/1) and its resonator.

    Spectator combinations through |ee> are excluded: they are detuned by
    the anharmonicity splitting and drop in the rotating-wave form.
    """
    if side == 0:
        m9 = (np.outer(_pair_ket(E, G), _pair_ket(F, G))
              + np.outer(_pair_ket(E, F), _pair_ket(F, F)))
        res_mode = 2
    elif side == 1:
        m9 = (np.outer(_pair_ket(G, E), _pair_ket(G, F))
              + np.outer(_pair_ket(F, E), _pair_ket(F, F)))
        res_mode = 3
    else:
        raise ValueError(f"side must be 0 or 1, got {side}")
    full = qutrit_pair_operator(m9, layout).matrix
    full = full @ embed(transition(2, 0, 1), res_mode, layout).matrix
    full = (Omega / 2) * (full + full.conj().T)
    return Operator(layout, full)


def _frame_common_terms(p: SystemParams, layout: ModeLayout) -> np.ndarray:
    """Diagonal + QR content shared by the static and rotated frames."""
    h = (-(p.alpha1 / 2) * (projector(E, G, layout).matrix + projector(E, F, layout).matrix)
         - (p.alpha2 / 2) * (projector(G, E, layout).matrix + projector(F, E, layout).matrix))
    h = h - (p.alpha1 / 2) * embed(number(2), 2, layout).matrix
    h = h - (p.alpha2 / 2) * embed(number(2), 3, layout).matrix
    h = h - qr_sideband_coupling(p.Omega1, 0, layout).matrix
    h = h - qr_sideband_coupling(p.Omega2, 1, layout).matrix
    return h + dispersive_terms(p, layout).matrix


def build_static_hamiltonian(p: SystemParams, t: float,
                             layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    """Logical-static-frame Hamiltonian: hub coupling carries explicit
    phases exp(-i nu0 t) / exp(-i nu1 t); everything else is static.

    Related to the rotated frame by H_rot = U_c H_static U_c^dag
    + i dU_c/dt U_c^dag with U_c = U4 U3.
    """
    h = _frame_common_terms(p, layout)
    h = h + qq_sideband_coupling(
        p.W, layout,
        phase0=np.exp(-1j * p.nu0 * t),
        phase1=np.exp(-1j * p.nu1 * t)).matrix
    return Operator(layout, h)


def build_rot_hamiltonian(p: SystemParams,
                          layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    """Fully rotated, time-independent Hamiltonian (default simulation frame)."""
    h = _frame_common_terms(p, layout)
    h = h - p.nu0 * sum(projector(a, b, layout).matrix for a, b in _DETUNE0_SECTORS)
    h = h - p.nu1 * sum(projector(a, b, layout).matrix for a, b in _DETUNE1_SECTORS)
    h = h + qq_sideband_coupling(p.W, layout).matrix
    return Operator(layout, h)


def dispersive_terms(p: SystemParams, layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    """Qutrit-state dependent resonator shift: chi_j |f><f|_qj (x) n_rj.

    chi is the differential photon frequency between the coupled qutrit
    sitting in |g> versus |f> -- the shift that distorts the codewords.
    """
    d = layout.total_dim
    h = np.zeros((d, d), dtype=complex)
    if p.chi1 != 0.0:
        h += p.chi1 * (embed(transition(3, F, F), 0, layout).matrix
                       @ embed(number(2), 2, layout).matrix)
    if p.chi2 != 0.0:
        h += p.chi2 * (embed(transition(3, F, F), 1, layout).matrix
                       @ embed(number(2), 3, layout).matrix)
    return Operator(layout, h)


def collapse_channels(p: SystemParams,
                      layout: ModeLayout = DEFAULT_LAYOUT) -> list[tuple[Operator, float]]:
    """Six jump channels: split qutrit ladder (e->g at gamma, f->e at
    2*gamma) and single-photon resonator decay at kappa.

    The two qutrit transitions have distinct lab frequencies, so the
    secular master equation keeps them as separate channels; each channel
    operator is a single local matrix element and is therefore invariant
    (up to a dropped global phase) under every frame above.
    """
    out = []
    out.append((embed(transition(3, G, E), 0, layout), p.gamma1))
    out.append((embed(transition(3, E, F), 0, layout), 2 * p.gamma1))
    out.append((embed(transition(3, G, E), 1, layout), p.gamma2))
    out.append((embed(transition(3, E, F), 1, layout), 2 * p.gamma2))
    out.append((embed(transition(2, 0, 1), 2, layout), p.kappa1))
    out.append((embed(transition(2, 0, 1), 3, layout), p.kappa2))
    return out


@dataclass(frozen=True)
class ZZMetrics:
    """Conditional-shift diagnostics of the zero-photon spectrum.

    ``zz_ff1 = E(ff) - E(ef) - (E(fg) - E(eg))`` is the shift of qutrit
    1's e->f gap conditioned on qutrit 2 sitting in f versus g;
    ``zz_ff2 = E(ff) - E(fe) - (E(gf) - E(ge))`` is the mirror quantity
    for qutrit 2.  Both vanish exactly for additive (non-interacting)
    spectra.  Each energy is taken from the eigenvector assigned to that
    bare label; `ambiguous` is set when the greedy max-overlap assignment
    is not one-to-one (the values then come from an optimal-overlap
    matching and should be read as diagnostics only).
    """

    zz_ff1: float
    zz_ff2: float
    assignment: dict = field(repr=False)
    ambiguous: bool = False
    conflicts: tuple = ()


def zz_ff_metrics(H: Operator, layout: ModeLayout | None = None) -> ZZMetrics:
    """Energy-combination diagnostics from the zero-photon sector of `H`."""
    from scipy.optimize import linear_sum_assignment

    layout = layout or H.layout
    d1, d2 = layout.dims[0], layout.dims[1]
    zero_idx = [layout.index((a, b) + (0,) * (len(layout.dims) - 2))
                for a in range(d1) for b in range(d2)]
    block = H.matrix[np.ix_(zero_idx, zero_idx)]
    evals, evecs = np.linalg.eigh((block + block.conj().T) / 2)

    wanted = {"ff": (F, F), "ef": (E, F), "fg": (F, G), "eg": (E, G),
              "fe": (F, E), "gf": (G, F), "ge": (G, E)}
    overlaps = {}
    for name, (a, b) in wanted.items():
        overlaps[name] = np.abs(evecs[a * d2 + b, :]) ** 2

    names = list(wanted)
    gain = np.array([overlaps[n] for n in names])
    rows, cols = linear_sum_assignment(-gain)
    assignment = {}
    for r, c in zip(rows, cols):
        assignment[names[r]] = {"energy": float(evals[c]), "overlap": float(gain[r, c]),
                                "eigenindex": int(c)}

    greedy = {n: int(np.argmax(overlaps[n])) for n in names}
    conflicts = tuple(sorted(
        (a, b) for i, a in enumerate(names) for b in names[i + 1:]
        if greedy[a] == greedy[b]))
    ambiguous = bool(conflicts)
    if ambiguous:
        warnings.warn(
            "ambiguous bare-label assignment (shared best eigenvector): "
            + ", ".join(f"{a}~{b}" for a, b in conflicts), stacklevel=2)

    energy = {n: assignment[n]["energy"] for n in names}
    zz1 = energy["ff"] - energy["ef"] - (energy["fg"] - energy["eg"])
    zz2 = energy["ff"] - energy["fe"] - (energy["gf"] - energy["ge"])
    return ZZMetrics(zz1, zz2, assignment, ambiguous, conflicts)
