"""Dense operator algebra on a fixed multi-mode Hilbert space.

The composite space is a tensor product of a small number of modes
(default: two qutrits and two two-level resonators, dimension 36).
Mode 0 is the most significant digit in the mixed-radix basis index,
i.e. ``index = ravel_multi_index(labels, dims)`` with C ordering.

Everything is dense ``complex128``: at dimension 36 (superoperators
1296) dense algebra beats any sparse bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModeLayout",
    "Operator",
    "State",
    "DEFAULT_LAYOUT",
    "basis_ket",
    "lowering",
    "number",
    "transition",
    "identity",
    "embed",
    "projector",
    "qutrit_pair_operator",
    "qutrit_pair_ket",
]


@dataclass(frozen=True)
class ModeLayout:
    """Ordered mode dimensions of the composite space.

    Parameters
    ----------
    dims : tuple of int
        One entry per mode; mode 0 is the most significant index digit.
    """

    dims: tuple[int, ...] = (3, 3, 2, 2)

    def __post_init__(self):
        if len(self.dims) == 0 or any(d < 1 for d in self.dims):
            raise ValueError(f"invalid mode dimensions {self.dims}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def index(self, labels) -> int:
        """Composite basis index of a per-mode label tuple."""
        labels = tuple(labels)
        if len(labels) != len(self.dims):
            raise ValueError(f"expected {len(self.dims)} labels, got {len(labels)}")
        for k, (lab, d) in enumerate(zip(labels, self.dims)):
            if not 0 <= lab < d:
                raise ValueError(f"label {lab} out of range for mode {k} (dim {d})")
        return int(np.ravel_multi_index(labels, self.dims))

    def labels(self, index: int) -> tuple[int, ...]:
        """Inverse of :meth:`index`."""
        if not 0 <= index < self.total_dim:
            raise ValueError(f"index {index} out of range [0, {self.total_dim})")
        return tuple(int(x) for x in np.unravel_index(index, self.dims))

    def all_labels(self):
        """All basis label tuples in index order."""
        return [self.labels(i) for i in range(self.total_dim)]


DEFAULT_LAYOUT = ModeLayout()


@dataclass(frozen=True)
class Operator:
    """Dense operator on the composite space."""

    layout: ModeLayout
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        D = self.layout.total_dim
        if m.shape != (D, D):
            raise ValueError(f"matrix shape {m.shape} does not match layout dim {D}")
        object.__setattr__(self, "matrix", m)
        m.setflags(write=False)

    def dag(self) -> "Operator":
        return Operator(self.layout, self.matrix.conj().T)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.abs(self.matrix - self.matrix.conj().T).max() <= tol)

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, self.matrix - other.matrix)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.layout, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.layout, -self.matrix)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, self.matrix @ other.matrix)

    def _check(self, other: "Operator"):
        if self.layout.dims != other.layout.dims:
            raise ValueError("operators live on different layouts")


@dataclass(frozen=True)
class State:
    """Pure ket (1d) or density matrix (2d) on the composite space."""

    layout: ModeLayout
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        D = self.layout.total_dim
        if d.shape not in ((D,), (D, D)):
            raise ValueError(f"state shape {d.shape} incompatible with dim {D}")
        object.__setattr__(self, "data", d)
        d.setflags(write=False)

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def density(self) -> np.ndarray:
        """Density matrix form (outer product for kets)."""
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return np.array(self.data)

    def validate(self, *, norm_tol: float = 1e-12, trace_tol: float = 1e-10,
                 eig_tol: float = -1e-9) -> None:
        """Raise ValueError unless the state is physical within tolerances."""
        if self.is_pure:
            nrm = np.linalg.norm(self.data)
            if abs(nrm - 1.0) > norm_tol:
                raise ValueError(f"ket norm {nrm} deviates from 1 by more than {norm_tol}")
            return
        rho = self.data
        herm = np.abs(rho - rho.conj().T).max()
        if herm > 1e-10:
            raise ValueError(f"density matrix not Hermitian (residual {herm:.2e})")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace {tr} deviates from 1 by more than {trace_tol}")
        mineig = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
        if mineig < eig_tol:
            raise ValueError(f"minimum eigenvalue {mineig:.2e} below {eig_tol}")


def basis_ket(labels, layout: ModeLayout = DEFAULT_LAYOUT) -> State:
    """Product basis ket with amplitude 1 at the composite index of `labels`."""
    v = np.zeros(layout.total_dim, dtype=complex)
    v[layout.index(labels)] = 1.0
    return State(layout, v)


def lowering(dim: int) -> np.ndarray:
    """Truncated bosonic lowering matrix: entry sqrt(n) connects n to n-1."""
    if dim < 2:
        raise ValueError("lowering operator needs dim >= 2")
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = math.sqrt(n)
    return a


def number(dim: int) -> np.ndarray:
    """Number operator diag(0..dim-1)."""
    return np.diag(np.arange(dim, dtype=complex))


def transition(dim: int, i: int, j: int) -> np.ndarray:
    """Single-mode operator |i><j|."""
    if not (0 <= i < dim and 0 <= j < dim):
        raise ValueError(f"levels ({i},{j}) out of range for dim {dim}")
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def identity(layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    return Operator(layout, np.eye(layout.total_dim, dtype=complex))


def embed(local_op: np.ndarray, mode_index: int, layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    """Tensor a single-mode operator with identity on all other modes."""
    local_op = np.asarray(local_op, dtype=complex)
    if not 0 <= mode_index < len(layout.dims):
        raise ValueError(f"mode index {mode_index} out of range")
    d = layout.dims[mode_index]
    if local_op.shape != (d, d):
        raise ValueError(
            f"operator shape {local_op.shape} does not match mode {mode_index} (dim {d})")
    out = np.ones((1, 1), dtype=complex)
    for k, dk in enumerate(layout.dims):
        out = np.kron(out, local_op if k == mode_index else np.eye(dk, dtype=complex))
    return Operator(layout, out)


def projector(q1_level: int, q2_level: int, layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    """Projector |q1 q2><q1 q2| on the qutrit pair, identity on the resonators."""
    p1 = embed(transition(layout.dims[0], q1_level, q1_level), 0, layout)
    p2 = embed(transition(layout.dims[1], q2_level, q2_level), 1, layout)
    return p1 @ p2


def qutrit_pair_operator(mat: np.ndarray, layout: ModeLayout = DEFAULT_LAYOUT) -> Operator:
    """Lift an operator on the qutrit-qutrit factor to the full space."""
    d12 = layout.dims[0] * layout.dims[1]
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (d12, d12):
        raise ValueError(f"expected shape ({d12},{d12}), got {mat.shape}")
    rest = math.prod(layout.dims[2:]) if len(layout.dims) > 2 else 1
    return Operator(layout, np.kron(mat, np.eye(rest, dtype=complex)))


def qutrit_pair_ket(vec: np.ndarray, layout: ModeLayout = DEFAULT_LAYOUT) -> State:
    """Lift a qutrit-qutrit ket to the full space with the resonators in vacuum."""
    d12 = layout.dims[0] * layout.dims[1]
    vec = np.asarray(vec, dtype=complex)
    if vec.shape != (d12,):
        raise ValueError(f"expected shape ({d12},), got {vec.shape}")
    rest = math.prod(layout.dims[2:]) if len(layout.dims) > 2 else 1
    vac = np.zeros(rest, dtype=complex)
    vac[0] = 1.0
    return State(layout, np.kron(vec, vac))
