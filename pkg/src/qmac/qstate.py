"""Dense multi-qubit states: construction, composition, reduction, entropy.

Qubit ordering is big-endian: qubit 0 is the most significant tensor factor,
so ``basis_ket(1, 2)`` is |01>. All entropies are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, QubitIndexError, SizeError, ValidationError

TOL = 1e-9
EIG_CUTOFF = 1e-12
MAX_QUBITS = 14
MAX_DIM = 1 << MAX_QUBITS

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
# control value -> Pauli, as in |00><00| (x) I + |01><01| (x) X + |10><10| (x) Z + |11><11| (x) Y
CONTROLLED_PAULI = ("I", "X", "Z", "Y")


def _n_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise ValidationError(f"dimension {dim} is not a power of 2")
    return n


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    data: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.data)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"density matrix must be square, got shape {m.shape}")
        if m.shape[0] > MAX_DIM:
            raise SizeError(f"dimension {m.shape[0]} exceeds the dense cap {MAX_DIM}")
        m = _frozen(m)
        herm = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if herm > TOL:
            raise ValidationError(f"matrix is not Hermitian (max |A - A^+| = {herm:.3g})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TOL:
            raise ValidationError(f"trace is {tr!r}, expected 1")
        lowest = np.linalg.eigvalsh(m)[0]
        if lowest < -TOL:
            raise ValidationError(f"matrix has negative eigenvalue {lowest:.3g}")
        object.__setattr__(self, "data", m)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n_qubits(self) -> int:
        return _n_qubits(self.dim)

    def allclose(self, other: "DensityMatrix", atol: float = TOL) -> bool:
        return self.dim == other.dim and np.allclose(self.data, other.data, atol=atol, rtol=0)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalised state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes)
        if v.ndim != 1:
            raise ValidationError("amplitudes must be a 1-d vector")
        if v.shape[0] > MAX_DIM:
            raise SizeError(f"dimension {v.shape[0]} exceeds the dense cap {MAX_DIM}")
        v = _frozen(v)
        norm = np.vdot(v, v).real
        if abs(norm - 1.0) > TOL:
            raise ValidationError(f"squared norm is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_qubits(self) -> int:
        return _n_qubits(self.dim)

    def density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))


# ---------------------------------------------------------------- constructors

def basis_ket(i: int, n_qubits: int) -> PureState:
    if not 0 <= i < (1 << n_qubits):
        raise QubitIndexError(f"basis index {i} out of range for {n_qubits} qubits")
    v = np.zeros(1 << n_qubits, dtype=complex)
    v[i] = 1.0
    return PureState(v)


def bell_phi_plus() -> PureState:
    return PureState(np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2))


# (sign, bitstring) terms of the logical |0> of the five-qubit code
_CODE5_TERMS = (
    (+1, "00000"), (+1, "10010"), (+1, "01001"), (+1, "10100"),
    (+1, "01010"), (-1, "11011"), (-1, "00110"), (-1, "11000"),
    (-1, "11101"), (-1, "00011"), (-1, "11110"), (-1, "01111"),
    (-1, "10001"), (-1, "01100"), (-1, "10111"), (+1, "00101"),
)


def code_5qubit() -> PureState:
    """Logical |0_L> of the 5-qubit error-correcting code (16 terms of weight 1/4)."""
    v = np.zeros(32, dtype=complex)
    for sign, bits in _CODE5_TERMS:
        v[int(bits, 2)] = sign / 4.0
    return PureState(v)


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    d = 1 << n_qubits
    return DensityMatrix(np.eye(d, dtype=complex) / d)


def mix(weights: Sequence[float], states: Sequence[DensityMatrix]) -> DensityMatrix:
    """Convex combination sum_k w_k rho_k."""
    if len(weights) != len(states) or not states:
        raise ValidationError("weights and states must be non-empty and of equal length")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > TOL:
        raise DomainError("mixing weights must be a probability vector")
    dim = states[0].dim
    if any(s.dim != dim for s in states):
        raise ValidationError("all mixed states must share a dimension")
    acc = np.zeros((dim, dim), dtype=complex)
    for wk, s in zip(w, states):
        acc += wk * s.data
    return DensityMatrix(acc)


# ---------------------------------------------------------------- operations

def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """a (x) b with ``a`` on the most-significant qubits."""
    if a.dim * b.dim > MAX_DIM:
        raise SizeError(f"tensor product dimension {a.dim * b.dim} exceeds {MAX_DIM}")
    return DensityMatrix(np.kron(a.data, b.data))


def _check_qubit(k: int, n: int) -> None:
    if not isinstance(k, (int, np.integer)) or not 0 <= k < n:
        raise QubitIndexError(f"qubit index {k!r} out of range for {n} qubits")


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Trace out every qubit not in ``keep``; the result follows the order of ``keep``."""
    n = rho.n_qubits
    keep = list(keep)
    for k in keep:
        _check_qubit(k, n)
    if len(set(keep)) != len(keep):
        raise QubitIndexError(f"repeated qubit index in {keep}")
    t = rho.data.reshape((2,) * (2 * n))
    row = list(range(n))
    col = [n + q for q in range(n)]
    for q in range(n):
        if q not in keep:
            col[q] = row[q]
    out = [row[q] for q in keep] + [col[q] for q in keep]
    reduced = np.einsum(t, row + col, out)
    d = 1 << len(keep)
    return DensityMatrix(reduced.reshape(d, d))


def depolarize(rho: DensityMatrix, k: int) -> DensityMatrix:
    """Replace qubit ``k`` by I/2 (completely depolarizing channel on one qubit)."""
    n = rho.n_qubits
    _check_qubit(k, n)
    t = rho.data.reshape((2,) * (2 * n))
    traced = np.trace(t, axis1=k, axis2=n + k)
    # traced has axes (rows without k, cols without k); reinsert k as I/2
    out = np.multiply.outer(traced, np.eye(2) / 2.0)
    out = np.moveaxis(out, [2 * n - 2, 2 * n - 1], [k, n + k])
    return DensityMatrix(out.reshape(rho.dim, rho.dim))


def depolarize_many(rho: DensityMatrix, qubits: Iterable[int]) -> DensityMatrix:
    for k in qubits:
        rho = depolarize(rho, k)
    return rho


def apply_unitary(rho: DensityMatrix, u: np.ndarray, k: int) -> DensityMatrix:
    """Conjugate qubit ``k`` by the 2x2 unitary ``u``."""
    n = rho.n_qubits
    _check_qubit(k, n)
    full = np.kron(np.kron(np.eye(1 << k), u), np.eye(1 << (n - k - 1)))
    return DensityMatrix(full @ rho.data @ full.conj().T)


def apply_controlled_pauli(ctrl: int, target_rho: DensityMatrix, k: int) -> DensityMatrix:
    """Apply the Pauli selected by the 2-bit classical value ``ctrl`` to qubit ``k``.

    00 -> I, 01 -> sigma_x, 10 -> sigma_z, 11 -> sigma_y.
    """
    if ctrl not in (0, 1, 2, 3):
        raise DomainError(f"control value must be a 2-bit integer, got {ctrl!r}")
    return apply_unitary(target_rho, PAULI[CONTROLLED_PAULI[ctrl]], k)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -tr rho log2 rho, in bits."""
    m = rho.data
    herm = np.max(np.abs(m - m.conj().T))
    if herm > TOL:
        raise ValidationError(f"matrix is not Hermitian (max |A - A^+| = {herm:.3g})")
    ev = np.linalg.eigvalsh(m)
    if ev[0] < -TOL:
        raise ValidationError(f"negative eigenvalue {ev[0]:.3g}")
    ev = ev[ev > EIG_CUTOFF]
    s = float(-np.sum(ev * np.log2(ev)))
    return max(s, 0.0)
