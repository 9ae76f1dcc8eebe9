"""Discrete helper-sender channels: code-property checks, capacity bounds, protocol rates."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, QubitIndexError, ValidationError
from .qstate import (
    DensityMatrix,
    PureState,
    apply_controlled_pauli,
    basis_ket,
    bell_phi_plus,
    code_5qubit,
    depolarize_many,
    maximally_mixed,
    mix,
    tensor,
    von_neumann_entropy,
)

CODE_TOL = 1e-6


@dataclass(frozen=True)
class HelperChannelSpec:
    """Parameters of the helper-sender channel family.

    Attributes:
        n: number of helper senders.
        n_prime: number of two-bit lines of sender A.
        m: number of parallel channel uses.
    """

    n: int
    n_prime: int = 1
    m: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.n_prime <= self.n:
            raise DomainError(f"n_prime must lie in [1, n={self.n}], got {self.n_prime}")
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")

    @property
    def p(self) -> Fraction:
        """Probability that a given helper is active on one use (n_prime = 1)."""
        return Fraction(1, self.n)


@dataclass(frozen=True)
class ActiveSelection:
    """Per-use assignment of helpers to A's lines.

    ``assignment[j]`` is the tuple of helpers wired to A's lines on use ``j``.
    """

    n: int
    assignment: tuple

    def __post_init__(self):
        for row in self.assignment:
            if len(set(row)) != len(row):
                raise ValidationError(f"helpers repeat within one use: {row}")
            if any(not 0 <= h < self.n for h in row):
                raise QubitIndexError(f"helper index out of range in {row}")

    @property
    def counts(self) -> tuple:
        """l_i: number of uses on which helper i is active."""
        c = [0] * self.n
        for row in self.assignment:
            for h in row:
                c[h] += 1
        return tuple(c)


def active_selections(spec: HelperChannelSpec) -> Iterator[ActiveSelection]:
    """All equiprobable selection labels w for ``spec`` (C(n, n')^m of them)."""
    per_use = list(itertools.combinations(range(spec.n), spec.n_prime))
    for rows in itertools.product(per_use, repeat=spec.m):
        yield ActiveSelection(spec.n, tuple(rows))


@dataclass(frozen=True)
class ProtocolRate:
    rate_bits: float
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rate_bits < 0:
            raise DomainError(f"rate must be nonnegative, got {self.rate_bits}")


# ---------------------------------------------------------------- code property

def entropy_after_depolarizing(phi: PureState, e: Sequence[int]) -> float:
    """Entropy after completely depolarizing every qubit in ``e``."""
    rho = phi.density()
    n = rho.n_qubits
    for k in e:
        if not 0 <= k < n:
            raise QubitIndexError(f"qubit index {k} out of range for {n} qubits")
    return von_neumann_entropy(depolarize_many(rho, sorted(set(e))))


@dataclass
class CodeCheckReport:
    passed: bool
    worst_deviation: float
    first_failure: int | None
    rows: list  # (mask, entropy, expected, ok)


def _mask_indices(mask: int, m: int) -> list:
    # bit k of mask <-> qubit k
    return [k for k in range(m) if mask >> k & 1]


def check_code_property(phi: PureState, m: int, tol: float = CODE_TOL) -> CodeCheckReport:
    """Test S(rho_e) = min(2|e|, m) for every subset e of the m qubits."""
    if phi.n_qubits != m:
        raise ValidationError(f"state has {phi.n_qubits} qubits, expected m={m}")
    rows = []
    worst = 0.0
    first = None
    for mask in range(1 << m):
        e = _mask_indices(mask, m)
        s = entropy_after_depolarizing(phi, e)
        expected = min(2 * len(e), m)
        dev = abs(s - expected)
        ok = dev < tol
        worst = max(worst, dev)
        if not ok and first is None:
            first = mask
        rows.append((mask, s, expected, ok))
    return CodeCheckReport(first is None, worst, first, rows)


def named_state(name: str) -> PureState:
    """Lookup for the states whose code property is checked: zero, bell, code5."""
    table = {"zero": lambda: basis_ket(0, 1), "bell": bell_phi_plus, "code5": code_5qubit}
    if name not in table:
        raise DomainError(f"unknown state {name!r}; expected one of {sorted(table)}")
    return table[name]()


# ---------------------------------------------------------------- capacity bounds

def upper_bound_capacity(spec: HelperChannelSpec) -> Fraction:
    """n * sum_i C(m,i) p^i (1-p)^(m-i) min(2i, m) with p = 1/n, exactly."""
    if spec.n_prime != 1:
        raise DomainError("the binomial upper bound is defined for n_prime = 1 only")
    n, m = spec.n, spec.m
    p = Fraction(1, n)
    total = Fraction(0)
    for i in range(m + 1):
        total += comb(m, i) * p**i * (1 - p) ** (m - i) * min(2 * i, m)
    return n * total


def label_enumeration_bound(spec: HelperChannelSpec) -> Fraction:
    """Same bound summed label by label: sum_w p_w sum_i min(2 l_i(w), m)."""
    labels = list(active_selections(spec))
    pw = Fraction(1, len(labels))
    return sum((pw * sum(min(2 * l, spec.m) for l in w.counts) for w in labels), Fraction(0))


def flag_mixture_capacity_bound(weights: Sequence[float], caps: Sequence[float]) -> float:
    """Capacity bound of a flagged mixture: sum_w p_w C_w."""
    w = np.asarray(weights, dtype=float)
    c = np.asarray(caps, dtype=float)
    if w.shape != c.shape or w.ndim != 1 or w.size == 0:
        raise ValidationError("weights and caps must be equal-length non-empty vectors")
    if np.any(w < 0):
        raise DomainError("weights must be nonnegative")
    if np.any(c < 0):
        raise DomainError("capacities must be nonnegative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise DomainError(f"weights sum to {w.sum()!r}, expected 1")
    return float(w @ c)


def binomial_weights(n: int, m: int) -> list:
    """P(l = i) for one helper active with probability 1/n on each of m uses."""
    p = 1.0 / n
    return [comb(m, i) * p**i * (1 - p) ** (m - i) for i in range(m + 1)]


# ---------------------------------------------------------------- symmetric channel

def _proj(ket: PureState) -> DensityMatrix:
    return ket.density()


def symmetric_channel_outputs() -> dict:
    """Conditional outputs rho_{i,i'} of the symmetric two-mode channel.

    Qubit layout: [mode label, four channel outputs, two identity-channel outputs].
    The label is |0> for the first mode and |1> for the second.
    """
    label_f = _proj(basis_ket(0, 1))
    label_s = _proj(basis_ket(1, 1))
    bell = _proj(bell_phi_plus())
    out = {}
    for i in range(4):
        i_a2 = i & 1
        psi = apply_controlled_pauli(i, bell, 0)
        for ip in range(2):
            tail = _proj(basis_ket(ip, 1))
            mode_f = tensor(
                label_f,
                tensor(maximally_mixed(1),
                       tensor(_proj(basis_ket(i_a2, 1)), tensor(maximally_mixed(3), tail))),
            )
            mode_s = tensor(label_s, tensor(maximally_mixed(3), tensor(psi, tail)))
            out[(i, ip)] = mix([0.5, 0.5], [mode_f, mode_s])
    return out


def symmetric_channel_rates() -> dict:
    """Entropy of the mean output, mean conditional entropy and the Holevo quantity."""
    outs = symmetric_channel_outputs()
    states = list(outs.values())
    w = [1.0 / len(states)] * len(states)
    cond = [von_neumann_entropy(s) for s in states]
    s_mean = von_neumann_entropy(mix(w, states))
    s_cond = float(np.dot(w, cond))
    return {"S_mean": s_mean, "S_cond": s_cond, "chi": s_mean - s_cond, "S_each": cond}


def bell_protocol_regularized_rate(n: int, n_prime: int) -> float:
    """Per-use rate of A when helpers share Bell pairs across two uses.

    A selection repeats with probability p = 1/C(n, n'); otherwise two extra bits pass.
    """
    if n < 1 or not 1 <= n_prime <= n:
        raise DomainError(f"need 1 <= n_prime <= n, got n={n}, n_prime={n_prime}")
    p = Fraction(1, comb(n, n_prime))
    r_two_uses = p * 2 * n_prime + (1 - p) * (2 * n_prime + 2)
    return float(r_two_uses / 2)


def superadditivity_witness(n: int = 10, n_prime_1: int = 9, n_prime_2: int = 1) -> dict:
    """Compare the dense-coding rate of the joint channel with the sum of regularized bounds."""
    for npr in (n_prime_1, n_prime_2):
        if not 1 <= npr <= n:
            raise DomainError(f"n_prime={npr} outside [1, {n}]")
    lhs = 2 * n_prime_1
    rhs = min(2 * n_prime_1, n) + min(2 * n_prime_2, n)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs > rhs}
