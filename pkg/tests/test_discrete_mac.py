from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmac.discrete_mac import (
    ActiveSelection,
    HelperChannelSpec,
    ProtocolRate,
    active_selections,
    bell_protocol_regularized_rate,
    binomial_weights,
    check_code_property,
    entropy_after_depolarizing,
    flag_mixture_capacity_bound,
    label_enumeration_bound,
    named_state,
    superadditivity_witness,
    symmetric_channel_outputs,
    symmetric_channel_rates,
    upper_bound_capacity,
)
from qmac.errors import DomainError, QubitIndexError, ValidationError
from qmac.qstate import PureState, basis_ket, bell_phi_plus, code_5qubit, von_neumann_entropy


def bound_oracle(n, m):
    """Float term-by-term sum, written independently of the Fraction implementation."""
    p = 1.0 / n
    total = 0.0
    for i in range(m + 1):
        total += comb(m, i) * (p**i) * ((1 - p) ** (m - i)) * min(2 * i, m)
    return n * total


# ---------------------------------------------------------------- helper channel types

def test_helper_channel_validation():
    with pytest.raises(DomainError):
        HelperChannelSpec(0)
    with pytest.raises(DomainError):
        HelperChannelSpec(3, 4)
    with pytest.raises(DomainError):
        HelperChannelSpec(3, 1, 0)


def test_active_selection_counts():
    sel = ActiveSelection(3, ((0, 1), (1, 2)))
    assert sel.counts == (1, 2, 1)
    with pytest.raises(ValidationError):
        ActiveSelection(3, ((1, 1),))
    with pytest.raises(QubitIndexError):
        ActiveSelection(2, ((2,),))


def test_active_selections_enumeration():
    spec = HelperChannelSpec(4, 2, 2)
    labels = list(active_selections(spec))
    assert len(labels) == comb(4, 2) ** 2
    assert all(sum(w.counts) == spec.m * spec.n_prime for w in labels)


def test_protocol_rate_nonnegative():
    assert ProtocolRate(1.5, {"n": 2}).rate_bits == 1.5
    with pytest.raises(DomainError):
        ProtocolRate(-0.1)


# ---------------------------------------------------------------- code property

def test_entropy_after_depolarizing_examples():
    assert entropy_after_depolarizing(basis_ket(0, 1), []) == pytest.approx(0.0, abs=1e-12)
    assert entropy_after_depolarizing(bell_phi_plus(), [0]) == pytest.approx(2.0, abs=1e-9)
    assert entropy_after_depolarizing(code_5qubit(), [0, 1]) == pytest.approx(4.0, abs=1e-9)


def test_entropy_after_depolarizing_bad_index():
    with pytest.raises(QubitIndexError):
        entropy_after_depolarizing(bell_phi_plus(), [2])


@pytest.mark.parametrize("name,m,count", [("zero", 1, 2), ("bell", 2, 4), ("code5", 5, 32)])
def test_code_property_passes(name, m, count):
    rep = check_code_property(named_state(name), m)
    assert rep.passed
    assert len(rep.rows) == count
    assert rep.worst_deviation < 1e-6
    assert rep.first_failure is None


def test_code_property_fails_for_product_state():
    rep = check_code_property(basis_ket(0, 2), 2)
    assert not rep.passed
    # e = {qubit 0} is mask 1: S = 1 < min(2, 2)
    assert rep.first_failure == 0b01
    mask, s, expected, ok = rep.rows[1]
    assert s == pytest.approx(1.0) and expected == 2 and not ok


def test_code_property_qubit_count_mismatch():
    with pytest.raises(ValidationError):
        check_code_property(bell_phi_plus(), 3)


def test_named_state_unknown():
    with pytest.raises(DomainError):
        named_state("ghz")


# ---------------------------------------------------------------- bounds

@pytest.mark.parametrize("m,value", [(1, Fraction(1)), (2, Fraction(3)), (5, Fraction(65, 8))])
def test_upper_bound_values(m, value):
    b = upper_bound_capacity(HelperChannelSpec(2, 1, m))
    assert b == value
    assert float(b) == pytest.approx(bound_oracle(2, m), rel=1e-12)


def test_upper_bound_requires_single_line():
    with pytest.raises(DomainError):
        upper_bound_capacity(HelperChannelSpec(3, 2, 1))


@pytest.mark.parametrize("n", range(1, 11))
@pytest.mark.parametrize("m", range(1, 11))
def test_upper_bound_per_use_cap(n, m):
    b = upper_bound_capacity(HelperChannelSpec(n, 1, m))
    assert float(b) == pytest.approx(bound_oracle(n, m), rel=1e-12)
    assert b / m <= min(2, n)


@pytest.mark.parametrize("n", range(1, 11))
def test_upper_bound_single_use_is_one(n):
    assert upper_bound_capacity(HelperChannelSpec(n, 1, 1)) == 1


@pytest.mark.parametrize("n,m", [(2, 1), (2, 2), (2, 5), (3, 3), (4, 2)])
def test_label_enumeration_agrees(n, m):
    spec = HelperChannelSpec(n, 1, m)
    assert label_enumeration_bound(spec) == upper_bound_capacity(spec)


def test_flag_mixture_examples():
    assert flag_mixture_capacity_bound([1.0], [3.0]) == 3.0
    assert flag_mixture_capacity_bound([0.5, 0.5], [1.0, 2.0]) == 1.5


def test_flag_mixture_reproduces_binomial_term():
    w = binomial_weights(2, 2)
    caps = [min(2 * l, 2) for l in range(3)]
    assert flag_mixture_capacity_bound(w, caps) * 2 == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("w,c", [([-0.5, 1.5], [1, 1]), ([0.3, 0.3], [1, 1]), ([1.0], [-1.0])])
def test_flag_mixture_domain(w, c):
    with pytest.raises(DomainError):
        flag_mixture_capacity_bound(w, c)


# ---------------------------------------------------------------- symmetric channel

def test_symmetric_channel_rates():
    r = symmetric_channel_rates()
    assert r["S_mean"] == pytest.approx(7.0, abs=1e-9)
    assert r["S_cond"] == pytest.approx(4.5, abs=1e-9)
    assert r["chi"] == pytest.approx(2.5, abs=1e-9)


def test_symmetric_channel_each_conditional_entropy():
    outs = symmetric_channel_outputs()
    assert len(outs) == 8
    for rho in outs.values():
        assert rho.n_qubits == 7
        assert von_neumann_entropy(rho) == pytest.approx(4.5, abs=1e-9)


def test_symmetric_channel_mean_state_is_maximally_mixed():
    outs = list(symmetric_channel_outputs().values())
    mean = sum(o.data for o in outs) / len(outs)
    assert np.allclose(mean, np.eye(128) / 128)


# ---------------------------------------------------------------- regularized protocol

@pytest.mark.parametrize("n,np_,value", [(10, 1, 1.9), (1, 1, 1.0), (10, 9, 9.9)])
def test_bell_protocol_rate(n, np_, value):
    assert bell_protocol_regularized_rate(n, np_) == pytest.approx(value, abs=1e-12)


@pytest.mark.parametrize("n", range(2, 31))
def test_bell_protocol_beats_single_use(n):
    assert bell_protocol_regularized_rate(n, 1) > 1.0


def test_bell_protocol_domain():
    with pytest.raises(DomainError):
        bell_protocol_regularized_rate(3, 4)


def test_witness_default():
    assert superadditivity_witness() == {"lhs": 18, "rhs": 12, "holds": True}


def test_witness_hypothetical():
    assert superadditivity_witness(n_prime_1=5) == {"lhs": 10, "rhs": 12, "holds": False}


# ---------------------------------------------------------------- properties

@pytest.mark.property
@given(st.integers(1, 10), st.integers(1, 10))
def test_prop_bound_cap_and_oracle(n, m):
    b = upper_bound_capacity(HelperChannelSpec(n, 1, m))
    assert 0 <= b <= m * min(2, n)
    assert float(b) == pytest.approx(bound_oracle(n, m), rel=1e-12)


@pytest.mark.property
@given(st.integers(2, 30), st.data())
def test_prop_bell_protocol_strictly_above_n_prime(n, data):
    npr = data.draw(st.integers(1, n - 1))
    assert bell_protocol_regularized_rate(n, npr) > npr


@pytest.mark.property
@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=6), st.data())
def test_prop_flag_mixture_is_convex_combination(raw, data):
    w = np.array(raw) / sum(raw)
    caps = data.draw(st.lists(st.floats(0.0, 10.0), min_size=len(w), max_size=len(w)))
    val = flag_mixture_capacity_bound(w, caps)
    assert min(caps) - 1e-9 <= val <= max(caps) + 1e-9


@pytest.mark.property
@given(st.integers(0, 31))
def test_prop_code_word_entropy_rule(mask):
    e = [k for k in range(5) if mask >> k & 1]
    s = entropy_after_depolarizing(code_5qubit(), e)
    assert s == pytest.approx(min(2 * len(e), 5), abs=1e-6)


@pytest.mark.property
@given(st.integers(0, 2**32 - 1))
def test_prop_random_two_qubit_pure_states_fail_unless_maximally_entangled(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    phi = PureState(v / np.linalg.norm(v))
    rep = check_code_property(phi, 2)
    svals = np.linalg.svd(phi.amplitudes.reshape(2, 2), compute_uv=False)
    maximally_entangled = np.allclose(svals, 1 / np.sqrt(2), atol=1e-4)
    assert rep.passed == maximally_entangled
