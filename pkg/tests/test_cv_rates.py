import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from qmac.cv_rates import (
    VARIANTS,
    BsScenario,
    RateReport,
    XpScenario,
    demarcation_minimum,
    demarcation_theta,
    evaluate_bs,
    evaluate_xp,
    input_entropy_bound,
    loss_cutoff,
    max_sigma_x2,
    min_photons_to_beat,
    min_squeezing_threshold,
    optimize_one_mode_squeezed,
    output_entropy_bound,
    rate_bs_thermal,
    rate_coherent,
    rate_entangled,
    rate_one_mode_squeezed,
    rate_xp_noisy,
    rate_xp_thermal,
    superadditivity_margin,
    waterfill_two_channels,
)
from qmac.errors import DomainError, InfeasibleError
from qmac.gaussian import GOLDEN_T, db_to_r, xp_sigma2_noise


def g_oracle(x):
    return 0.0 if x <= 0 else (x + 1) * math.log2(x + 1) - x * math.log2(x)


# ---------------------------------------------------------------- rate formulas

def test_coherent_examples():
    assert rate_coherent(5.0, 0.0) == 0.0
    assert rate_coherent(3.0, math.pi / 2) == pytest.approx(2.0)
    assert rate_coherent(1e3, math.pi / 4) == pytest.approx(math.log2(501.0))


def test_one_mode_squeezed_examples():
    n_a = 7.0
    assert rate_one_mode_squeezed(4 * n_a, 0.0, 0.0, math.pi / 2) == pytest.approx(0.5 * math.log2(1 + 4 * n_a))
    assert rate_one_mode_squeezed(0.0, 0.3, 0.2, 0.5) == 0.0


def test_one_mode_squeezed_constraint():
    assert max_sigma_x2(2.0, math.asinh(1.0)) == pytest.approx(4.0)
    with pytest.raises(InfeasibleError):
        max_sigma_x2(1.0, 2.0)


def test_one_mode_squeezed_optimizer_beats_endpoints():
    n_a, n_b, theta = 100.0, 1.0, 0.4
    opt = optimize_one_mode_squeezed(n_a, n_b, theta)
    r = math.asinh(1.0)
    grid = np.linspace(0, math.asinh(math.sqrt(n_a)), 2001)
    brute = max(rate_one_mode_squeezed(max_sigma_x2(n_a, R), R, r, theta) for R in grid)
    assert opt.rate_bits >= brute - 1e-6
    assert opt.sigma_x2 == pytest.approx(4 * (n_a - math.sinh(opt.big_r) ** 2))


def test_one_mode_squeezed_optimum_grows_with_power():
    rates = [optimize_one_mode_squeezed(n, n, 0.5).rate_bits for n in (1e1, 1e2, 1e3, 1e4)]
    assert all(b > a for a, b in zip(rates, rates[1:]))


def test_entangled_examples():
    assert rate_entangled(50.0, 0.0, 0.7) == pytest.approx(rate_coherent(50.0, 0.7))
    r = 1.1
    theta = math.acos(math.tanh(r))
    assert rate_entangled(50.0, r, theta) == pytest.approx(math.log2(51.0), abs=1e-9)
    assert rate_entangled(50.0, 0.8, 0.0) == 0.0


def test_input_bound_examples():
    assert input_entropy_bound(0.0) == 0.0
    assert input_entropy_bound(1.0) == pytest.approx(2.0)


def test_output_bound_examples():
    for v in VARIANTS:
        assert output_entropy_bound(0.0, 0.0, 0.3, v) == 0.0
    assert output_entropy_bound(9.0, 4.0, math.pi / 2, "energy-conserving") == pytest.approx(g_oracle(9.0))
    assert output_entropy_bound(9.0, 4.0, 0.3, "amplitude") == pytest.approx(
        g_oracle((3 * math.sin(0.3) + 2 * math.cos(0.3)) ** 2))
    assert output_entropy_bound(9.0, 4.0, 0.3, "as-printed") == pytest.approx(
        g_oracle(3 * math.sin(0.3) ** 2 + 2 * math.cos(0.3) ** 2))


def test_output_bound_unknown_variant():
    with pytest.raises(DomainError):
        output_entropy_bound(1.0, 1.0, 0.3, "sqrt")


def test_xp_noisy_examples():
    assert rate_xp_noisy(0.0, 1.0, 1.0, 0.1) == 0.0
    rates = [rate_xp_noisy(10.0, s, s, 0.0) for s in (1, 2, 4, 8)]
    assert all(b > a for a, b in zip(rates, rates[1:]))
    assert rate_xp_noisy(10.0, 0.3, 0.4, 0.2) == pytest.approx(
        math.log2(1 + 10.0 / (math.exp(-0.6) + math.exp(-0.8) / 2 + 0.1)))


def test_xp_thermal_examples():
    assert rate_xp_thermal(4.0, 0.5, 0.5, 0.0, 1.0) == pytest.approx(rate_xp_noisy(4.0, 0.5, 0.5, 0.0))
    assert rate_xp_thermal(0.0, 0.5, 0.5, 0.3, 1.0) == 0.0
    assert rate_xp_thermal(4.0, 0.5, 0.5, math.pi / 2, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_bs_thermal_examples():
    assert rate_bs_thermal(100.0, 0.7, 0.4, 1.0, 0.3) == pytest.approx(rate_entangled(100.0, 0.7, 0.4))
    assert rate_bs_thermal(100.0, 0.7, 0.4, 0.0, 0.3) == 0.0


def test_bs_thermal_below_bound_at_085():
    # no squeezing level beats the product bound at T = 0.85
    rs = np.linspace(0, 5, 5001)
    n_bs = 2 * np.sinh(rs) ** 2
    margins = [rate_bs_thermal(1e3, r, 0.25, 0.85, 0.0) - output_entropy_bound(1e3, nb, 0.25)
               for r, nb in zip(rs, n_bs)]
    assert max(margins) <= 0.0


def test_xp_noise_anchor():
    vals = {eta: xp_sigma2_noise(GOLDEN_T, eta, db_to_r(10.0)) for eta in (0.98, 0.99)}
    assert abs(vals[0.98] - 0.098) / 0.098 < 0.1


# ---------------------------------------------------------------- solvers

def test_demarcation_examples():
    roots = demarcation_theta(1e3, 1.0)
    assert len(roots) == 2
    for th in roots:
        assert superadditivity_margin(1e3, 1.0, th) == pytest.approx(0.0, abs=1e-6)
    assert demarcation_theta(1e3, 0.0) == []
    assert demarcation_theta(1e3, 1e-4) == []


def test_demarcation_minimum_is_tangent():
    m = demarcation_minimum(1e3)
    assert m.n_b_min == pytest.approx(0.9917, abs=1e-3)
    assert m.theta == pytest.approx(0.2856, abs=2e-3)
    # slightly below the minimum there is no crossing, slightly above there are two
    assert demarcation_theta(1e3, m.n_b_min * 0.99) == []
    assert len(demarcation_theta(1e3, m.n_b_min * 1.01)) == 2


def test_min_photons_to_beat():
    nb = min_photons_to_beat(1e3, 0.28)
    assert superadditivity_margin(1e3, nb, 0.28) == pytest.approx(0.0, abs=1e-9)
    assert min_photons_to_beat(1e3, 1e-6) == math.inf


def test_threshold_examples():
    th = min_squeezing_threshold(1e3, 0.25, 0.94, 0.09)
    assert th.db == pytest.approx(7.98, abs=0.01)
    assert th.n_b == pytest.approx(2 * math.sinh(th.r) ** 2)
    assert min_squeezing_threshold(1e3, 0.28).db == pytest.approx(5.70, abs=0.01)
    assert min_squeezing_threshold(1e3, 0.25, 0.5, 0.0) is None


def test_loss_cutoff():
    t = loss_cutoff(1e3, 0.25)
    assert 0.80 <= t <= 0.90
    rs = np.linspace(0, 5, 4001)
    for tt, sign in ((t - 1e-3, -1), (t + 1e-3, 1)):
        best = max(rate_bs_thermal(1e3, r, 0.25, tt, 0.0) - output_entropy_bound(1e3, 2 * math.sinh(r) ** 2, 0.25)
                   for r in rs)
        assert sign * best > 0


def test_loss_cutoff_none_when_never_beaten():
    assert loss_cutoff(1e3, 1.4) is None


# ---------------------------------------------------------------- waterfilling

def test_waterfill_examples():
    p1, p2, _ = waterfill_two_channels(4.0, 1.5, 1.5)
    assert (p1, p2) == (2.0, 2.0)
    p1, p2, _ = waterfill_two_channels(10.0, 1.0, 100.0)
    assert (p1, p2) == (10.0, 0.0)
    p1, p2, c = waterfill_two_channels(3.0, 1.0, 2.0)
    assert (p1, p2) == pytest.approx((2.0, 1.0))
    assert c == pytest.approx(0.5 * math.log2(3) + 0.5 * math.log2(1.5))


def test_waterfill_domain():
    with pytest.raises(DomainError):
        waterfill_two_channels(1.0, 0.0, 1.0)


# ---------------------------------------------------------------- scenarios

def test_scenario_validation():
    with pytest.raises(DomainError):
        BsScenario(theta=2.0, n_a=1.0)
    with pytest.raises(DomainError):
        BsScenario(theta=0.3, n_a=1.0, encoding="heterodyne")
    with pytest.raises(DomainError):
        XpScenario(big_r=-1.0, r=0.0, sigma2=1.0)
    with pytest.raises(DomainError):
        RateReport(-1.0)


def test_evaluate_bs_encodings():
    coh = evaluate_bs(BsScenario(0.3, 100.0, 1.0, "coherent"))
    ent = evaluate_bs(BsScenario(0.3, 100.0, 1.0, "two_mode_entangled"))
    sq = evaluate_bs(BsScenario(0.3, 100.0, 1.0, "one_mode_squeezed"))
    assert coh.rate_bits == pytest.approx(rate_coherent(100.0, 0.3))
    assert ent.rate_bits == pytest.approx(rate_entangled(100.0, math.asinh(math.sqrt(0.5)), 0.3))
    assert sq.rate_bits == pytest.approx(optimize_one_mode_squeezed(100.0, 1.0, 0.3).rate_bits)
    assert set(ent.bound_bits) == {"output_entropy", "input_entropy"}


def test_evaluate_xp():
    rep = evaluate_xp(XpScenario(0.5, 0.5, 4.0, 0.1))
    assert rep.rate_bits == pytest.approx(rate_xp_noisy(4.0, 0.5, 0.5, 0.1))
    rep = evaluate_xp(XpScenario(0.5, 0.5, 4.0, 0.0, t_loss=0.9, n_th=0.2))
    assert rep.rate_bits == pytest.approx(rate_xp_thermal(4.0, 0.5, 0.5, math.acos(math.sqrt(0.9)), 0.2))


# ---------------------------------------------------------------- properties

n_as = st.floats(0.0, 1e6)
rs = st.floats(0.0, 4.0)
thetas = st.floats(0.0, math.pi / 2)


@pytest.mark.property
@given(n_as, rs)
def test_prop_entangled_optimum_identity(n_a, r):
    theta = math.acos(math.tanh(r))
    assert rate_entangled(n_a, r, theta) == pytest.approx(math.log2(1 + n_a), abs=1e-9, rel=1e-12)


@pytest.mark.property
@given(n_as, thetas)
def test_prop_entangled_zero_squeezing_is_coherent(n_a, theta):
    assert rate_entangled(n_a, 0.0, theta) == pytest.approx(rate_coherent(n_a, theta), abs=1e-12)


@pytest.mark.property
@given(n_as, rs, thetas, st.floats(0.0, 5.0))
def test_prop_bs_thermal_lossless_is_entangled(n_a, r, theta, n_th):
    assert rate_bs_thermal(n_a, r, theta, 1.0, n_th) == pytest.approx(rate_entangled(n_a, r, theta), abs=1e-12)


@pytest.mark.property
@given(st.floats(0.0, 100.0), rs, rs)
def test_prop_xp_thermal_without_loss_is_noiseless_xp(sigma2, big_r, r):
    assert rate_xp_thermal(sigma2, big_r, r, 0.0, 3.0) == pytest.approx(rate_xp_noisy(sigma2, big_r, r, 0.0), abs=1e-12)


@pytest.mark.property
@given(n_as, rs, thetas)
def test_prop_entangled_below_input_bound(n_a, r, theta):
    assert rate_entangled(n_a, r, theta) <= input_entropy_bound(n_a) + 1e-9


@pytest.mark.property
@given(st.floats(0.0, 100.0), st.floats(0.01, 10.0), st.floats(0.01, 10.0))
def test_prop_waterfill_conserves_power_and_beats_equal_split(p, n1, n2):
    p1, p2, c = waterfill_two_channels(p, n1, n2)
    assert p1 >= 0 and p2 >= 0
    assert p1 + p2 == pytest.approx(p, abs=1e-9)
    equal = 0.5 * math.log2(1 + p / 2 / n1) + 0.5 * math.log2(1 + p / 2 / n2)
    assert c >= equal - 1e-12


@pytest.mark.property
@given(st.floats(1e-3, 1e6), st.floats(0.0, 1e3), thetas)
def test_prop_variants_ordering(n_a, n_b, theta):
    # (sqrt(a) s + sqrt(b) c)^2 >= a s^2 + b c^2 when both terms are nonnegative
    amp = output_entropy_bound(n_a, n_b, theta, "amplitude")
    energy = output_entropy_bound(n_a, n_b, theta, "energy-conserving")
    assert amp >= energy - 1e-9


@pytest.mark.property
@given(st.floats(0.5, 10.0))
def test_prop_demarcation_lower_crossing_monotone(n_b):
    # lowest crossing theta is non-increasing in N_B (no crossing counts as +inf)
    step = 0.05
    lo = demarcation_theta(1e3, n_b)
    hi = demarcation_theta(1e3, n_b + step)
    a = lo[0] if lo else math.inf
    b = hi[0] if hi else math.inf
    assert b <= a + 1e-6


@pytest.mark.property
@given(st.floats(0.86, 0.999))
def test_prop_threshold_non_increasing_in_transmissivity(t):
    t2 = min(1.0, t + 0.01)
    a = min_squeezing_threshold(1e3, 0.25, t, 0.0)
    b = min_squeezing_threshold(1e3, 0.25, t2, 0.0)
    a_db = math.inf if a is None else a.db
    b_db = math.inf if b is None else b.db
    assert b_db <= a_db + 1e-6


@pytest.mark.property
@given(st.floats(1.0, 1e6), st.floats(0.0, 20.0), st.floats(0.01, 1.5), st.floats(0.0, 1.0),
       st.floats(0.0, 2.0), st.sampled_from(VARIANTS))
def test_prop_margin_matches_scalar_formulas(n_a, n_b, theta, t, n_th, variant):
    assume(t > 0 or n_th >= 0)
    r = math.asinh(math.sqrt(n_b / 2))
    expected = rate_bs_thermal(n_a, r, theta, t, n_th) - output_entropy_bound(n_a, n_b, theta, variant)
    assert superadditivity_margin(n_a, n_b, theta, t, n_th, variant) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("call", [
    lambda: rate_coherent(1.0, -0.1),
    lambda: rate_entangled(1.0, 0.2, 2.0),
    lambda: rate_bs_thermal(1.0, 0.2, 0.3, 1.5, 0.0),
    lambda: rate_xp_thermal(1.0, 0.1, 0.1, 3.0, 0.0),
    lambda: output_entropy_bound(1.0, 1.0, 1.6),
    lambda: min_squeezing_threshold(1e3, 3.0),
    lambda: loss_cutoff(1e3, -1.0),
    lambda: demarcation_theta(1e3, 1.0, t=1.2),
])
def test_angle_and_transmissivity_domain(call):
    with pytest.raises(DomainError):
        call()
