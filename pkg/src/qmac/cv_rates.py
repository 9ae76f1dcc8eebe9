"""Closed-form rates, entropy bounds and threshold solvers for Gaussian MAC encodings.

Every rate is in bits per channel use. ``N_A`` and ``N_B`` are mean photon
numbers available to the two senders; ``N_B`` counts both modes of a two-mode
squeezed vacuum, so r = asinh(sqrt(N_B / 2)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError, InfeasibleError
from .gaussian import photons_to_db, r_to_db, squeezing_for_photons
from .kernels import VARIANT_CODES, bs_margin_grid, g_bits

VARIANTS = tuple(VARIANT_CODES)
DEFAULT_VARIANT = "amplitude"
SCAN_SAMPLES = 400
THETA_TOL = 1e-6
HALF_PI = math.pi / 2.0


def _nonneg(**kw) -> None:
    for k, v in kw.items():
        if not v >= 0:
            raise DomainError(f"{k} must be nonnegative, got {v!r}")


def _check_theta(theta: float, name: str = "theta") -> None:
    if not 0.0 <= theta <= HALF_PI:
        raise DomainError(f"{name} must lie in [0, pi/2], got {theta!r}")


def _check_t(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {t!r}")


def _g(x: float) -> float:
    return float(g_bits(np.array([x]))[0])


# ---------------------------------------------------------------- rate formulas

def rate_coherent(n_a: float, theta: float) -> float:
    _nonneg(n_a=n_a)
    _check_theta(theta)
    return math.log2(1.0 + math.sin(theta) ** 2 * n_a)


def rate_one_mode_squeezed(sigma_x2: float, big_r: float, r: float, theta: float) -> float:
    """Homodyne rate with A sending x-squeezed displaced states and B a squeezed vacuum."""
    _nonneg(sigma_x2=sigma_x2, R=big_r, r=r)
    _check_theta(theta)
    s2, c2 = math.sin(theta) ** 2, math.cos(theta) ** 2
    noise = s2 * math.exp(-2.0 * big_r) + c2 * math.exp(-2.0 * r)
    return 0.5 * math.log2(1.0 + sigma_x2 * s2 / noise)


def max_sigma_x2(n_a: float, big_r: float) -> float:
    """Largest displacement variance allowed once sinh^2 R photons go into squeezing."""
    _nonneg(n_a=n_a, R=big_r)
    spare = n_a - math.sinh(big_r) ** 2
    if spare < -1e-12:
        raise InfeasibleError(f"squeezing R={big_r} needs {math.sinh(big_r) ** 2:.6g} photons, only {n_a} available")
    return 4.0 * max(spare, 0.0)


@dataclass
class SqueezedOptimum:
    rate_bits: float
    big_r: float
    sigma_x2: float


def optimize_one_mode_squeezed(n_a: float, n_b: float, theta: float, tol: float = 1e-8) -> SqueezedOptimum:
    """Maximize the one-mode squeezed rate over A's squeezing R; B squeezes fully (sinh^2 r = N_B)."""
    _nonneg(n_a=n_a, n_b=n_b)
    _check_theta(theta)
    r = math.asinh(math.sqrt(n_b))
    upper = math.asinh(math.sqrt(n_a))
    if upper == 0.0:
        return SqueezedOptimum(0.0, 0.0, 0.0)

    def neg(big_r):
        return -rate_one_mode_squeezed(max_sigma_x2(n_a, big_r), big_r, r, theta)

    res = minimize_scalar(neg, bounds=(0.0, upper), method="bounded", options={"xatol": tol})
    best_r = float(res.x)
    # the bounded search never probes the endpoints themselves
    for cand in (0.0, upper):
        if neg(cand) < neg(best_r):
            best_r = cand
    return SqueezedOptimum(-neg(best_r), best_r, max_sigma_x2(n_a, best_r))


def rate_entangled(n_a: float, r: float, theta: float) -> float:
    """A displaces coherently with 2 N_A variance; B feeds one arm of a two-mode squeezed vacuum."""
    _nonneg(n_a=n_a, r=r)
    _check_theta(theta)
    amp = math.cosh(r) - math.cos(theta) * math.sinh(r)
    return math.log2(1.0 + n_a * math.sin(theta) ** 2 / amp**2)


def rate_xp_noisy(sigma2: float, big_r: float, r: float, sigma2_noise: float) -> float:
    _nonneg(sigma2=sigma2, R=big_r, r=r, sigma2_noise=sigma2_noise)
    den = math.exp(-2.0 * big_r) + math.exp(-2.0 * r) / 2.0 + sigma2_noise / 2.0
    return math.log2(1.0 + sigma2 / den)


def rate_xp_thermal(sigma2: float, big_r: float, r: float, omega: float, n_th: float) -> float:
    _nonneg(sigma2=sigma2, R=big_r, r=r, n_th=n_th)
    _check_theta(omega, "omega")
    c2, s2 = math.cos(omega) ** 2, math.sin(omega) ** 2
    den = (math.exp(-2.0 * big_r) + math.exp(-2.0 * r) / 2.0) * c2 + (1.0 + n_th) * s2
    return math.log2(1.0 + sigma2 * c2 / den)


def rate_bs_thermal(n_a: float, r: float, theta: float, t: float, n_th: float) -> float:
    """Entangled-assisted beam-splitter rate with both outputs sent through loss T and N_th thermal photons."""
    _nonneg(n_a=n_a, r=r, n_th=n_th)
    _check_theta(theta)
    _check_t(t)
    amp = math.cosh(r) - math.cos(theta) * math.sinh(r)
    den = amp**2 * t + (1.0 + 2.0 * n_th) * (1.0 - t)
    return math.log2(1.0 + n_a * math.sin(theta) ** 2 * t / den)


# ---------------------------------------------------------------- entropy bounds

def output_entropy_bound(n_a: float, n_b: float, theta: float, variant: str = DEFAULT_VARIANT) -> float:
    """Product-input bound on A's rate: entropy of a thermal mode at the output photon level.

    amplitude:          g((sqrt(N_A) sin(theta) + sqrt(N_B) cos(theta))^2)
    energy-conserving:  g(N_A sin^2(theta) + N_B cos^2(theta))
    as-printed:         g(sqrt(N_A) sin^2(theta) + sqrt(N_B) cos^2(theta))
    """
    _nonneg(n_a=n_a, n_b=n_b)
    _check_theta(theta)
    s, c = math.sin(theta), math.cos(theta)
    if variant == "amplitude":
        n_out = (math.sqrt(n_a) * s + math.sqrt(n_b) * c) ** 2
    elif variant == "energy-conserving":
        n_out = n_a * s * s + n_b * c * c
    elif variant == "as-printed":
        n_out = math.sqrt(n_a) * s * s + math.sqrt(n_b) * c * c
    else:
        raise DomainError(f"unknown bound variant {variant!r}; expected one of {VARIANTS}")
    return _g(n_out)


def input_entropy_bound(n_a: float) -> float:
    _nonneg(n_a=n_a)
    return _g(n_a)


def _check_variant(variant: str) -> None:
    if variant not in VARIANT_CODES:
        raise DomainError(f"unknown bound variant {variant!r}; expected one of {VARIANTS}")


def superadditivity_margin(n_a: float, n_b: float, theta: float, t: float = 1.0, n_th: float = 0.0,
                           variant: str = DEFAULT_VARIANT) -> float:
    """rate_bs_thermal - output_entropy_bound at one point; positive means the bound is beaten."""
    _check_variant(variant)
    _check_theta(theta)
    _check_t(t)
    return float(bs_margin_grid(n_a, [squeezing_for_photons(n_b)], [theta], t, n_th, variant)[0, 0])


# ---------------------------------------------------------------- root finding helpers

def _sign_change_roots(fn, grid: np.ndarray, values: np.ndarray, xtol: float) -> list:
    roots = []
    for k in range(len(grid) - 1):
        a, b = values[k], values[k + 1]
        if a == 0.0:
            roots.append(float(grid[k]))
        elif a * b < 0.0:
            roots.append(float(brentq(fn, grid[k], grid[k + 1], xtol=xtol)))
    return roots


def demarcation_theta(n_a: float, n_b: float, variant: str = DEFAULT_VARIANT, t: float = 1.0,
                      n_th: float = 0.0, samples: int = SCAN_SAMPLES) -> list:
    """All theta in (0, pi/2) where the entangled rate meets the output-entropy bound."""
    _nonneg(n_a=n_a, n_b=n_b, n_th=n_th)
    _check_variant(variant)
    _check_t(t)
    if n_a == 0 or n_b == 0:
        return []
    r = squeezing_for_photons(n_b)
    eps = 1e-9
    grid = np.linspace(eps, HALF_PI - eps, samples)
    vals = bs_margin_grid(n_a, [r], grid, t, n_th, variant)[:, 0]

    def fn(th):
        return float(bs_margin_grid(n_a, [r], [th], t, n_th, variant)[0, 0])

    return _sign_change_roots(fn, grid, vals, THETA_TOL)


def min_photons_to_beat(n_a: float, theta: float, variant: str = DEFAULT_VARIANT, t: float = 1.0,
                        n_th: float = 0.0, n_b_max: float = 100.0, samples: int = SCAN_SAMPLES) -> float:
    """Smallest N_B at which the entangled rate exceeds the bound at fixed theta (inf if none)."""
    _check_variant(variant)
    _check_theta(theta)
    _check_t(t)
    nb = np.geomspace(1e-6, n_b_max, samples)
    rs = np.arcsinh(np.sqrt(nb / 2.0))
    vals = bs_margin_grid(n_a, rs, [theta], t, n_th, variant)[0]
    pos = np.nonzero(vals > 0.0)[0]
    if len(pos) == 0:
        return math.inf
    k = pos[0]
    if k == 0:
        return float(nb[0])

    def fn(x):
        return float(bs_margin_grid(n_a, [math.asinh(math.sqrt(x / 2.0))], [theta], t, n_th, variant)[0, 0])

    return float(brentq(fn, nb[k - 1], nb[k], xtol=1e-13, rtol=1e-13))


@dataclass
class DemarcationMinimum:
    n_b_min: float
    theta: float


def demarcation_minimum(n_a: float, variant: str = DEFAULT_VARIANT, t: float = 1.0, n_th: float = 0.0,
                        theta_min: float = 1e-4, samples: int = SCAN_SAMPLES) -> DemarcationMinimum:
    """Lowest point of the demarcation curve: the least N_B admitting any crossing, and its theta.

    At that N_B the two crossing angles merge, so ``theta`` is the single tangent crossing.
    """
    _nonneg(n_a=n_a)
    logs = np.linspace(math.log(theta_min), math.log(HALF_PI - 1e-6), samples)

    def nb_at(lt):
        return min_photons_to_beat(n_a, math.exp(lt), variant, t, n_th)

    vals = np.array([nb_at(lt) for lt in logs])
    k = int(np.argmin(vals))
    if not np.isfinite(vals[k]):
        return DemarcationMinimum(math.inf, math.nan)
    lo, hi = logs[max(k - 1, 0)], logs[min(k + 1, samples - 1)]
    # inf (no crossing) would poison the parabolic steps
    res = minimize_scalar(lambda lt: min(nb_at(lt), 1e300), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-9})
    if res.fun <= vals[k]:
        return DemarcationMinimum(float(res.fun), math.exp(float(res.x)))
    return DemarcationMinimum(float(vals[k]), math.exp(float(logs[k])))


@dataclass
class SqueezingThreshold:
    r: float
    db: float
    n_b: float


def min_squeezing_threshold(n_a: float, theta: float, t: float = 1.0, n_th: float = 0.0,
                            variant: str = DEFAULT_VARIANT, r_max: float = 5.0,
                            samples: int = 4 * SCAN_SAMPLES) -> SqueezingThreshold | None:
    """Smallest two-mode squeezing whose rate beats the output-entropy bound, or None."""
    _nonneg(n_a=n_a, n_th=n_th)
    _check_variant(variant)
    _check_theta(theta)
    _check_t(t)
    rs = np.linspace(0.0, r_max, samples)
    vals = bs_margin_grid(n_a, rs, [theta], t, n_th, variant)[0]
    pos = np.nonzero(vals > 0.0)[0]
    if len(pos) == 0:
        return None
    k = pos[0]
    if k == 0:
        r = 0.0
    else:
        def fn(x):
            return float(bs_margin_grid(n_a, [x], [theta], t, n_th, variant)[0, 0])
        r = float(brentq(fn, rs[k - 1], rs[k], xtol=1e-12))
    n_b = 2.0 * math.sinh(r) ** 2
    return SqueezingThreshold(r, r_to_db(r), n_b)


def best_margin(n_a: float, theta: float, t: float, n_th: float = 0.0, variant: str = DEFAULT_VARIANT,
                r_max: float = 5.0, samples: int = 4 * SCAN_SAMPLES) -> float:
    """max over r of the superadditivity margin at fixed loss."""
    rs = np.linspace(0.0, r_max, samples)
    vals = bs_margin_grid(n_a, rs, [theta], t, n_th, variant)[0]
    k = int(np.argmax(vals))
    lo, hi = rs[max(k - 1, 0)], rs[min(k + 1, samples - 1)]
    if hi <= lo:
        return float(vals[k])
    res = minimize_scalar(lambda x: -float(bs_margin_grid(n_a, [x], [theta], t, n_th, variant)[0, 0]),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    return max(float(vals[k]), -float(res.fun))


def loss_cutoff(n_a: float, theta: float, n_th: float = 0.0, variant: str = DEFAULT_VARIANT,
                tol: float = 1e-6) -> float | None:
    """Largest T at which no squeezing beats the bound; None if the bound is never beaten."""
    _nonneg(n_a=n_a, n_th=n_th)
    _check_variant(variant)
    _check_theta(theta)
    if best_margin(n_a, theta, 1.0, n_th, variant) <= 0.0:
        return None
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if best_margin(n_a, theta, mid, n_th, variant) > 0.0:
            hi = mid
        else:
            lo = mid
    return lo


# ---------------------------------------------------------------- waterfilling

def waterfill_two_channels(p_total: float, n1: float, n2: float) -> tuple:
    """Split power between two parallel Gaussian channels; returns (P1, P2, C_total)."""
    _nonneg(p_total=p_total)
    if not (n1 > 0 and n2 > 0):
        raise DomainError("noise powers must be positive")
    if n1 + p_total <= n2:
        p1, p2 = p_total, 0.0
    elif n2 + p_total <= n1:
        p1, p2 = 0.0, p_total
    else:
        p1 = (p_total + n2 - n1) / 2.0
        p2 = p_total - p1
    cap = 0.5 * math.log2(1.0 + p1 / n1) + 0.5 * math.log2(1.0 + p2 / n2)
    return p1, p2, cap


# ---------------------------------------------------------------- scenarios

ENCODINGS = ("coherent", "one_mode_squeezed", "two_mode_entangled")


@dataclass(frozen=True)
class BsScenario:
    theta: float
    n_a: float
    n_b: float = 0.0
    encoding: str = "two_mode_entangled"
    t_loss: float | None = None
    n_th: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= HALF_PI + 1e-12:
            raise DomainError(f"theta must lie in [0, pi/2], got {self.theta}")
        _nonneg(n_a=self.n_a, n_b=self.n_b, n_th=self.n_th)
        if self.encoding not in ENCODINGS:
            raise DomainError(f"unknown encoding {self.encoding!r}; expected one of {ENCODINGS}")
        if self.t_loss is not None and not 0.0 <= self.t_loss <= 1.0:
            raise DomainError(f"t_loss must lie in [0, 1], got {self.t_loss}")


@dataclass(frozen=True)
class XpScenario:
    big_r: float
    r: float
    sigma2: float
    sigma2_noise: float = 0.0
    t_loss: float | None = None
    n_th: float = 0.0

    def __post_init__(self):
        _nonneg(R=self.big_r, r=self.r, sigma2=self.sigma2, sigma2_noise=self.sigma2_noise, n_th=self.n_th)
        if self.t_loss is not None and not 0.0 <= self.t_loss <= 1.0:
            raise DomainError(f"t_loss must lie in [0, 1], got {self.t_loss}")


@dataclass
class RateReport:
    rate_bits: float
    bound_bits: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rate_bits < -1e-12:
            raise DomainError(f"negative rate {self.rate_bits}")
        self.rate_bits = max(self.rate_bits, 0.0)


def evaluate_bs(sc: BsScenario, variant: str = DEFAULT_VARIANT) -> RateReport:
    t = 1.0 if sc.t_loss is None else sc.t_loss
    if sc.encoding == "coherent":
        rate = rate_bs_thermal(sc.n_a, 0.0, sc.theta, t, sc.n_th)
    elif sc.encoding == "two_mode_entangled":
        rate = rate_bs_thermal(sc.n_a, squeezing_for_photons(sc.n_b), sc.theta, t, sc.n_th)
    else:
        if sc.t_loss is not None and sc.t_loss != 1.0:
            raise DomainError("no loss model is defined for the one-mode squeezed encoding")
        rate = optimize_one_mode_squeezed(sc.n_a, sc.n_b, sc.theta).rate_bits
    bounds = {
        "output_entropy": output_entropy_bound(sc.n_a, sc.n_b, sc.theta, variant),
        "input_entropy": input_entropy_bound(sc.n_a),
    }
    params = {"theta": sc.theta, "n_a": sc.n_a, "n_b": sc.n_b, "encoding": sc.encoding,
              "t_loss": t, "n_th": sc.n_th, "variant": variant}
    return RateReport(rate, bounds, params)


def evaluate_xp(sc: XpScenario) -> RateReport:
    if sc.t_loss is None:
        rate = rate_xp_noisy(sc.sigma2, sc.big_r, sc.r, sc.sigma2_noise)
    else:
        if sc.sigma2_noise:
            raise DomainError("thermal loss is modelled for an ideal gate only (sigma2_noise = 0)")
        omega = math.acos(math.sqrt(sc.t_loss))
        rate = rate_xp_thermal(sc.sigma2, sc.big_r, sc.r, omega, sc.n_th)
    params = {"R": sc.big_r, "r": sc.r, "sigma2": sc.sigma2, "sigma2_noise": sc.sigma2_noise,
              "t_loss": 1.0 if sc.t_loss is None else sc.t_loss, "n_th": sc.n_th}
    return RateReport(rate, {}, params)


def two_mode_db(n_b: float) -> float:
    return photons_to_db(n_b, two_mode=True)
