"""Gaussian states and channels in the covariance-matrix picture.

Quadratures are ordered (x1, p1, x2, p2, ...) and the vacuum covariance is the
identity. Channels act as gamma -> X gamma X^T + Y, d -> X d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag, sqrtm

from .errors import DomainError, ValidationError
from .kernels import g_bits

TOL = 1e-9
GOLDEN_T = (3.0 - math.sqrt(5.0)) / 2.0
_J1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n: int) -> np.ndarray:
    if n < 1:
        raise DomainError(f"need at least one mode, got {n}")
    return block_diag(*([_J1] * n))


def _as_sym(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2:
        raise ValidationError(f"covariance must be square with even size, got {g.shape}")
    asym = np.max(np.abs(g - g.T))
    if asym > TOL:
        raise ValidationError(f"covariance is not symmetric (max asymmetry {asym:.3g})")
    return (g + g.T) / 2.0


def _min_eig_herm(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2.0)[0])


@dataclass(frozen=True, eq=False)
class GaussianState:
    gamma: np.ndarray
    d: np.ndarray | None = None

    def __post_init__(self):
        g = _as_sym(self.gamma)
        n = g.shape[0] // 2
        d = np.zeros(2 * n) if self.d is None else np.asarray(self.d, dtype=float).ravel()
        if d.size != 2 * n:
            raise ValidationError(f"displacement has length {d.size}, expected {2 * n}")
        lowest = _min_eig_herm(g + 1j * symplectic_form(n))
        if lowest < -TOL:
            raise ValidationError(f"uncertainty relation violated (min eigenvalue {lowest:.3g})")
        g.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "d", d)

    @property
    def n_modes(self) -> int:
        return self.gamma.shape[0] // 2


@dataclass(frozen=True, eq=False)
class GaussianChannelXY:
    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.X, dtype=float))
        y = _as_sym(self.Y)
        if x.shape[0] != y.shape[0] or x.shape[0] % 2 or x.shape[1] % 2:
            raise ValidationError(f"incompatible X {x.shape} and Y {y.shape}")
        j_out = symplectic_form(x.shape[0] // 2)
        j_in = symplectic_form(x.shape[1] // 2)
        lowest = _min_eig_herm(y + 1j * j_out - 1j * x @ j_in @ x.T)
        if lowest < -TOL:
            raise ValidationError(f"channel is not completely positive (min eigenvalue {lowest:.3g})")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", x)
        object.__setattr__(self, "Y", y)

    @property
    def n_in(self) -> int:
        return self.X.shape[1] // 2

    @property
    def n_out(self) -> int:
        return self.X.shape[0] // 2


# ---------------------------------------------------------------- spectra and entropy

def symplectic_eigenvalues(gamma) -> np.ndarray:
    """Mode-wise symplectic spectrum, ascending, one value per mode.

    Uses the Hermitian matrix gamma^{1/2} (iJ) gamma^{1/2}, whose eigenvalues
    come in +/- nu pairs; the positive half is returned.
    """
    g = _as_sym(gamma)
    n = g.shape[0] // 2
    root = np.real(sqrtm(g))
    m = root @ (1j * symplectic_form(n)) @ root
    ev = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
    return np.sort(np.abs(ev[n:]))


def gaussian_entropy(gamma) -> float:
    nu = symplectic_eigenvalues(gamma)
    return float(np.sum(g_bits(np.clip((nu - 1.0) / 2.0, 0.0, None))))


def g_entropy(x) -> float | np.ndarray:
    """Entropy in bits of a thermal mode with mean photon number ``x``."""
    out = g_bits(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- channel algebra

def apply_channel(state: GaussianState, ch: GaussianChannelXY) -> GaussianState:
    if ch.n_in != state.n_modes:
        raise ValidationError(f"channel expects {ch.n_in} modes, state has {state.n_modes}")
    return GaussianState(ch.X @ state.gamma @ ch.X.T + ch.Y, ch.X @ state.d)


def compose(first: GaussianChannelXY, second: GaussianChannelXY) -> GaussianChannelXY:
    """Channel equal to applying ``first`` then ``second``."""
    if second.n_in != first.n_out:
        raise ValidationError("channel dimensions do not chain")
    return GaussianChannelXY(second.X @ first.X, second.X @ first.Y @ second.X.T + second.Y)


def identity_channel(n: int) -> GaussianChannelXY:
    return GaussianChannelXY(np.eye(2 * n), np.zeros((2 * n, 2 * n)))


def tensor_states(*states: GaussianState) -> GaussianState:
    return GaussianState(block_diag(*(s.gamma for s in states)), np.concatenate([s.d for s in states]))


# ---------------------------------------------------------------- state constructors

def vacuum(n: int = 1) -> GaussianState:
    return GaussianState(np.eye(2 * n))


def coherent(d) -> GaussianState:
    d = np.asarray(d, dtype=float).ravel()
    return GaussianState(np.eye(d.size), d)


def thermal(n_th: float, n: int = 1) -> GaussianState:
    if n_th < 0:
        raise DomainError("thermal photon number must be nonnegative")
    return GaussianState((2.0 * n_th + 1.0) * np.eye(2 * n))


def rotation(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, s], [-s, c]])


def one_mode_squeezed(r: float, phi: float = 0.0) -> GaussianState:
    """diag(e^{-2r}, e^{2r}) rotated by ``phi`` in phase space."""
    g = np.diag([math.exp(-2 * r), math.exp(2 * r)])
    rot = rotation(phi)
    return GaussianState(rot @ g @ rot.T)


_H = np.array([[1.0, 0.0, -1.0, 0.0],
               [1.0, 0.0, 1.0, 0.0],
               [0.0, 1.0, 0.0, -1.0],
               [0.0, 1.0, 0.0, 1.0]]) / math.sqrt(2.0)


def two_mode_squeezed(r: float) -> GaussianState:
    """Two-mode squeezed vacuum with x1 - x2 and p1 + p2 squeezed."""
    # rows of _H read x1-x2, x1+x2, p1-p2, p1+p2 against columns (x1, p1, x2, p2)
    core = np.diag([math.exp(-2 * r), math.exp(2 * r), math.exp(2 * r), math.exp(-2 * r)])
    return GaussianState(_H.T @ core @ _H)


# ---------------------------------------------------------------- channel constructors

def beam_splitter_mac(theta: float) -> GaussianChannelXY:
    """Two senders mixed on a beam splitter; the receiver keeps sin(theta) x_A + cos(theta) x_B."""
    i2 = np.eye(2)
    return GaussianChannelXY(np.hstack([math.sin(theta) * i2, math.cos(theta) * i2]), np.zeros((2, 2)))


def thermal_noise_channel(t: float, n_th: float, physical: bool = True) -> GaussianChannelXY:
    """gamma -> T gamma + (1 - T) gamma_th on one mode.

    ``physical=True`` uses gamma_th = (2 N_th + 1) I, so N_th = 0 is pure loss.
    ``physical=False`` uses gamma_th = N_th I, which is completely positive only for N_th >= 1.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {t}")
    if n_th < 0:
        raise DomainError("thermal photon number must be nonnegative")
    level = 2.0 * n_th + 1.0 if physical else n_th
    return GaussianChannelXY(math.sqrt(t) * np.eye(2), (1.0 - t) * level * np.eye(2))


def xp_noise_variances(t: float, eta: float, s: float) -> tuple:
    """(sigma_1^2, sigma_2^2) of the measurement-induced XP gate; ``s`` is the squeezing parameter."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"T must lie in (0, 1), got {t}")
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"detector efficiency must lie in (0, 1], got {eta}")
    if s < 0:
        raise DomainError("squeezing must be nonnegative")
    alpha = (1.0 - t) * (1.0 - eta) / ((1.0 + t) * eta)
    beta = (1.0 - t) / (1.0 + t)
    e = math.exp(-2.0 * s)
    return alpha + beta * e, alpha / t + beta * t * e


def xp_gate_x(t: float = GOLDEN_T) -> np.ndarray:
    """Symplectic matrix of the ideal gate with coupling k = (1 - T)/sqrt(T).

    Acts as x1' = x1, p1' = p1 - k p2, x2' = x2 + k x1, p2' = p2. At T = GOLDEN_T, k = 1.
    """
    k = (1.0 - t) / math.sqrt(t)
    return np.array([[1.0, 0.0, 0.0, 0.0],
                     [0.0, 1.0, 0.0, -k],
                     [k, 0.0, 1.0, 0.0],
                     [0.0, 0.0, 0.0, 1.0]])


def xp_gate_noisy(t: float, eta: float, s: float) -> GaussianChannelXY:
    s1, s2 = xp_noise_variances(t, eta, s)
    return GaussianChannelXY(xp_gate_x(t), np.diag([s1, s2, s2, s1]))


def xp_sigma2_noise(t: float, eta: float, s: float) -> float:
    """Total added noise sigma_1^2 + sigma_2^2 on the decoded quadrature pair."""
    s1, s2 = xp_noise_variances(t, eta, s)
    return s1 + s2


# ---------------------------------------------------------------- photons and decibels

def mean_photon_number(state: GaussianState) -> float:
    g, d = state.gamma, state.d
    total = 0.0
    for k in range(state.n_modes):
        total += (g[2 * k, 2 * k] + g[2 * k + 1, 2 * k + 1]) / 4.0
        total += (d[2 * k] ** 2 + d[2 * k + 1] ** 2) / 2.0 - 0.5
    return float(total)


def db_to_r(s_db: float) -> float:
    if s_db < 0:
        raise DomainError("squeezing in dB must be nonnegative")
    return s_db * math.log(10.0) / 20.0


def r_to_db(r: float) -> float:
    if r < 0:
        raise DomainError("squeezing parameter must be nonnegative")
    return 20.0 * r / math.log(10.0)


def db_to_photons(s_db: float, two_mode: bool = False) -> float:
    """Mean photons of a squeezed vacuum: sinh^2 r, or 2 sinh^2 r for the two-mode state."""
    n = math.sinh(db_to_r(s_db)) ** 2
    return 2.0 * n if two_mode else n


def photons_to_db(n: float, two_mode: bool = False) -> float:
    if n < 0:
        raise DomainError("photon number must be nonnegative")
    per_mode = n / 2.0 if two_mode else n
    return r_to_db(math.asinh(math.sqrt(per_mode)))


def squeezing_for_photons(n_b: float) -> float:
    """r of the two-mode squeezed vacuum with total mean photon number ``n_b``."""
    if n_b < 0:
        raise DomainError("photon number must be nonnegative")
    return math.asinh(math.sqrt(n_b / 2.0))
