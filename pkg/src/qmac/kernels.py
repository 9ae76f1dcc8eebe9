"""Hot numeric kernels, each in a numba-compiled loop form and a numpy form.

The public names (``g_bits``, ``shannon_bits``, ``polymatroid_slacks``,
``bs_margin_grid``) dispatch to one of the two implementations depending on
:data:`qmac._accel.USE_NUMBA`. Both forms are importable under ``*_nb`` and
``*_np`` for testing and benchmarking.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

# output-entropy bound variants understood by bs_margin_grid
VARIANT_CODES = {"amplitude": 0, "energy-conserving": 1, "as-printed": 2}


# ---------------------------------------------------------------- g(x) in bits

@njit
def _g_bits_loop(x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        xi = x[i]
        if xi <= 0.0:
            out[i] = 0.0
        else:
            out[i] = (xi + 1.0) * np.log2(xi + 1.0) - xi * np.log2(xi)
    return out


def g_bits_nb(x):
    x = np.asarray(x, dtype=np.float64)
    return _g_bits_loop(x.ravel()).reshape(x.shape)


def g_bits_np(x):
    x = np.asarray(x, dtype=np.float64)
    pos = x > 0.0
    safe = np.where(pos, x, 1.0)
    return np.where(pos, (safe + 1.0) * np.log2(safe + 1.0) - safe * np.log2(safe), 0.0)


# ------------------------------------------------------------ Shannon entropy

@njit
def _shannon_loop(p):
    h = 0.0
    for i in range(p.shape[0]):
        if p[i] > 0.0:
            h -= p[i] * np.log2(p[i])
    return h


def shannon_bits_nb(p):
    return float(_shannon_loop(np.ascontiguousarray(p, dtype=np.float64).ravel()))


def shannon_bits_np(p):
    p = np.asarray(p, dtype=np.float64).ravel()
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


# ------------------------------------------------------- polymatroid checks
# values[S] is f(S) for bitmask S over n elements.
# Returns (f(empty),
#          min monotone slack f(S|i) - f(S), first violating (S, i) or (-1, -1),
#          min submodular slack f(S)+f(T)-f(S&T)-f(S|T), first violating (S, T) or (-1, -1)).
# Pairs are visited with S ascending, then T ascending, T > S.

@njit
def _polymatroid_loop(values, n, tol):
    size = 1 << n
    mono_min = np.inf
    mono_s = -1
    mono_i = -1
    for s in range(size):
        for i in range(n):
            bit = 1 << i
            if s & bit:
                continue
            slack = values[s | bit] - values[s]
            if slack < mono_min:
                mono_min = slack
            if mono_s < 0 and slack < -tol:
                mono_s = s
                mono_i = i
    sub_min = np.inf
    sub_s = -1
    sub_t = -1
    for s in range(size):
        for t in range(s + 1, size):
            slack = values[s] + values[t] - values[s & t] - values[s | t]
            if slack < sub_min:
                sub_min = slack
            if sub_s < 0 and slack < -tol:
                sub_s = s
                sub_t = t
    return values[0], mono_min, mono_s, mono_i, sub_min, sub_s, sub_t


def polymatroid_slacks_nb(values, n, tol=1e-9):
    values = np.ascontiguousarray(values, dtype=np.float64)
    f0, mm, ms, mi, sm, ss, st = _polymatroid_loop(values, n, tol)
    if n == 0:
        mm, sm = 0.0, 0.0
    return float(f0), float(mm), (int(ms), int(mi)), float(sm), (int(ss), int(st))


def polymatroid_slacks_np(values, n, tol=1e-9):
    values = np.asarray(values, dtype=np.float64)
    size = 1 << n
    masks = np.arange(size)
    if n == 0:
        return float(values[0]), 0.0, (-1, -1), 0.0, (-1, -1)

    bits = 1 << np.arange(n)
    absent = (masks[:, None] & bits[None, :]) == 0
    mono = np.where(absent, values[masks[:, None] | bits[None, :]] - values[:, None], np.inf)
    mono_min = float(mono.min())
    bad = np.argwhere(mono < -tol)
    mono_first = (int(bad[0, 0]), int(bad[0, 1])) if len(bad) else (-1, -1)

    s, t = masks[:, None], masks[None, :]
    sub = values[s] + values[t] - values[s & t] - values[s | t]
    upper = t > s
    sub_min = float(sub[upper].min()) if size > 1 else 0.0
    bad = np.argwhere((sub < -tol) & upper)
    sub_first = (int(bad[0, 0]), int(bad[0, 1])) if len(bad) else (-1, -1)
    return float(values[0]), mono_min, mono_first, sub_min, sub_first


# ------------------------------------------- beam-splitter superadditivity margin
# margin[i, j] = rate_bs_thermal(N_A, r_j, theta_i, T, N_Th) - bound(N_A, 2 sinh^2 r_j, theta_i)
# SNR = N_A sin^2(theta) T / ((cosh r - cos(theta) sinh r)^2 T + (1 + 2 N_Th)(1 - T)),
# which is the noiseless entangled rate at T = 1.

@njit
def _g_scalar(x):
    if x <= 0.0:
        return 0.0
    return (x + 1.0) * np.log2(x + 1.0) - x * np.log2(x)


@njit
def _bs_margin_loop(n_a, r, theta, t_loss, n_th, variant):
    m = r.shape[0]
    ch = np.cosh(r)
    sh = np.sinh(r)
    n_b = 2.0 * sh * sh
    sqrt_nb = np.sqrt(n_b)
    sqrt_na = np.sqrt(n_a)
    thermal = (1.0 + 2.0 * n_th) * (1.0 - t_loss)
    out = np.empty((theta.shape[0], m))
    for i in range(theta.shape[0]):
        s = np.sin(theta[i])
        c = np.cos(theta[i])
        signal = n_a * s * s * t_loss
        for j in range(m):
            amp = ch[j] - c * sh[j]
            denom = amp * amp * t_loss + thermal
            if denom > 0.0:
                rate = np.log2(1.0 + signal / denom)
            else:
                rate = np.inf
            if variant == 0:
                a = sqrt_na * s + sqrt_nb[j] * c
                n_out = a * a
            elif variant == 1:
                n_out = n_a * s * s + n_b[j] * c * c
            else:
                n_out = sqrt_na * s * s + sqrt_nb[j] * c * c
            out[i, j] = rate - _g_scalar(n_out)
    return out


def bs_margin_grid_nb(n_a, r, theta, t_loss=1.0, n_th=0.0, variant="amplitude"):
    r = np.ascontiguousarray(np.atleast_1d(r), dtype=np.float64)
    theta = np.ascontiguousarray(np.atleast_1d(theta), dtype=np.float64)
    return _bs_margin_loop(float(n_a), r, theta, float(t_loss), float(n_th), VARIANT_CODES[variant])


def bs_margin_grid_np(n_a, r, theta, t_loss=1.0, n_th=0.0, variant="amplitude"):
    r = np.atleast_1d(np.asarray(r, dtype=np.float64))[None, :]
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))[:, None]
    s, c = np.sin(theta), np.cos(theta)
    amp = np.cosh(r) - c * np.sinh(r)
    denom = amp**2 * t_loss + (1.0 + 2.0 * n_th) * (1.0 - t_loss)
    with np.errstate(divide="ignore"):
        rate = np.where(denom > 0.0,
                        np.log2(1.0 + n_a * s**2 * t_loss / np.where(denom > 0.0, denom, 1.0)),
                        np.inf)
    n_b = 2.0 * np.sinh(r) ** 2
    code = VARIANT_CODES[variant]
    if code == 0:
        n_out = (np.sqrt(n_a) * s + np.sqrt(n_b) * c) ** 2
    elif code == 1:
        n_out = n_a * s**2 + n_b * c**2
    else:
        n_out = np.sqrt(n_a) * s**2 + np.sqrt(n_b) * c**2
    return rate - g_bits_np(n_out)


if USE_NUMBA:
    g_bits = g_bits_nb
    shannon_bits = shannon_bits_nb
    polymatroid_slacks = polymatroid_slacks_nb
    bs_margin_grid = bs_margin_grid_nb
else:
    g_bits = g_bits_np
    shannon_bits = shannon_bits_np
    polymatroid_slacks = polymatroid_slacks_np
    bs_margin_grid = bs_margin_grid_np
