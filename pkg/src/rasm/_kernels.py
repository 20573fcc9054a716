"""Monte Carlo trial kernels: one numba path, one numpy path.

Both evaluate the same chain for a contiguous range of trial indices and
return the per-trial bit-error counts.  Random draws are addressed by
counter (see :mod:`rasm.rng`), laid out per trial as

    0                      index/symbol bit word
    1 .. 2N                h1, N complex normals
    1+2N .. 1+2N+2NrN      h2, row-major (antenna, element)
    then                   Nr complex normals of unit-variance noise

The gain of combination ``r`` at antenna ``n`` is evaluated as
``sum_i h2[n, i] * |h1_i| * conj(h2[a, i]) / |h2[a, i]|`` with ``a = assign[r, i]``,
which is ``h2 diag(exp(j phi)) h1`` once the phases are aligned.
"""
import numpy as np

from . import rng as _rng
from ._accel import USE_NUMBA, njit

try:
    from numba import prange
except ImportError:  # pragma: no cover
    prange = range

_S64 = np.uint64(64)
_BLOCK = 1024  # trials sharing one set of scratch buffers


def draws_per_trial(n_res, n_rx):
    return 1 + 2 * (n_res + n_rx * n_res + n_rx)


@njit(cache=True)
def _trial_numba(key, trial, n_res, n_rx, assign, points, sym_of_word, word_of_sym,
                 b, b2, noise_std, h1, h2, uc, gains, y):
    base = _rng.trial_base(key, trial)
    word = np.int64(0)
    if b > 0:
        word = np.int64(_rng.draw(base, 0) >> (_S64 - np.uint64(b)))
    r0 = word >> b2
    k0 = sym_of_word[word & ((1 << b2) - 1)]

    # only |h1| survives phase alignment; h2 is kept in polar form
    c = 1
    for i in range(n_res):
        h1[i] = _rng.complex_normal_polar(base, c)[0]
        c += 2
    for m in range(n_rx):
        for i in range(n_res):
            mag, cs, sn = _rng.complex_normal_polar(base, c)
            h2[m, i] = complex(mag * cs, mag * sn)
            uc[m, i] = complex(h1[i] * cs, -h1[i] * sn)
            c += 2
    n_ac = assign.shape[0]
    for r in range(n_ac):
        for n in range(n_rx):
            acc = 0j
            for i in range(n_res):
                acc += h2[n, i] * uc[assign[r, i], i]
            gains[r, n] = acc

    x = points[k0]
    for n in range(n_rx):
        y[n] = gains[r0, n] * x + noise_std * _rng.complex_normal(base, c)
        c += 2

    best = np.inf
    r_hat = 0
    k_hat = 0
    n_sym = points.shape[0]
    for r in range(n_ac):
        for k in range(n_sym):
            p = points[k]
            metric = 0.0
            for n in range(n_rx):
                d = y[n] - gains[r, n] * p
                metric += d.real * d.real + d.imag * d.imag
            if metric < best:
                best = metric
                r_hat = r
                k_hat = k

    diff = word ^ ((r_hat << b2) | word_of_sym[k_hat])
    errors = 0
    while diff:
        errors += diff & 1
        diff >>= 1
    return errors


@njit(parallel=True, cache=True)
def _simulate_numba(key, start, count, n_res, n_rx, assign, points, sym_of_word,
                    word_of_sym, b, b2, noise_std):
    out = np.empty(count, dtype=np.int64)
    n_ac = assign.shape[0]
    n_blocks = (count + _BLOCK - 1) // _BLOCK
    for blk in prange(n_blocks):
        h1 = np.empty(n_res)
        h2 = np.empty((n_rx, n_res), dtype=np.complex128)
        uc = np.empty((n_rx, n_res), dtype=np.complex128)
        gains = np.empty((n_ac, n_rx), dtype=np.complex128)
        y = np.empty(n_rx, dtype=np.complex128)
        for t in range(blk * _BLOCK, min(count, (blk + 1) * _BLOCK)):
            out[t] = _trial_numba(key, start + t, n_res, n_rx, assign, points, sym_of_word,
                                  word_of_sym, b, b2, noise_std, h1, h2, uc, gains, y)
    return out


def trial_draws_numpy(key, trials, n_res, n_rx, b):
    """Word, h1, h2 and unit noise for an array of trial indices."""
    bases = _rng.trial_base_array(key, trials)
    if b > 0:
        words = (_rng.draw_array(bases, np.uint64(0)) >> (_S64 - np.uint64(b))).astype(np.int64)
    else:
        words = np.zeros(bases.shape, dtype=np.int64)
    c = 1
    h1 = _rng.complex_normal_array(bases, c, n_res)
    c += 2 * n_res
    h2 = _rng.complex_normal_array(bases, c, n_rx * n_res).reshape(-1, n_rx, n_res)
    c += 2 * n_rx * n_res
    noise = _rng.complex_normal_array(bases, c, n_rx)
    return words, h1, h2, noise


def _simulate_numpy(key, start, count, n_res, n_rx, assign, points, sym_of_word,
                    word_of_sym, b, b2, noise_std):
    trials = np.arange(start, start + count, dtype=np.uint64)
    words, h1, h2, noise = trial_draws_numpy(key, trials, n_res, n_rx, b)
    r0 = words >> b2
    k0 = sym_of_word[words & ((1 << b2) - 1)]

    uc = np.abs(h1)[:, None, :] * np.exp(-1j * np.angle(h2))
    uc_sel = uc[:, assign, np.arange(n_res)]               # (B, D, N)
    gains = np.einsum("bni,bri->brn", h2, uc_sel)

    rows = np.arange(count)
    y = gains[rows, r0] * points[k0][:, None] + noise_std * noise
    diff = y[:, None, None, :] - gains[:, :, None, :] * points[None, None, :, None]
    metric = np.sum(diff.real ** 2 + diff.imag ** 2, axis=-1)
    flat = np.argmin(metric.reshape(count, -1), axis=1)
    r_hat, k_hat = np.divmod(flat, points.shape[0])
    detected = (r_hat << b2) | word_of_sym[k_hat]
    x = (words ^ detected).astype(np.uint64)
    return np.bitwise_count(x).astype(np.int64)


def simulate_numba(*args):
    return _simulate_numba(*args)


def simulate_numpy(*args):
    return _simulate_numpy(*args)


simulate = simulate_numba if USE_NUMBA else simulate_numpy
DEFAULT_CHUNK = 1 << 18 if USE_NUMBA else 1 << 13
