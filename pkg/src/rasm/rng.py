"""Counter-based random streams.

Every random number used by a Monte Carlo trial is a pure function of
``(key, trial, counter)``: the key is derived from the master seed and the
SNR point, the counter is the position of the draw inside the trial.  No
state is carried between trials, so any partition of the trial range over
threads produces the same numbers.

The mixer is the SplitMix64 finalizer.  The scalar versions are compiled
with numba; the ``*_array`` versions are the numpy equivalents and produce
bit-identical integers.
"""
import math
import struct

import numpy as np

from ._accel import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53
_MASK = (1 << 64) - 1


def _mix_int(z):
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_key(seed, snr_db=0.0):
    """Key for the trial streams of one ``(seed, snr_db)`` sweep point."""
    if not 0 <= int(seed) <= _MASK:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    (snr_bits,) = struct.unpack("<Q", struct.pack("<d", float(snr_db) + 0.0))
    return np.uint64(_mix_int(_mix_int(int(seed) ^ 0x5EED) ^ snr_bits))


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def trial_base(key, trial):
    # explicit casts: int64 + uint64 would promote to float64
    return mix64(np.uint64(key) + np.uint64(trial) * GOLDEN)


@njit(cache=True, inline="always")
def draw(base, counter):
    return mix64(np.uint64(base) + np.uint64(counter + 1) * GOLDEN)


@njit(cache=True, inline="always")
def complex_normal(base, counter):
    """CN(0, 1) sample built from draws ``counter`` and ``counter + 1``."""
    u1 = (np.float64(draw(base, counter) >> _S11) + 1.0) * _INV53
    u2 = np.float64(draw(base, counter + 1) >> _S11) * _INV53
    r = math.sqrt(-math.log(u1))
    a = 2.0 * math.pi * u2
    return complex(r * math.cos(a), r * math.sin(a))


@njit(cache=True, inline="always")
def complex_normal_polar(base, counter):
    """Same sample as :func:`complex_normal` as (magnitude, cos, sin)."""
    u1 = (np.float64(draw(base, counter) >> _S11) + 1.0) * _INV53
    u2 = np.float64(draw(base, counter + 1) >> _S11) * _INV53
    a = 2.0 * math.pi * u2
    return math.sqrt(-math.log(u1)), math.cos(a), math.sin(a)


def mix64_array(z):
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def trial_base_array(key, trials):
    trials = np.asarray(trials, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64_array(np.uint64(key) + trials * GOLDEN)


def draw_array(bases, counters):
    """Raw 64-bit draws, shape ``bases.shape + counters.shape``."""
    bases = np.asarray(bases, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        bases = bases.reshape(bases.shape + (1,) * counters.ndim)
        return mix64_array(bases + (counters + _ONE) * GOLDEN)


def complex_normal_array(bases, counter, count):
    """``count`` CN(0, 1) samples per base, starting at ``counter``."""
    c = counter + 2 * np.arange(count, dtype=np.uint64)
    d1 = draw_array(bases, c)
    d2 = draw_array(bases, c + _ONE)
    u1 = ((d1 >> _S11).astype(np.float64) + 1.0) * _INV53
    u2 = (d2 >> _S11).astype(np.float64) * _INV53
    r = np.sqrt(-np.log(u1))
    a = 2.0 * np.pi * u2
    return r * np.cos(a) + 1j * (r * np.sin(a))


class CounterStream:
    """Sequential view over one counter-based stream.

    Used where a plain sequence of numbers is needed outside the hot
    kernels, e.g. the seeded antenna-combination selection.
    """

    def __init__(self, seed, stream=0):
        self._base = trial_base_array(stream_key(seed), np.uint64(stream))
        self._counter = 0

    def next_u64(self):
        value = int(draw_array(self._base, np.uint64(self._counter)))
        self._counter += 1
        return value

    def randbelow(self, n):
        """Unbiased integer in ``[0, n)`` by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n
