"""I.i.d. Rayleigh channels for the transmitter -> RIS -> receiver link."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfiguration


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of ``h1`` (length N) and ``h2`` (N_r x N).

    Polar accessors follow the convention ``h = magnitude * exp(-1j * phase)``,
    indices are 0-based: ``beta(i, m)`` is the gain from element ``i`` to
    receive antenna ``m``.
    """

    h1: np.ndarray
    h2: np.ndarray

    def __post_init__(self):
        h1 = np.asarray(self.h1, dtype=np.complex128)
        h2 = np.asarray(self.h2, dtype=np.complex128)
        if h1.ndim != 1 or h2.ndim != 2 or h2.shape[1] != h1.shape[0]:
            raise InvalidConfiguration(
                f"inconsistent channel shapes h1={h1.shape} h2={h2.shape}"
            )
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)

    @property
    def n_res(self) -> int:
        return self.h1.shape[0]

    @property
    def n_rx(self) -> int:
        return self.h2.shape[0]

    def alpha(self, i=slice(None)):
        return np.abs(self.h1[i])

    def theta(self, i=slice(None)):
        return _neg_angle(self.h1[i])

    def beta(self, i=slice(None), m=slice(None)):
        return np.abs(self.h2[m, i])

    def omega(self, i=slice(None), m=slice(None)):
        return _neg_angle(self.h2[m, i])


def _neg_angle(z):
    # -arg(z) mapped into (-pi, pi]; arg returns [-pi, pi] so only -pi needs care
    a = -np.angle(z)
    return np.where(a <= -np.pi, a + 2 * np.pi, a)


def complex_gaussian(rng: np.random.Generator, size, variance=1.0):
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def draw_channels(n: int, n_rx: int, rng: np.random.Generator) -> ChannelRealization:
    if n < 1 or n_rx < 1:
        raise InvalidConfiguration(f"need n >= 1 and n_rx >= 1, got n={n}, n_rx={n_rx}")
    h1 = complex_gaussian(rng, n)
    h2 = complex_gaussian(rng, (n_rx, n))
    return ChannelRealization(h1, h2)


def draw_noise(n_rx: int, n0: float, rng: np.random.Generator) -> np.ndarray:
    """Circularly-symmetric noise with total variance ``n0`` per entry."""
    if n0 < 0:
        raise InvalidConfiguration(f"noise power must be non-negative, got {n0}")
    if n0 == 0:
        return np.zeros(n_rx, dtype=np.complex128)
    return complex_gaussian(rng, n_rx, n0)
