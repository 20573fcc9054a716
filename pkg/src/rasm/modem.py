"""Constellations, received-signal synthesis and joint ML detection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, draw_noise
from .errors import InvalidConfiguration, InvalidInput
from .mapping import AcTable
from .ris import RisPhaseProfile, configure_phases, effective_gain

PSK = "psk"
QAM = "qam"


@dataclass(frozen=True)
class Constellation:
    kind: str
    order: int
    points: np.ndarray

    def __len__(self):
        return self.order

    def __getitem__(self, k: int) -> complex:
        """1-based symbol access."""
        if not 1 <= k <= self.order:
            raise InvalidInput(f"symbol index {k} outside [1, {self.order}]")
        return complex(self.points[k - 1])


def make_constellation(kind: str, order: int) -> Constellation:
    """Unit-energy PSK or (square/rectangular) QAM.

    ``order=1`` gives the single pilot point used by space-shift keying.
    """
    kind = kind.lower()
    if order < 1 or order & (order - 1):
        raise InvalidConfiguration("modulation order must be a power of 2")
    if order == 1:
        points = np.ones(1, dtype=np.complex128)
    elif kind == PSK:
        k = np.arange(order)
        points = np.exp(2j * np.pi * k / order)
        # exact axis points for orders that land on them
        points = np.where(np.abs(points.real) < 1e-15, 1j * points.imag, points)
        points = np.where(np.abs(points.imag) < 1e-15, points.real + 0j, points)
    elif kind == QAM:
        b = order.bit_length() - 1
        n_i, n_q = 1 << ((b + 1) // 2), 1 << (b // 2)
        li = np.arange(n_i) * 2.0 - (n_i - 1)
        lq = np.arange(n_q) * 2.0 - (n_q - 1)
        points = (li[:, None] + 1j * lq[None, :]).ravel()
        points = points / np.sqrt(np.mean(np.abs(points) ** 2))
    else:
        raise InvalidConfiguration(f"unknown modulation kind {kind!r}")
    return Constellation(kind, order, points.astype(np.complex128))


@dataclass(frozen=True)
class ReceivedSignal:
    y: np.ndarray
    true_r: int | None
    true_k: int
    n0: float


def transmit(
    ch: ChannelRealization,
    profile: RisPhaseProfile,
    k: int,
    constellation: Constellation,
    n0: float,
    rng: np.random.Generator | None = None,
    es: float = 1.0,
    true_r: int | None = None,
    noise: np.ndarray | None = None,
) -> ReceivedSignal:
    """``y = G x_k + noise``; pass ``noise`` to inject a precomputed draw."""
    x = constellation[k]
    g = effective_gain(ch, profile, es).g
    if noise is None:
        if n0 > 0 and rng is None:
            raise InvalidInput("a random generator is required when n0 > 0")
        noise = draw_noise(ch.n_rx, n0, rng)
    return ReceivedSignal(g * x + noise, true_r, k, n0)


def candidate_gains(ch: ChannelRealization, table: AcTable, es: float = 1.0) -> np.ndarray:
    """Gain vectors for all D combinations, shape ``(D, N_r)``."""
    return np.stack([effective_gain(ch, configure_phases(ch, ac), es).g for ac in table.entries])


def ml_metrics(y: np.ndarray, gains: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Squared distances ``||y - G_r x_k||^2``, shape ``(D, M)``."""
    diff = y[None, None, :] - gains[:, None, :] * points[None, :, None]
    return np.sum(diff.real ** 2 + diff.imag ** 2, axis=-1)


def ml_detect(
    y: ReceivedSignal | np.ndarray,
    table: AcTable,
    ch: ChannelRealization,
    constellation: Constellation,
    es: float = 1.0,
    gains: np.ndarray | None = None,
) -> tuple[int, int]:
    """Joint ML estimate ``(r_hat, k_hat)``, 1-based; ties go to the smallest (r, k)."""
    vec = y.y if isinstance(y, ReceivedSignal) else np.asarray(y)
    if gains is None:
        gains = candidate_gains(ch, table, es)
    metric = ml_metrics(vec, gains, constellation.points)
    flat = int(np.argmin(metric))
    r, k = divmod(flat, constellation.order)
    return r + 1, k + 1
