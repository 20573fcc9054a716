"""RIS element partitioning, passive beamforming phases and effective gains.

Element indices are 0-based throughout; antenna identities inside an
:class:`~rasm.mapping.AntennaCombination` stay 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import InvalidConfiguration
from .mapping import AntennaCombination


def partition_elements(n: int, ac: AntennaCombination | int) -> list[range]:
    """Split ``n`` elements into contiguous parts, one per antenna of ``ac``.

    Every part gets ``n // n_a`` elements; the ``n % n_a`` leftovers go one
    each to the first parts.  Part ``z`` serves the ``z``-th antenna of the
    combination in ascending order.
    """
    n_a = ac if isinstance(ac, int) else ac.size
    if n_a < 1 or n < n_a:
        raise InvalidConfiguration(f"cannot split {n} elements over {n_a} antennas")
    base, extra = divmod(n, n_a)
    parts, start = [], 0
    for z in range(n_a):
        stop = start + base + (1 if z < extra else 0)
        parts.append(range(start, stop))
        start = stop
    return parts


def element_assignment(n: int, ac: AntennaCombination) -> np.ndarray:
    """0-based receive antenna that each element is phase-aligned to."""
    out = np.empty(n, dtype=np.int64)
    for part, antenna in zip(partition_elements(n, ac), ac.antennas):
        out[part.start:part.stop] = antenna - 1
    return out


@dataclass(frozen=True)
class RisPhaseProfile:
    phases: np.ndarray
    ac: AntennaCombination
    parts: tuple[range, ...]

    @property
    def coefficients(self) -> np.ndarray:
        """Unit-modulus reflection coefficients ``exp(j*phi)`` (diagonal of the phase matrix)."""
        return np.exp(1j * self.phases)

    def serving_antenna(self) -> np.ndarray:
        out = np.empty(self.phases.shape[0], dtype=np.int64)
        for part, antenna in zip(self.parts, self.ac.antennas):
            out[part.start:part.stop] = antenna - 1
        return out


def configure_phases(ch: ChannelRealization, ac: AntennaCombination) -> RisPhaseProfile:
    """Align every element to the antenna its part serves: ``phi_i = omega_{i,l} + theta_i``."""
    if max(ac.antennas) > ch.n_rx:
        raise InvalidConfiguration(f"{ac} exceeds n_rx={ch.n_rx}")
    parts = tuple(partition_elements(ch.n_res, ac))
    serving = element_assignment(ch.n_res, ac)
    idx = np.arange(ch.n_res)
    phases = ch.omega(idx, serving) + ch.theta(idx)
    phases = np.angle(np.exp(1j * phases))
    return RisPhaseProfile(phases, ac, parts)


@dataclass(frozen=True)
class EffectiveGain:
    """Receive gain vector ``E_s * H2 diag(exp(j*phi)) H1`` (length N_r)."""

    g: np.ndarray
    symbol_energy: float = 1.0


def effective_gain(ch: ChannelRealization, profile: RisPhaseProfile, es: float = 1.0) -> EffectiveGain:
    g = es * (ch.h2 @ (profile.coefficients * ch.h1))
    return EffectiveGain(g, es)


def gain_decomposition(ch: ChannelRealization, profile: RisPhaseProfile, es: float = 1.0):
    """Per-antenna (constructive, non-constructive) split of the effective gain.

    Built element by element from the polar channel terms.  For an antenna of
    the combination the constructive part is the real sum ``sum beta*alpha``
    over its own part; every other element adds ``beta*alpha*exp(j*Psi)``
    with ``Psi`` the residual phase left by aligning it to a different
    antenna.  Antennas outside the combination have no constructive part.
    """
    alpha, theta = ch.alpha(), ch.theta()
    beta = np.abs(ch.h2)
    omega = -np.angle(ch.h2)
    phi = profile.phases
    serving = profile.serving_antenna()
    constructive = np.zeros(ch.n_rx)
    rest = np.zeros(ch.n_rx, dtype=np.complex128)
    for n in range(ch.n_rx):
        for i in range(ch.n_res):
            if serving[i] == n:
                constructive[n] += beta[n, i] * alpha[i]
            else:
                psi = phi[i] - omega[n, i] - theta[i]
                rest[n] += beta[n, i] * alpha[i] * np.exp(1j * psi)
    return es * constructive, es * rest


def snr_at_antenna(gain: EffectiveGain, n: int, symbol: complex, n0: float) -> float:
    """Instantaneous SNR ``|g_n x|^2 / N0`` at 1-based antenna ``n``."""
    if n0 <= 0:
        raise InvalidConfiguration(f"noise power must be positive, got {n0}")
    return float(abs(gain.g[n - 1] * symbol) ** 2 / n0)
