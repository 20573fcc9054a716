"""Seeded Monte Carlo BER sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._accel import configure_threads
from .baselines import RASM, RGSM, RGSSK, RSM, SchemeSpec, make_scheme_table
from .channel import ChannelRealization
from .errors import InvalidConfiguration
from .mapping import AcTable, SymbolMap, index_bits
from .modem import Constellation, make_constellation, ml_detect, transmit
from .ris import configure_phases, element_assignment
from .rng import stream_key

Z95 = 1.959963984540054


@dataclass(frozen=True)
class SystemConfig:
    """All parameters of one scheme instance.

    ``n_rx`` is the number of antennas the scheme uses.  The AC table is
    drawn with ``table_seed`` (defaults to ``master_seed``).
    """

    n_res: int
    n_rx: int
    order: int = 2
    modulation: str = "psk"
    scheme: str = RASM
    n_s: int | None = None
    master_seed: int = 0
    table_seed: int | None = None
    es: float = 1.0
    gray: bool = False
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", self.scheme.upper())
        if self.n_res < 1 or self.n_rx < 1:
            raise InvalidConfiguration("element and antenna counts must be >= 1")
        if self.es <= 0:
            raise InvalidConfiguration("symbol energy must be positive")
        if not 0 <= self.master_seed < 1 << 64:
            raise InvalidConfiguration("seed must fit in an unsigned 64-bit integer")
        spec = self.scheme_spec()  # validates order / n_s
        if self.scheme == RASM:
            largest = self.n_rx
        elif self.scheme == RSM:
            largest = 1
        else:
            largest = spec.n_s
        if self.n_res < largest:
            raise InvalidConfiguration(
                f"{self.n_res} elements cannot serve {largest} antennas at once")

    def scheme_spec(self) -> SchemeSpec:
        return SchemeSpec(self.scheme, self.n_rx, self.n_s, self.order, self.gray)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        extra = f",Ns={self.n_s}" if self.n_s is not None else ""
        return f"{self.scheme}(N={self.n_res},Nr={self.n_rx}{extra},M={self.scheme_spec().order})"

    def tables(self) -> tuple[AcTable, SymbolMap]:
        seed = self.master_seed if self.table_seed is None else self.table_seed
        return make_scheme_table(self.scheme_spec(), seed)

    def constellation(self) -> Constellation:
        return make_constellation(self.modulation, self.scheme_spec().order)


def bpcu(config: SystemConfig) -> int:
    """Bits per channel use."""
    spec = config.scheme_spec()
    b2 = spec.order.bit_length() - 1
    if spec.kind == RASM:
        return index_bits(2 ** spec.n_rx - 1) + b2
    if spec.kind == RSM:
        return index_bits(spec.n_rx) + b2
    b1 = index_bits(math.comb(spec.n_rx, spec.n_s))
    return b1 if spec.kind == RGSSK else b1 + b2


def noise_power(snr_db: float, eb: float = 1.0) -> float:
    return eb / 10.0 ** (snr_db / 10.0)


@dataclass
class _Prepared:
    key_seed: int
    n_res: int
    n_rx: int
    assign: np.ndarray
    points: np.ndarray
    sym_of_word: np.ndarray
    word_of_sym: np.ndarray
    b: int
    b2: int


def _prepare(config: SystemConfig) -> _Prepared:
    table, symbols = config.tables()
    assign = np.stack([element_assignment(config.n_res, ac) for ac in table.entries])
    to_index, to_word = symbols.lookup_tables()
    points = config.constellation().points * config.es
    return _Prepared(
        config.master_seed, config.n_res, config.n_rx, assign, points,
        np.asarray(to_index, dtype=np.int64), np.asarray(to_word, dtype=np.int64),
        table.bits, symbols.bits,
    )


def _errors(prep: _Prepared, snr_db, start, count, backend=None):
    simulate = backend or _kernels.simulate
    key = stream_key(prep.key_seed, snr_db)
    std = math.sqrt(noise_power(snr_db))
    return simulate(key, np.int64(start), np.int64(count), prep.n_res, prep.n_rx,
                    prep.assign, prep.points, prep.sym_of_word, prep.word_of_sym,
                    prep.b, prep.b2, std)


def run_trial(config: SystemConfig, snr_db: float, trial_index: int) -> int:
    """Bit errors of a single trial; a pure function of (seed, snr_db, trial_index)."""
    return int(_errors(_prepare(config), snr_db, trial_index, 1)[0])


def trial_inputs(config: SystemConfig, snr_db: float, trial_index: int):
    """The (bit word, channel, unit-variance noise) a trial draws."""
    prep = _prepare(config)
    words, h1, h2, noise = _kernels.trial_draws_numpy(
        stream_key(config.master_seed, snr_db), np.array([trial_index], dtype=np.uint64),
        config.n_res, config.n_rx, prep.b)
    return int(words[0]), ChannelRealization(h1[0], h2[0]), noise[0]


def reference_trial(config: SystemConfig, snr_db: float, trial_index: int) -> int:
    """Slow object-level replay of :func:`run_trial` on the same draws."""
    table, symbols = config.tables()
    constellation = config.constellation()
    word, ch, unit_noise = trial_inputs(config, snr_db, trial_index)
    b2 = symbols.bits
    r = (word >> b2) + 1
    k = symbols.index_of(word & ((1 << b2) - 1))
    profile = configure_phases(ch, table[r])
    n0 = noise_power(snr_db)
    rx = transmit(ch, profile, k, constellation, n0, es=config.es,
                  noise=math.sqrt(n0) * unit_noise, true_r=r)
    r_hat, k_hat = ml_detect(rx, table, ch, constellation, es=config.es)
    detected = ((r_hat - 1) << b2) | symbols.word_of(k_hat)
    return bin(word ^ detected).count("1")


def wilson_halfwidth(errors: int, n: int, z: float = Z95) -> float:
    if n <= 0:
        return float("nan")
    p = errors / n
    return z / (1 + z * z / n) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    trials: int
    bit_errors: int
    bits: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits

    @property
    def ci95(self) -> float:
        """Half-width of the 95% Wilson interval."""
        return wilson_halfwidth(self.bit_errors, self.bits)

    @property
    def std_error(self) -> float:
        p = self.ber
        return math.sqrt(p * (1 - p) / self.bits)

    def as_record(self) -> dict:
        return {"snr_db": self.snr_db, "trials": self.trials,
                "bit_errors": self.bit_errors, "ber": self.ber, "ci95": self.ci95}


@dataclass
class BerCurve:
    config: SystemConfig
    bpcu: int
    points: list[BerPoint] = field(default_factory=list)

    @property
    def snr_db(self) -> np.ndarray:
        return np.array([p.snr_db for p in self.points])

    @property
    def ber(self) -> np.ndarray:
        return np.array([p.ber for p in self.points])

    def at(self, snr_db: float) -> BerPoint:
        for p in self.points:
            if math.isclose(p.snr_db, snr_db, abs_tol=1e-9):
                return p
        raise KeyError(snr_db)


def run_ber(config: SystemConfig, snr_grid, trials_per_point: int,
            chunk: int | None = None, backend=None, progress=None) -> BerCurve:
    """BER over ``snr_grid``; results do not depend on chunking or thread count."""
    if trials_per_point < 1:
        raise InvalidConfiguration("trials_per_point must be >= 1")
    configure_threads()
    prep = _prepare(config)
    chunk = chunk or _kernels.DEFAULT_CHUNK
    curve = BerCurve(config, bpcu(config))
    for snr in snr_grid:
        snr = float(snr)
        total = 0
        for start in range(0, trials_per_point, chunk):
            count = min(chunk, trials_per_point - start)
            total += int(_errors(prep, snr, start, count, backend).sum())
        curve.points.append(BerPoint(snr, trials_per_point, total, trials_per_point * prep.b))
        if progress is not None:
            progress(config, curve.points[-1])
    return curve
