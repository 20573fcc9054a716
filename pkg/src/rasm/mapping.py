"""Antenna combinations, the seeded random AC selection and bit mapping."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InvalidConfiguration, InvalidInput
from .rng import CounterStream


@dataclass(frozen=True, order=False)
class AntennaCombination:
    """A set of receive antennas (1-based) jointly targeted by the RIS."""

    antennas: tuple[int, ...]

    def __post_init__(self):
        ants = tuple(int(a) for a in self.antennas)
        if not ants:
            raise InvalidConfiguration("antenna combination must be non-empty")
        if len(set(ants)) != len(ants):
            raise InvalidConfiguration(f"duplicate antenna in {ants}")
        if min(ants) < 1:
            raise InvalidConfiguration(f"antenna indices are 1-based, got {ants}")
        object.__setattr__(self, "antennas", tuple(sorted(ants)))

    @property
    def size(self) -> int:
        return len(self.antennas)

    def sort_key(self):
        return (len(self.antennas), self.antennas)

    def __iter__(self):
        return iter(self.antennas)

    def __len__(self):
        return len(self.antennas)

    def __str__(self):
        return "{" + ",".join(map(str, self.antennas)) + "}"


def index_bits(n_combinations: int) -> int:
    """Number of index bits ``floor(log2 J)`` carried by ``J`` combinations."""
    if n_combinations < 1:
        raise InvalidConfiguration("need at least one antenna combination")
    return n_combinations.bit_length() - 1


def enumerate_acs(n_rx: int) -> list[AntennaCombination]:
    """All non-empty subsets of ``{1..n_rx}``, ordered by size then lexicographically."""
    if n_rx < 1:
        raise InvalidConfiguration(f"n_rx must be >= 1, got {n_rx}")
    return [
        AntennaCombination(c)
        for size in range(1, n_rx + 1)
        for c in itertools.combinations(range(1, n_rx + 1), size)
    ]


@dataclass(frozen=True)
class AcTable:
    """The ``D = 2**b1`` antenna combinations agreed by transmitter and receiver.

    Bit word ``r - 1`` (natural binary, ``b1`` bits) selects ``entries[r - 1]``.
    """

    entries: tuple[AntennaCombination, ...]
    n_rx: int
    b2: int = 0
    seed: int | None = None

    def __post_init__(self):
        entries = tuple(
            e if isinstance(e, AntennaCombination) else AntennaCombination(e)
            for e in self.entries
        )
        object.__setattr__(self, "entries", entries)
        d = len(entries)
        if d < 1 or d & (d - 1):
            raise InvalidConfiguration(f"table size must be a power of 2, got {d}")
        if len(set(entries)) != d:
            raise InvalidConfiguration("antenna combinations must be distinct")
        for e in entries:
            if max(e.antennas) > self.n_rx:
                raise InvalidConfiguration(f"{e} exceeds n_rx={self.n_rx}")
        if self.b2 < 0:
            raise InvalidConfiguration("b2 must be non-negative")

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def b1(self) -> int:
        return self.size.bit_length() - 1

    @property
    def bits(self) -> int:
        return self.b1 + self.b2

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, r: int) -> AntennaCombination:
        """1-based access, matching the bit-word convention."""
        if not 1 <= r <= self.size:
            raise InvalidInput(f"AC index {r} outside [1, {self.size}]")
        return self.entries[r - 1]

    def to_text(self) -> str:
        return "".join(",".join(map(str, e.antennas)) + "\n" for e in self.entries)

    @classmethod
    def from_text(cls, text: str, n_rx: int, b2: int = 0) -> "AcTable":
        rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
        return cls(tuple(AntennaCombination(map(int, r.split(","))) for r in rows), n_rx, b2)


def select_acs(n_rx: int, seed: int, b2: int = 0) -> AcTable:
    """Seeded random AC selection.

    Draws ``D`` distinct combinations uniformly without replacement from the
    full enumeration (a partial Fisher-Yates shuffle driven by the counter-based
    stream), then sorts them canonically so the bit assignment does not
    depend on draw order.
    """
    pool = enumerate_acs(n_rx)
    return select_from(pool, n_rx, seed, b2)


def select_from(pool, n_rx, seed, b2=0) -> AcTable:
    """Random selection of ``2**floor(log2 len(pool))`` entries of ``pool``."""
    d = 1 << index_bits(len(pool))
    stream = CounterStream(seed, stream=len(pool))
    pool = list(pool)
    for i in range(d):
        j = i + stream.randbelow(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]
    chosen = sorted(pool[:d], key=AntennaCombination.sort_key)
    return AcTable(tuple(chosen), n_rx, b2, seed)


@dataclass(frozen=True)
class SymbolMap:
    """Bijection between ``b2``-bit words and 1-based constellation indices."""

    order: int
    gray: bool = False
    _to_index: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = self.order
        if m < 1 or m & (m - 1):
            raise InvalidConfiguration("modulation order must be a power of 2")
        if self.gray:
            # the point at position p carries the Gray label p ^ (p >> 1)
            to_index = [0] * m
            for p in range(m):
                to_index[p ^ (p >> 1)] = p
        else:
            to_index = list(range(m))
        object.__setattr__(self, "_to_index", tuple(to_index))

    @property
    def bits(self) -> int:
        return self.order.bit_length() - 1

    def index_of(self, word: int) -> int:
        return self._to_index[word] + 1

    def word_of(self, k: int) -> int:
        return self._to_index.index(k - 1)

    def lookup_tables(self):
        """``(word -> index0, index0 -> word)`` integer lists for the kernels."""
        to_index = list(self._to_index)
        to_word = [0] * self.order
        for w, p in enumerate(to_index):
            to_word[p] = w
        return to_index, to_word


def _as_int(bits: Sequence[int] | str) -> tuple[int, int]:
    if isinstance(bits, str):
        bits = [int(c) for c in bits if c in "01"]
    bits = list(bits)
    if any(b not in (0, 1) for b in bits):
        raise InvalidInput("bit word must contain only 0/1")
    value = 0
    for b in bits:
        value = (value << 1) | b
    return value, len(bits)


def bits_to_indices(bits, table: AcTable, symbols: SymbolMap) -> tuple[int, int]:
    """Split a ``b1 + b2`` bit word into (AC index r, constellation index k), both 1-based."""
    value, n = _as_int(bits)
    b1, b2 = table.b1, symbols.bits
    if n != b1 + b2:
        raise InvalidInput(f"expected {b1 + b2} bits, got {n}")
    return (value >> b2) + 1, symbols.index_of(value & ((1 << b2) - 1))


def indices_to_bits(r: int, k: int, table: AcTable, symbols: SymbolMap) -> list[int]:
    if not 1 <= r <= table.size:
        raise InvalidInput(f"AC index {r} outside [1, {table.size}]")
    if not 1 <= k <= symbols.order:
        raise InvalidInput(f"symbol index {k} outside [1, {symbols.order}]")
    b1, b2 = table.b1, symbols.bits
    value = ((r - 1) << b2) | symbols.word_of(k)
    return [(value >> s) & 1 for s in range(b1 + b2 - 1, -1, -1)]


def hamming(a: int, b: int) -> int:
    return bin(a ^ b).count("1")
