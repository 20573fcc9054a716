"""RSM, RGSM and RGSSK as antenna-combination tables over the same chain."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InvalidConfiguration
from .mapping import AcTable, AntennaCombination, SymbolMap, select_acs, select_from

RASM = "RASM"
RSM = "RSM"
RGSM = "RGSM"
RGSSK = "RGSSK"
SCHEMES = (RASM, RSM, RGSM, RGSSK)


@dataclass(frozen=True)
class SchemeSpec:
    """Scheme kind plus the antenna parameters it needs.

    ``order`` is the modulation order; RGSSK always uses 1 (no symbol bits).
    """

    kind: str
    n_rx: int
    n_s: int | None = None
    order: int = 2
    gray: bool = False

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind not in SCHEMES:
            raise InvalidConfiguration(f"unknown scheme {self.kind!r}")
        if self.n_rx < 1:
            raise InvalidConfiguration("n_rx must be >= 1")
        if self.order < 1 or self.order & (self.order - 1):
            raise InvalidConfiguration("modulation order must be a power of 2")
        if kind in (RGSM, RGSSK):
            if self.n_s is None:
                raise InvalidConfiguration(f"{kind} requires n_s")
            if not 1 <= self.n_s <= self.n_rx:
                raise InvalidConfiguration(f"n_s must lie in [1, {self.n_rx}]")
        if kind == RGSSK:
            object.__setattr__(self, "order", 1)
        if kind == RSM and self.n_rx & (self.n_rx - 1):
            raise InvalidConfiguration(f"RSM needs a power-of-2 antenna count, got {self.n_rx}")


def make_scheme_table(spec: SchemeSpec, seed: int) -> tuple[AcTable, SymbolMap]:
    symbols = SymbolMap(spec.order, gray=spec.gray)
    b2 = symbols.bits
    if spec.kind == RASM:
        table = select_acs(spec.n_rx, seed, b2)
    elif spec.kind == RSM:
        table = AcTable(tuple(AntennaCombination((a,)) for a in range(1, spec.n_rx + 1)),
                        spec.n_rx, b2, seed)
    else:
        pool = [AntennaCombination(c)
                for c in itertools.combinations(range(1, spec.n_rx + 1), spec.n_s)]
        table = select_from(pool, spec.n_rx, seed, b2)
    return table, symbols
