"""Orthogonal space-time block codes.

A code is an N_c x n_T transmission matrix over N complex symbols whose
entries are 0 or +/- x_i or +/- conj(x_i).  Orthogonality means
G^H G = (sum_i |x_i|^2) I for every symbol vector, which is what decouples
the MIMO channel into identical SISO subchannels.

The maximal achievable rate for n_T transmit antennas is
(ceil(log2 n_T) + 1) / 2^ceil(log2 n_T); the shipped generators are the
rate-1 two-antenna code and the rate-3/4 four-antenna code.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_ENTRY_RE = re.compile(r"^(-?)x(\d+)(\*?)$")


def ostbc_rate(n_t: int) -> Fraction:
    """Maximal achievable OSTBC rate for n_t transmit antennas."""
    if n_t < 1:
        raise ValueError("n_t must be positive")
    k = math.ceil(math.log2(n_t)) if n_t > 1 else 0
    return Fraction(k + 1, 2**k)


def _parse(entry: str):
    if entry == "0":
        return None
    m = _ENTRY_RE.match(entry)
    if m is None:
        raise ValueError(f"bad generator entry {entry!r}")
    sign = -1.0 if m.group(1) else 1.0
    return sign, int(m.group(2)) - 1, bool(m.group(3))


@dataclass(frozen=True)
class OstbcCode:
    """Orthogonal code description: name, dimensions, rate, generator.

    generator rows are time slots, columns are antennas; entries are the
    strings "0", "x1", "-x2*", etc.  A rate-only code (generator=None)
    carries the dimensional/rate facts without a concrete matrix.
    """

    name: str
    n_t: int
    n_c: int
    n_symbols: int
    generator: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        if self.generator is not None:
            rows = len(self.generator)
            if rows != self.n_c or any(len(r) != self.n_t for r in self.generator):
                raise ValueError("generator shape must be n_c x n_t")
            for row in self.generator:
                for e in row:
                    _parse(e)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.n_symbols, self.n_c)

    def build(self, symbols) -> np.ndarray:
        """Materialize the N_c x n_T transmission matrix for a symbol vector."""
        if self.generator is None:
            raise ValueError(f"code {self.name!r} has no explicit generator")
        x = np.asarray(symbols, dtype=complex)
        if x.shape != (self.n_symbols,):
            raise ValueError(f"expected {self.n_symbols} symbols, got {x.shape}")
        g = np.zeros((self.n_c, self.n_t), dtype=complex)
        for i, row in enumerate(self.generator):
            for j, e in enumerate(row):
                p = _parse(e)
                if p is None:
                    continue
                sign, k, conj = p
                g[i, j] = sign * (x[k].conjugate() if conj else x[k])
        return g

    def orthogonality_defect(self, symbols) -> float:
        """max |G^H G - ||x||^2 I| over entries, for one symbol vector."""
        g = self.build(symbols)
        x = np.asarray(symbols, dtype=complex)
        target = float(np.sum(np.abs(x) ** 2)) * np.eye(self.n_t)
        return float(np.max(np.abs(g.conj().T @ g - target)))

    @classmethod
    def rate_only(cls, n_t: int) -> "OstbcCode":
        k = math.ceil(math.log2(n_t)) if n_t > 1 else 0
        return cls(f"rate-only({n_t})", n_t, 2**k, k + 1)


def alamouti() -> OstbcCode:
    """Rate-1 code for two transmit antennas."""
    gen = (
        ("x1", "x2"),
        ("-x2*", "x1*"),
    )
    return OstbcCode("alamouti", 2, 2, 2, gen)


def g4() -> OstbcCode:
    """Rate-3/4 code for four transmit antennas."""
    gen = (
        ("x1", "x2", "x3", "0"),
        ("-x2*", "x1*", "0", "-x3"),
        ("-x3*", "0", "x1*", "x2"),
        ("0", "x3*", "-x2*", "x1"),
    )
    return OstbcCode("g4", 4, 4, 3, gen)


def code_by_name(name: str) -> OstbcCode:
    table = {"alamouti": alamouti, "g4": g4}
    if name not in table:
        raise ValueError(f"unknown code {name!r}; expected one of {sorted(table)}")
    return table[name]()
