"""Value domains and arithmetic ground truth.

Everything in this module is a pure function over small integers. Circuits
built elsewhere in the package are checked against these definitions.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

SUPPORTED_RADICES = (2, 3, 4)


class RadixError(ValueError):
    """A value or operand does not belong to the expected radix."""


class TableError(ValueError):
    """A truth table is not total over its declared domain."""


@dataclass(frozen=True, order=True)
class LogicLevel:
    """One digit value together with the radix it lives in."""

    radix: int
    value: int

    def __post_init__(self):
        if self.radix < 2:
            raise RadixError(f"radix must be >= 2, got {self.radix}")
        if not 0 <= self.value < self.radix:
            raise RadixError(f"value {self.value} out of range for radix {self.radix}")

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value


def level(value, radix: int) -> LogicLevel:
    """Coerce an int or LogicLevel to a LogicLevel of `radix`."""
    if isinstance(value, LogicLevel):
        if value.radix != radix:
            raise RadixError(f"expected radix {radix}, got radix {value.radix}")
        return value
    return LogicLevel(radix, int(value))


@dataclass(frozen=True)
class DigitVector:
    """Little-endian digits of a uniform radix (index 0 is least significant)."""

    radix: int
    digits: tuple[int, ...]

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        for d in digits:
            if not 0 <= d < self.radix:
                raise RadixError(f"digit {d} out of range for radix {self.radix}")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def from_int(cls, value: int, radix: int, width: int) -> DigitVector:
        if value < 0 or value >= radix**width:
            raise ValueError(f"{value} does not fit in {width} radix-{radix} digits")
        digits = []
        for _ in range(width):
            value, d = divmod(value, radix)
            digits.append(d)
        return cls(radix, tuple(digits))

    @property
    def value(self) -> int:
        return sum(d * self.radix**i for i, d in enumerate(self.digits))

    def levels(self) -> list[LogicLevel]:
        return [LogicLevel(self.radix, d) for d in self.digits]

    def __len__(self):
        return len(self.digits)


# -- threshold detectors ---------------------------------------------------

class Threshold(str, Enum):
    NQI = "NQI"
    IQI = "IQI"
    PQI = "PQI"


# highest input level for which each detector still outputs 3
_THRESHOLD_LIMIT = {Threshold.NQI: 0, Threshold.IQI: 1, Threshold.PQI: 2}


def threshold(kind, q) -> LogicLevel:
    """Quaternary threshold inverter: 3 while q is at or below its limit, else 0."""
    q = level(q, 4)
    limit = _THRESHOLD_LIMIT[Threshold(kind)]
    return LogicLevel(4, 3 if q.value <= limit else 0)


# -- binary <-> quaternary code maps ---------------------------------------

@dataclass(frozen=True)
class CodeMap:
    """Bijection between a quaternary digit and an (X, Y) bit pair."""

    kind: str
    forward: Mapping[int, tuple[int, int]]

    def __post_init__(self):
        inverse = {xy: q for q, xy in self.forward.items()}
        if sorted(self.forward) != [0, 1, 2, 3] or len(inverse) != 4:
            raise TableError(f"code map {self.kind!r} is not a bijection on 0..3")
        for x, y in inverse:
            if x not in (0, 1) or y not in (0, 1):
                raise ValueError(f"code map {self.kind!r} emits non-binary bits")
        object.__setattr__(self, "inverse", inverse)

    def decode(self, q) -> tuple[int, int]:
        return self.forward[level(q, 4).value]

    def encode(self, x: int, y: int) -> LogicLevel:
        try:
            return LogicLevel(4, self.inverse[(int(x), int(y))])
        except KeyError:
            raise RadixError(f"({x}, {y}) is not a bit pair") from None


# Q -> (X, Y) exactly as the Gray decoder table prints it.
GRAY = CodeMap("gray", {0: (1, 0), 1: (1, 1), 2: (0, 1), 3: (0, 0)})
# Q = 2X + Y
POSITIONAL = CodeMap("positional", {0: (0, 0), 1: (0, 1), 2: (1, 0), 3: (1, 1)})

CODE_MAPS = {"gray": GRAY, "positional": POSITIONAL}


def code_map(kind) -> CodeMap:
    if isinstance(kind, CodeMap):
        return kind
    try:
        return CODE_MAPS[kind]
    except KeyError:
        raise ValueError(f"unknown code map {kind!r}; expected one of {sorted(CODE_MAPS)}") from None


def gray_decode(q) -> tuple[int, int]:
    return GRAY.decode(q)


def gray_encode(x: int, y: int) -> LogicLevel:
    return GRAY.encode(x, y)


def radix_convert(v: DigitVector, cmap="positional") -> DigitVector:
    """Expand each quaternary digit into two bits, low bit (Y) first."""
    cmap = code_map(cmap)
    if v.radix != 4:
        raise RadixError(f"expected a radix-4 vector, got radix {v.radix}")
    bits = []
    for d in v.digits:
        x, y = cmap.decode(d)
        bits += [y, x]
    return DigitVector(2, tuple(bits))


def radix_unconvert(v: DigitVector, cmap="positional") -> DigitVector:
    """Inverse of :func:`radix_convert`."""
    cmap = code_map(cmap)
    if v.radix != 2:
        raise RadixError(f"expected a radix-2 vector, got radix {v.radix}")
    if len(v) % 2:
        raise ValueError(f"bit vector of odd length {len(v)} cannot be paired into digits")
    digits = [cmap.encode(v.digits[i + 1], v.digits[i]).value for i in range(0, len(v), 2)]
    return DigitVector(4, tuple(digits))


# -- arithmetic oracles ----------------------------------------------------

def add_oracle(radix: int, a, b, ci) -> tuple[LogicLevel, LogicLevel]:
    """One-digit full addition: (a + b + ci) split into sum digit and binary carry."""
    a, b, ci = level(a, radix), level(b, radix), level(ci, 2)
    carry, s = divmod(a.value + b.value + ci.value, radix)
    return LogicLevel(radix, s), LogicLevel(2, carry)


def mul_digit_oracle(a, b) -> tuple[LogicLevel, LogicLevel]:
    """One-digit quaternary product: quaternary low digit and ternary carry."""
    a, b = level(a, 4), level(b, 4)
    carry, p = divmod(a.value * b.value, 4)
    return LogicLevel(4, p), LogicLevel(3, carry)


def successor(q) -> LogicLevel:
    return LogicLevel(4, (level(q, 4).value + 1) % 4)


def decompose_quaternary(fn_table: Mapping, radices: Sequence[int] | None = None):
    """Split a quaternary-valued table into the indicator tables of values 3, 2 and 1.

    Keys of `fn_table` are input tuples (bare ints are treated as 1-tuples).
    `radices` declares the input domain; by default every input is quaternary.
    Returns three dicts ``(f3, f2, f1)`` mapping every input tuple to 0 or 1.
    """
    table = {_as_tuple(k): int(v) for k, v in fn_table.items()}
    arities = {len(k) for k in table}
    if radices is None:
        if len(arities) != 1:
            raise TableError("cannot infer the input domain from an empty or ragged table")
        radices = (4,) * arities.pop()
    domain = list(itertools.product(*(range(r) for r in radices)))
    missing = [k for k in domain if k not in table]
    if missing:
        raise TableError(f"table is not total: {len(missing)} rows missing, e.g. {missing[0]}")
    extra = set(table) - set(domain)
    if extra:
        raise TableError(f"table has rows outside its domain, e.g. {sorted(extra)[0]}")
    for k, v in table.items():
        if not 0 <= v < 4:
            raise RadixError(f"output {v} at {k} is not a quaternary level")
    f3 = {k: int(table[k] == 3) for k in domain}
    f2 = {k: int(table[k] == 2) for k in domain}
    f1 = {k: int(table[k] == 1) for k in domain}
    return f3, f2, f1


def recompose(f3: Mapping, f2: Mapping, f1: Mapping) -> dict:
    return {k: 3 * f3[k] + 2 * f2[k] + f1[k] for k in f3}


def _as_tuple(key) -> tuple:
    if isinstance(key, tuple):
        return tuple(int(x) for x in key)
    return (int(key),)


def information_bits(radix: int) -> float:
    return math.log2(radix)


def hamming(a: Iterable[int], b: Iterable[int]) -> int:
    return sum(x != y for x, y in zip(a, b))
