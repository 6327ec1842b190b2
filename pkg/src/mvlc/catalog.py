"""Primitive cell library with behaviors and transistor counts.

Counts marked as reported come from published designs; ``reported_tc=None``
means no count is known and the cell is itemized separately in cost reports.
"""
from __future__ import annotations

import dataclasses
import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Mapping

import numpy as np

from . import levels
from .levels import GRAY, POSITIONAL, Threshold


@dataclass(frozen=True)
class PortSpec:
    name: str
    direction: str
    radix: int
    # for circuit outputs: the net the port reads (defaults to `name`)
    net: str | None = None

    def __post_init__(self):
        if self.direction not in ("input", "output"):
            raise ValueError(f"port {self.name!r}: direction must be 'input' or 'output'")
        if self.radix not in levels.SUPPORTED_RADICES:
            raise ValueError(f"port {self.name!r}: unsupported radix {self.radix}")


def inp(name, radix):
    return PortSpec(name, "input", radix)


def out(name, radix):
    return PortSpec(name, "output", radix)


@dataclass(frozen=True)
class PrimitiveSpec:
    name: str
    ports: tuple[PortSpec, ...]
    behavior: Callable[..., tuple]
    reported_tc: int | None
    supply_rails: int = 1
    source: str = ""
    variant: str | None = None
    tc_range: tuple[int, int] | None = None
    rails: str = "Vdd"
    note: str = ""
    # free-form metadata that must survive into reports
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.reported_tc is not None and self.reported_tc < 0:
            raise ValueError(f"{self.key}: negative transistor count")
        if self.supply_rails < 1:
            raise ValueError(f"{self.key}: at least one supply rail is required")
        if self.tc_range and self.reported_tc is not None:
            lo, hi = self.tc_range
            if not lo <= self.reported_tc <= hi:
                raise ValueError(f"{self.key}: {self.reported_tc} outside {self.tc_range}")

    @property
    def key(self) -> str:
        return self.name if self.variant is None else f"{self.name}:{self.variant}"

    @property
    def inputs(self) -> tuple[PortSpec, ...]:
        return tuple(p for p in self.ports if p.direction == "input")

    @property
    def outputs(self) -> tuple[PortSpec, ...]:
        return tuple(p for p in self.ports if p.direction == "output")

    def port(self, name: str) -> PortSpec:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(f"{self.key} has no port {name!r}")

    def __call__(self, *values) -> tuple[int, ...]:
        if len(values) != len(self.inputs):
            raise TypeError(f"{self.key} takes {len(self.inputs)} inputs, got {len(values)}")
        return tuple(int(v) for v in self.lut[self.index(values)])

    def index(self, values) -> int:
        idx, stride = 0, 1
        for v, p in zip(values, self.inputs):
            v = int(v)
            if not 0 <= v < p.radix:
                raise levels.RadixError(f"{self.key}.{p.name}: {v} out of range for radix {p.radix}")
            idx += v * stride
            stride *= p.radix
        return idx

    @cached_property
    def lut(self) -> np.ndarray:
        """Truth table as an (n_rows, n_outputs) array, first input varying fastest."""
        ins, outs = self.inputs, self.outputs
        rows = []
        # itertools.product varies the last element fastest, so reverse
        for combo in itertools.product(*(range(p.radix) for p in reversed(ins))):
            values = combo[::-1]
            result = tuple(int(v) for v in self.behavior(*values))
            if len(result) != len(outs):
                raise ValueError(f"{self.key}: behavior returned {len(result)} values for {len(outs)} outputs")
            for v, p in zip(result, outs):
                if not 0 <= v < p.radix:
                    raise ValueError(f"{self.key}: output {p.name}={v} at {values} exceeds radix {p.radix}")
            rows.append(result)
        table = np.array(rows, dtype=np.uint8).reshape(len(rows), len(outs))
        table.setflags(write=False)
        return table


# -- behaviors -------------------------------------------------------------

def _not(a):
    return (1 - a,)


def _nand(a, b):
    return (1 - (a & b),)


def _and(a, b):
    return (a & b,)


def _xor(a, b):
    return (a ^ b,)


def _identity(a):
    return (a,)


def _full_add(radix):
    def behavior(a, b, ci):
        s, c = levels.add_oracle(radix, a, b, ci)
        return (s.value, c.value)
    return behavior


def _half_add_binary(a, b):
    return (a ^ b, a & b)


def _qinv(a):
    return (3 - a,)


def _qnand(a, b):
    return (3 - min(a, b),)


def _threshold(kind, as_bit=False):
    def behavior(q):
        v = levels.threshold(kind, q).value
        return (int(v == 3),) if as_bit else (v,)
    return behavior


def _decoder(cmap):
    def behavior(q):
        return cmap.decode(q)
    return behavior


def _encoder(cmap):
    def behavior(x, y):
        return (cmap.encode(x, y).value,)
    return behavior


def _qmul(a, b):
    p, c = levels.mul_digit_oracle(a, b)
    return (p.value, c.value)


def _qcombine(f3, f2, f1):
    # 3*f3 + 2*f2 + f1 for disjoint indicators; priority order keeps it total
    return (3 if f3 else 2 if f2 else 1 if f1 else 0,)


# -- mixed-radix adders ----------------------------------------------------

MIXED_KIND = re.compile(r"^(Q)([123]{3})$|^(QHA)([123]{2})$")
NAMED_MIXED_KINDS = ("Q332", "Q322", "QHA32", "QHA31")


def parse_mixed_kind(kind: str) -> tuple[int, ...]:
    """Maximum input values encoded in a mixed-radix adder name, e.g. Q332 -> (3, 3, 2)."""
    m = MIXED_KIND.match(kind)
    if not m:
        raise ValueError(f"not a mixed-radix adder kind: {kind!r}")
    digits = m.group(2) or m.group(4)
    maxes = tuple(int(d) for d in digits)
    if list(maxes) != sorted(maxes, reverse=True):
        raise ValueError(f"{kind}: input maxima must be listed in non-increasing order")
    return maxes


def mixed_kind_name(maxes: Iterable[int]) -> str:
    maxes = sorted(maxes, reverse=True)
    prefix = "Q" if len(maxes) == 3 else "QHA"
    return prefix + "".join(str(m) for m in maxes)


def carry_radix(max_sum: int) -> int:
    return max_sum // 4 + 1


def mixed_radix_adder_spec(kind: str) -> PrimitiveSpec:
    """Adder whose inputs carry at most the values named by `kind`.

    Output ``s`` is the quaternary sum digit. Output ``co`` is the carry with
    radix ``max_sum // 4 + 1``; it is omitted when the sum never reaches 4.
    """
    maxes = parse_mixed_kind(kind)
    max_sum = sum(maxes)
    names = "abc"[: len(maxes)]
    ports = [inp(n, m + 1) for n, m in zip(names, maxes)]
    ports.append(out("s", 4))
    has_carry = max_sum >= 4
    if has_carry:
        ports.append(out("co", carry_radix(max_sum)))

    def behavior(*values):
        c, s = divmod(sum(values), 4)
        return (s, c) if has_carry else (s,)

    named = kind in NAMED_MIXED_KINDS
    return PrimitiveSpec(
        name=kind,
        ports=tuple(ports),
        behavior=behavior,
        reported_tc=None,
        supply_rails=3,
        rails="Vdd, 2Vdd/3, Vdd/3",
        source="etiQMUL" if named else "extension",
        note="" if named else "reduction cell outside the published Q332/Q322/QHA32/QHA31 set",
        meta={"max_inputs": ",".join(map(str, maxes))},
    )


# -- catalog ---------------------------------------------------------------

QUAT_RAILS = "Vdd, 2Vdd/3, Vdd/3"
QFA_PORTS = (inp("a", 4), inp("b", 4), inp("ci", 2), out("s", 4), out("co", 2))
BFA_PORTS = (inp("a", 2), inp("b", 2), inp("cin", 2), out("s", 2), out("cout", 2))


@dataclass(frozen=True)
class ReportedComposite:
    """A published transistor count for a whole circuit, not a single cell."""

    name: str
    reported_tc: int
    source: str
    label: str


class UnknownPrimitiveError(KeyError):
    pass


class Catalog:
    """Immutable set of primitives addressed by ``name`` or ``name:variant``."""

    def __init__(self, specs: Iterable[PrimitiveSpec], composites: Iterable[ReportedComposite] = (),
                 defaults: Mapping[str, str] | None = None):
        self._specs: dict[str, PrimitiveSpec] = {}
        for s in specs:
            if s.key in self._specs:
                raise ValueError(f"duplicate primitive {s.key}")
            self._specs[s.key] = s
        self.composites = {c.name: c for c in composites}
        self.defaults = dict(defaults or {})
        self._dynamic: dict[str, PrimitiveSpec] = {}

    def __iter__(self):
        return iter(self._specs.values())

    def __len__(self):
        return len(self._specs)

    def __contains__(self, key):
        try:
            self.resolve(key)
        except UnknownPrimitiveError:
            return False
        return True

    def keys(self):
        return list(self._specs)

    def lookup(self, name: str, variant: str | None = None) -> PrimitiveSpec:
        if variant is not None:
            return self.resolve(f"{name}:{variant}")
        return self.resolve(name)

    def variants(self, name: str) -> list[PrimitiveSpec]:
        return [s for s in self._specs.values() if s.name == name]

    def resolve(self, key: str) -> PrimitiveSpec:
        if key in self._specs:
            return self._specs[key]
        if key in self._dynamic:
            return self._dynamic[key]
        if ":" not in key:
            if key in self.defaults:
                return self._specs[f"{key}:{self.defaults[key]}"]
            found = self.variants(key)
            if len(found) == 1:
                return found[0]
            if found:
                raise UnknownPrimitiveError(
                    f"{key!r} is ambiguous; pick one of {sorted(s.key for s in found)}")
            if MIXED_KIND.match(key):
                # deterministic factory, so caching does not change observable state
                spec = mixed_radix_adder_spec(key)
                self._dynamic[key] = spec
                return spec
        raise UnknownPrimitiveError(f"unknown primitive {key!r}")

    def with_tc(self, overrides: Mapping[str, int | None]) -> Catalog:
        """Copy with transistor counts replaced; keys may name a base name (all variants)."""
        specs = list(self._specs.values())
        for name in overrides:
            if not any(s.key == name or s.name == name for s in specs) and not MIXED_KIND.match(name):
                raise UnknownPrimitiveError(f"cannot override unknown primitive {name!r}")
        extra = [mixed_radix_adder_spec(k) for k in overrides
                 if MIXED_KIND.match(k) and k not in self._specs]
        new = []
        for s in specs + extra:
            tc = overrides.get(s.key, overrides.get(s.name, s.reported_tc))
            new.append(dataclasses.replace(s, reported_tc=tc) if tc != s.reported_tc else s)
        return Catalog(new, self.composites.values(), self.defaults)


@lru_cache(maxsize=None)
def builtin_catalog(qmul_tc_choice: int = 54) -> Catalog:
    """The shipped primitive library; cached, since catalogs are immutable."""
    specs = [
        PrimitiveSpec("inverter_binary", (inp("a", 2), out("y", 2)), _not, 2,
                      source="derived", note="10 T quaternary inverter = two binary inverters + 6 T"),
        PrimitiveSpec("nand2_binary", (inp("a", 2), inp("b", 2), out("y", 2)), _nand, 4,
                      source="cmos"),
        PrimitiveSpec("xor2_binary", (inp("a", 2), inp("b", 2), out("y", 2)), _xor, 10,
                      source="std-cell"),
        PrimitiveSpec("and2_binary", (inp("a", 2), inp("b", 2), out("y", 2)), _and, 6,
                      source="std-cell"),
        PrimitiveSpec("full_adder_binary", BFA_PORTS, _full_add(2), 28,
                      source="cmos-28t"),
        PrimitiveSpec("half_adder_binary", (inp("a", 2), inp("b", 2), out("s", 2), out("cout", 2)),
                      _half_add_binary, 16, source="decision", note="XOR (10 T) + AND (6 T)"),
        PrimitiveSpec("buffer_binary", (inp("a", 2), out("y", 2)), _identity, 4,
                      source="decision", note="two cascaded binary inverters"),
        PrimitiveSpec("buffer_ternary", (inp("a", 3), out("y", 3)), _identity, 20,
                      supply_rails=3, rails=QUAT_RAILS, source="decision",
                      note="ternary carry buffered on quaternary levels: two quaternary inverters"),
        PrimitiveSpec("buffer_quaternary", (inp("a", 4), out("y", 4)), _identity, 20,
                      supply_rails=3, rails=QUAT_RAILS, source="decision",
                      note="two cascaded quaternary inverters"),
        PrimitiveSpec("inverter_quaternary", (inp("a", 4), out("y", 4)), _qinv, 10,
                      supply_rails=3, rails=QUAT_RAILS, source="sharifi"),
        PrimitiveSpec("nand2_quaternary", (inp("a", 4), inp("b", 4), out("y", 4)), _qnand, 20,
                      supply_rails=3, rails=QUAT_RAILS, source="sharifi", variant="sharifi"),
        PrimitiveSpec("nand2_quaternary", (inp("a", 4), inp("b", 4), out("y", 4)), _qnand, 16,
                      supply_rails=3, rails=QUAT_RAILS, source="ebrahimi", variant="ebrahimi"),
        PrimitiveSpec("decoder_q_to_b", (inp("q", 4), out("x", 2), out("y", 2)), _decoder(GRAY), 14,
                      source="cntfet-codec", variant="gray"),
        PrimitiveSpec("decoder_q_to_b", (inp("q", 4), out("x", 2), out("y", 2)), _decoder(POSITIONAL),
                      14, source="decision", variant="positional",
                      note="same detector structure as the Gray decoder, outputs permuted"),
        PrimitiveSpec("encoder_b_to_q", (inp("x", 2), inp("y", 2), out("q", 4)), _encoder(GRAY), 12,
                      supply_rails=3, rails=QUAT_RAILS, source="cntfet-codec",
                      variant="gray"),
        PrimitiveSpec("encoder_b_to_q", (inp("x", 2), inp("y", 2), out("q", 4)), _encoder(POSITIONAL),
                      12, supply_rails=3, rails=QUAT_RAILS, source="decision", variant="positional",
                      note="same structure as the Gray encoder, inputs permuted"),
        PrimitiveSpec("qfa_v1", QFA_PORTS, _full_add(4), 112, supply_rails=3, rails=QUAT_RAILS,
                      source="etiQADD", variant="3ps"),
        PrimitiveSpec("qfa_v1", QFA_PORTS, _full_add(4), 112, supply_rails=1,
                      source="etiQADD", variant="1ps"),
        PrimitiveSpec("qfa_v2", QFA_PORTS, _full_add(4), 111, supply_rails=3, rails=QUAT_RAILS,
                      source="ebrahimi", variant="ebrahimi"),
        PrimitiveSpec("qfa_v3", QFA_PORTS, _full_add(4), 154, supply_rails=3, rails=QUAT_RAILS,
                      source="moaiyeri", variant="moaiyeri"),
        PrimitiveSpec("qfa_v3", QFA_PORTS, _full_add(4), 82, supply_rails=3, rails=QUAT_RAILS,
                      source="roosta", variant="roosta_3ps"),
        PrimitiveSpec("qfa_v3", QFA_PORTS, _full_add(4), 130, supply_rails=1,
                      source="roosta", variant="roosta_1ps"),
        # buffered counts paired with the unbuffered ones by magnitude; the
        # opposite supply labelling is kept in meta
        PrimitiveSpec("qfa_v3", QFA_PORTS, _full_add(4), 100, supply_rails=3, rails=QUAT_RAILS,
                      source="roosta", variant="roosta_3ps_buffered",
                      note="fan-out reduced; also quoted as the 1 PS figure",
                      meta={"unbuffered": "qfa_v3:roosta_3ps", "text_label": "1 PS"}),
        PrimitiveSpec("qfa_v3", QFA_PORTS, _full_add(4), 148, supply_rails=1,
                      source="roosta", variant="roosta_1ps_buffered",
                      note="fan-out reduced; also quoted as the 3 PS figure",
                      meta={"unbuffered": "qfa_v3:roosta_1ps", "text_label": "3 PS"}),
        PrimitiveSpec("qmul_digit", (inp("a", 4), inp("b", 4), out("p", 4), out("c", 3)), _qmul,
                      qmul_tc_choice, tc_range=(54, 76), supply_rails=3, rails=QUAT_RAILS,
                      source="etiQMUL", note="54-76 T depending on inverter fan-out"),
        PrimitiveSpec("qcombine", (inp("f3", 2), inp("f2", 2), inp("f1", 2), out("q", 4)), _qcombine,
                      None, supply_rails=3, rails=QUAT_RAILS, source="decision",
                      note="output stage 3*f3 + 2*f2 + f1 of direct (V2) synthesis"),
    ]
    for kind in Threshold:
        name = kind.value.lower()
        specs.append(PrimitiveSpec(name, (inp("q", 4), out("y", 4)), _threshold(kind), None,
                                   source="ebrahimi"))
        specs.append(PrimitiveSpec(name, (inp("q", 4), out("y", 2)), _threshold(kind, as_bit=True),
                                   None, source="ebrahimi", variant="bit",
                                   note="same detector, output read as a binary signal"))
    specs += [mixed_radix_adder_spec(k) for k in NAMED_MIXED_KINDS]

    composites = [
        ReportedComposite("mul8x8_binary", 1892, "etiQMUL", "8x8 bit multiplier"),
        ReportedComposite("qmul4x4_hybrid", 2032, "etiQMUL",
                          "4x4 Q multiplier, encoder and decoder"),
        ReportedComposite("qmul4x4_direct", 2888, "etiQMUL",
                          "4x4 Q multiplier, direct implementation"),
    ]
    defaults = {"decoder_q_to_b": "positional", "encoder_b_to_q": "positional"}
    return Catalog(specs, composites, defaults)


# quaternary cell -> binary cell processing one bit of the same function
COUNTERPARTS = {
    "inverter_quaternary": "inverter_binary",
    "nand2_quaternary": "nand2_binary",
    "qfa_v1": "full_adder_binary",
    "qfa_v2": "full_adder_binary",
    "qfa_v3": "full_adder_binary",
    "qmul_digit": "and2_binary",
    "buffer_quaternary": "buffer_binary",
}


def counterpart_pairs(catalog: Catalog) -> list[tuple[PrimitiveSpec, PrimitiveSpec]]:
    pairs = []
    for spec in catalog:
        base = COUNTERPARTS.get(spec.name)
        if base is not None:
            pairs.append((spec, catalog.resolve(base)))
    return pairs
