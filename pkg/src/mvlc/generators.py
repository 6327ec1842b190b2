"""Circuit generators: ripple-carry adders, quaternary adder styles, Wallace multipliers."""
from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import levels
from .catalog import Catalog, builtin_catalog
from .netlist import Netlist, NetlistBuilder, insert_buffers

QFA_NAMES = ("qfa_v1", "qfa_v2", "qfa_v3")


@dataclass(frozen=True)
class GeneratorConfig:
    code_map: str = "positional"
    qmul_tc_choice: int = 54
    max_fanout: int | None = None
    adder_variant: str = "qfa_v3:roosta_3ps"
    # (primitive key, transistor count) pairs applied on top of the builtin catalog
    tc_overrides: tuple = ()

    def __post_init__(self):
        levels.code_map(self.code_map)
        if not 54 <= self.qmul_tc_choice <= 76:
            raise ValueError(f"qmul_tc_choice {self.qmul_tc_choice} outside [54, 76]")
        if self.max_fanout is not None and self.max_fanout < 2:
            raise ValueError("max_fanout must be at least 2")

    def catalog(self) -> Catalog:
        return _configured_catalog(self.qmul_tc_choice, tuple(self.tc_overrides))


@lru_cache(maxsize=64)
def _configured_catalog(qmul_tc_choice, overrides) -> Catalog:
    catalog = builtin_catalog(qmul_tc_choice)
    return catalog.with_tc(dict(overrides)) if overrides else catalog


def _finish(netlist: Netlist, config: GeneratorConfig) -> Netlist:
    if config.max_fanout is not None:
        return insert_buffers(netlist, config.max_fanout)
    return netlist


def _adder_attrs(n: int, base: int) -> dict:
    return {
        "base": base,
        "operands": {"a": [f"a{i}" for i in range(n)], "b": [f"b{i}" for i in range(n)], "cin": ["cin"]},
        "result": [f"s{i}" for i in range(n)] + ["cout"],
    }


def _mul_attrs(n: int, base: int) -> dict:
    return {
        "base": base,
        "operands": {"a": [f"a{i}" for i in range(n)], "b": [f"b{i}" for i in range(n)]},
        "result": [f"p{i}" for i in range(2 * n)],
    }


def wrap_primitive(key: str, catalog: Catalog | None = None) -> Netlist:
    """A one-instance circuit exposing every port of primitive `key`."""
    catalog = catalog or builtin_catalog()
    spec = catalog.resolve(key)
    b = NetlistBuilder(spec.key, catalog)
    for p in spec.inputs:
        b.input(p.name, p.radix)
    produced = b.add(key, id="u0", outputs={p.name: p.name for p in spec.outputs},
                     **{p.name: p.name for p in spec.inputs})
    for p in spec.outputs:
        b.output(p.name, produced[p.name])
    attrs = {"reported_tc": spec.reported_tc}
    if spec.name in QFA_NAMES:
        attrs.update(base=4, operands={"a": ["a"], "b": ["b"], "ci": ["ci"]}, result=["s", "co"])
    return b.build(**attrs)


def gen_binary_rca(n_bits: int, config: GeneratorConfig = GeneratorConfig()) -> Netlist:
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    b = NetlistBuilder(f"rca_binary_{n_bits}", config.catalog())
    for i in range(n_bits):
        b.input(f"a{i}", 2)
        b.input(f"b{i}", 2)
    carry = b.input("cin", 2)
    for i in range(n_bits):
        fa = b.add("full_adder_binary", id=f"fa{i}", a=f"a{i}", b=f"b{i}", cin=carry)
        b.output(f"s{i}", fa["s"])
        carry = fa["cout"]
    b.output("cout", carry)
    return _finish(b.build(**_adder_attrs(n_bits, 2)), config)


def _qfa_key(variant: str, catalog: Catalog) -> str:
    spec = catalog.resolve(variant)
    if spec.name not in QFA_NAMES:
        raise ValueError(f"{variant!r} is not a quaternary full adder")
    return spec.key


def gen_quaternary_rca(n_digits: int, variant: str = "qfa_v3:roosta_3ps",
                       config: GeneratorConfig = GeneratorConfig()) -> Netlist:
    """Chain of one-digit quaternary adders with binary carries.

    `variant` is a catalog key of a behavioral adder block (``qfa_v2``,
    ``qfa_v3:roosta_3ps`` ...) or ``"v1"`` for the decoder/binary/encoder
    structure of :func:`gen_v1_adder`.
    """
    if n_digits < 1:
        raise ValueError("n_digits must be >= 1")
    catalog = config.catalog()
    b = NetlistBuilder(f"rca_quaternary_{n_digits}_{variant}", catalog)
    for i in range(n_digits):
        b.input(f"a{i}", 4)
        b.input(f"b{i}", 4)
    carry = b.input("cin", 2)
    if variant == "v1":
        cell = gen_v1_adder(dataclasses.replace(config, max_fanout=None))
    else:
        key = _qfa_key(variant, catalog)
    for i in range(n_digits):
        if variant == "v1":
            o = b.inline(cell, f"qfa{i}", a0=f"a{i}", b0=f"b{i}", cin=carry)
            s, carry = o["s0"], o["cout"]
        else:
            o = b.add(key, id=f"qfa{i}", a=f"a{i}", b=f"b{i}", ci=carry)
            s, carry = o["s"], o["co"]
        b.output(f"s{i}", s)
    b.output("cout", carry)
    return _finish(b.build(**_adder_attrs(n_digits, 4)), config)


def gen_v1_adder(config: GeneratorConfig = GeneratorConfig()) -> Netlist:
    """One-digit quaternary adder: two 4-to-2 decoders, a 2-bit binary adder, one 2-to-4 encoder."""
    catalog = config.catalog()
    code = config.code_map
    b = NetlistBuilder(f"v1_adder_{code}", catalog)
    b.input("a0", 4)
    b.input("b0", 4)
    b.input("cin", 2)
    da = b.add(f"decoder_q_to_b:{code}", id="dec_a", q="a0")
    db = b.add(f"decoder_q_to_b:{code}", id="dec_b", q="b0")
    lo = b.add("full_adder_binary", id="fa0", a=da["y"], b=db["y"], cin="cin")
    hi = b.add("full_adder_binary", id="fa1", a=da["x"], b=db["x"], cin=lo["cout"])
    enc = b.add(f"encoder_b_to_q:{code}", id="enc", x=hi["s"], y=lo["s"])
    b.output("s0", enc["q"])
    b.output("cout", hi["cout"])
    reported = catalog.lookup("qfa_v1", "3ps").reported_tc
    return _finish(b.build(reported_tc=reported, code_map=code, **_adder_attrs(1, 4)), config)


# -- direct (V2) synthesis -------------------------------------------------

class _Gates:
    """Binary AND/OR/NOT on top of the catalog cells, with constant folding."""

    def __init__(self, builder: NetlistBuilder):
        self.b = builder
        self.nots = {}

    def inv(self, x):
        if x not in self.nots:
            self.nots[x] = self.b.add("inverter_binary", a=x)["y"]
        return self.nots[x]

    def and_(self, xs):
        xs = list(xs)
        while len(xs) > 1:
            xs = [self.b.add("and2_binary", a=xs[i], b=xs[i + 1])["y"] if i + 1 < len(xs) else xs[i]
                  for i in range(0, len(xs), 2)]
        return xs[0]

    def or_(self, xs):
        xs = list(xs)
        while len(xs) > 1:
            xs = [self.b.add("nand2_binary", a=self.inv(xs[i]), b=self.inv(xs[i + 1]))["y"]
                  if i + 1 < len(xs) else xs[i] for i in range(0, len(xs), 2)]
        return xs[0]


def gen_v2_structural(config: GeneratorConfig = GeneratorConfig()) -> Netlist:
    """One-digit quaternary adder synthesized from the 3*f3 + 2*f2 + f1 split.

    Threshold detectors give one-hot literals, each indicator is a binary
    sum of products, and a combiner cell forms the quaternary sum. No cost
    claim is attached.
    """
    catalog = config.catalog()
    b = NetlistBuilder("v2_structural", catalog)
    g = _Gates(b)
    b.input("a0", 4)
    b.input("b0", 4)
    b.input("cin", 2)
    onehot = {}
    for q in ("a0", "b0"):
        n = b.add("nqi:bit", id=f"nqi_{q}", q=q)["y"]
        i = b.add("iqi:bit", id=f"iqi_{q}", q=q)["y"]
        p = b.add("pqi:bit", id=f"pqi_{q}", q=q)["y"]
        onehot[q] = [n, g.and_([i, g.inv(n)]), g.and_([p, g.inv(i)]), g.inv(p)]
    cin_lit = [g.inv("cin"), "cin"]

    sum_table, carry_table = {}, {}
    for a, bb, c in itertools.product(range(4), range(4), range(2)):
        s, co = levels.add_oracle(4, a, bb, c)
        sum_table[(a, bb, c)] = s.value
        carry_table[(a, bb, c)] = co.value

    def indicator(table, value):
        terms = []
        for a, bb in itertools.product(range(4), range(4)):
            hits = [c for c in range(2) if table[(a, bb, c)] == value]
            if not hits:
                continue
            lits = [onehot["a0"][a], onehot["b0"][bb]]
            if len(hits) == 1:
                lits.append(cin_lit[hits[0]])
            terms.append(g.and_(lits))
        return g.or_(terms)

    f3, f2, f1 = levels.decompose_quaternary(sum_table, radices=(4, 4, 2))
    nets = {}
    for value, f in ((3, f3), (2, f2), (1, f1)):
        nets[value] = indicator({k: value * v for k, v in f.items()}, value)
    q = b.add("qcombine", id="combine", f3=nets[3], f2=nets[2], f1=nets[1])["q"]
    b.output("s0", q)
    b.output("cout", indicator(carry_table, 1))
    return _finish(b.build(notes=["structural synthesis; no published count"], **_adder_attrs(1, 4)),
                   config)


# -- Wallace trees ---------------------------------------------------------

def _binary_reduce(b: NetlistBuilder, cols: list[list[str]], width: int) -> list[str]:
    """Wallace stages on bit columns, then a ripple-carry final adder."""
    stage = 0
    while max(len(c) for c in cols) > 2:
        new = [[] for _ in range(width + 1)]
        for k, ops in enumerate(cols[:width]):
            i = 0
            while len(ops) - i >= 3:
                fa = b.add("full_adder_binary", id=f"s{stage}_c{k}_fa{i // 3}",
                           a=ops[i], b=ops[i + 1], cin=ops[i + 2])
                new[k].append(fa["s"])
                new[k + 1].append(fa["cout"])
                i += 3
            if len(ops) - i == 2:
                ha = b.add("half_adder_binary", id=f"s{stage}_c{k}_ha", a=ops[i], b=ops[i + 1])
                new[k].append(ha["s"])
                new[k + 1].append(ha["cout"])
            elif len(ops) - i == 1:
                new[k].append(ops[i])
        cols = new
        stage += 1
    bits, carry = [], None
    for k in range(width):
        ops = cols[k] + ([carry] if carry else [])
        carry = None
        if len(ops) == 3:
            fa = b.add("full_adder_binary", id=f"final_c{k}_fa", a=ops[0], b=ops[1], cin=ops[2])
            bits.append(fa["s"])
            carry = fa["cout"]
        elif len(ops) == 2:
            ha = b.add("half_adder_binary", id=f"final_c{k}_ha", a=ops[0], b=ops[1])
            bits.append(ha["s"])
            carry = ha["cout"]
        elif len(ops) == 1:
            bits.append(ops[0])
        else:
            raise AssertionError(f"column {k} is empty")
    # a carry out of the top column is provably zero and left unconnected
    return bits


def gen_wallace_binary(n_bits: int, config: GeneratorConfig = GeneratorConfig()) -> Netlist:
    if not 2 <= n_bits <= 8:
        raise ValueError("gen_wallace_binary supports 2..8 bits")
    b = NetlistBuilder(f"wallace_binary_{n_bits}", config.catalog())
    for i in range(n_bits):
        b.input(f"a{i}", 2)
    for i in range(n_bits):
        b.input(f"b{i}", 2)
    width = 2 * n_bits
    cols = [[] for _ in range(width + 1)]
    for i in range(n_bits):
        for j in range(n_bits):
            pp = b.add("and2_binary", id=f"pp_{i}_{j}", a=f"a{i}", b=f"b{j}")
            cols[i + j].append(pp["y"])
    bits = _binary_reduce(b, cols, width)
    for k, net in enumerate(bits):
        b.output(f"p{k}", net, 2)
    attrs = _mul_attrs(n_bits, 2)
    if n_bits == 8:
        attrs["reported_tc"] = b.catalog.composites["mul8x8_binary"].reported_tc
    return _finish(b.build(**attrs), config)


# reduction cells in order of preference; "qfa" stands for the configured adder
_FULL_CELLS = [("Q322", (3, 2, 2)), ("qfa", (3, 3, 1)), ("Q332", (3, 3, 2)), ("Q333", (3, 3, 3))]
_HALF_CELLS = [("QHA31", (3, 1)), ("QHA32", (3, 2)), ("QHA33", (3, 3))]


def choose_cell(maxes) -> str:
    """Smallest reduction cell whose rated input maxima dominate `maxes`."""
    maxes = sorted(maxes, reverse=True)
    for name, rated in (_FULL_CELLS if len(maxes) == 3 else _HALF_CELLS):
        if all(m <= r for m, r in zip(maxes, rated)):
            return name
    raise ValueError(f"no reduction cell for operands with maxima {maxes}")


class _QuatReducer:
    def __init__(self, b: NetlistBuilder, adder_key: str):
        self.b = b
        self.adder_key = adder_key

    def maxv(self, net):
        return self.b.nets[net] - 1

    def add(self, ops, iid):
        """Add operand nets (sorted by radix, widest first); return (sum, carry or None)."""
        ops = sorted(ops, key=lambda n: -self.maxv(n))
        cell = choose_cell([self.maxv(n) for n in ops])
        if cell == "qfa":
            o = self.b.add(self.adder_key, id=iid, a=ops[0], b=ops[1], ci=ops[2])
            return o["s"], o["co"]
        o = self.b.add(cell, id=iid, **dict(zip("abc", ops)))
        return o["s"], o.get("co")

    def triples(self, ops):
        """Group a column three at a time, at most two quaternary operands per group."""
        high = [n for n in ops if self.maxv(n) == 3]
        low = [n for n in ops if self.maxv(n) < 3]
        groups = []
        for _ in range(len(ops) // 3):
            g = high[:2]
            high = high[2:]
            while len(g) < 3:
                g.append(low.pop(0) if low else high.pop(0))
            groups.append(g)
        return groups, high + low


def gen_wallace_quaternary(n_digits: int, config: GeneratorConfig = GeneratorConfig()) -> Netlist:
    """N x N digit multiplier: one-digit multipliers and a mixed-radix reduction tree.

    Each one-digit multiplier yields a quaternary product digit in its column
    and a ternary carry one column up. Columns are reduced with cells named by
    their operand maxima (Q332, Q322, QHA32, QHA31 ...), then a ripple of
    quaternary full adders with binary carries sums the last two rows.
    """
    if not 1 <= n_digits <= 4:
        raise ValueError("gen_wallace_quaternary supports 1..4 digits")
    catalog = config.catalog()
    b = NetlistBuilder(f"wallace_quaternary_{n_digits}", catalog)
    for i in range(n_digits):
        b.input(f"a{i}", 4)
    for i in range(n_digits):
        b.input(f"b{i}", 4)
    width = 2 * n_digits
    cols = [[] for _ in range(width + 1)]
    for i in range(n_digits):
        for j in range(n_digits):
            m = b.add("qmul_digit", id=f"qm_{i}_{j}", a=f"a{i}", b=f"b{j}")
            cols[i + j].append(m["p"])
            cols[i + j + 1].append(m["c"])
    red = _QuatReducer(b, _qfa_key(config.adder_variant, catalog))

    stage = 0
    while max(len(c) for c in cols[:width]) > 2:
        new = [[] for _ in range(width + 1)]
        for k, ops in enumerate(cols[:width]):
            groups, rest = red.triples(ops)
            if len(rest) == 2:
                groups.append(rest)
                rest = []
            for t, grp in enumerate(groups):
                s, c = red.add(grp, f"s{stage}_c{k}_{t}")
                new[k].append(s)
                if c is not None:
                    new[k + 1].append(c)
            new[k] += rest
        new[width] += cols[width]
        cols = new
        stage += 1

    digits, carry = [], None
    for k in range(width):
        ops = cols[k] + ([carry] if carry else [])
        carry = None
        if len(ops) >= 2:
            s, carry = red.add(ops, f"final_c{k}")
            digits.append(s)
        elif ops:
            digits.append(ops[0])
        else:
            raise AssertionError(f"column {k} is empty")
    for k, net in enumerate(digits):
        b.output(f"p{k}", net, 4)
    attrs = _mul_attrs(n_digits, 4)
    if n_digits == 4:
        attrs["reported_tc"] = catalog.composites["qmul4x4_direct"].reported_tc
    return _finish(b.build(**attrs), config)


def gen_v1_multiplier(n_digits: int, config: GeneratorConfig = GeneratorConfig()) -> Netlist:
    """Quaternary N x N multiplier around a binary 2N x 2N Wallace core."""
    if not 1 <= n_digits <= 4:
        raise ValueError("gen_v1_multiplier supports 1..4 digits")
    catalog = config.catalog()
    code = config.code_map
    core = gen_wallace_binary(2 * n_digits, dataclasses.replace(config, max_fanout=None))
    b = NetlistBuilder(f"v1_multiplier_{n_digits}_{code}", catalog)
    bits = {}
    for op in "ab":
        for i in range(n_digits):
            q = b.input(f"{op}{i}", 4)
            d = b.add(f"decoder_q_to_b:{code}", id=f"dec_{op}{i}", q=q)
            bits[f"{op}{2 * i}"] = d["y"]
            bits[f"{op}{2 * i + 1}"] = d["x"]
    prod = b.inline(core, "core", **bits)
    for k in range(2 * n_digits):
        e = b.add(f"encoder_b_to_q:{code}", id=f"enc{k}", x=prod[f"p{2 * k + 1}"], y=prod[f"p{2 * k}"])
        b.output(f"p{k}", e["q"])
    attrs = _mul_attrs(n_digits, 4)
    attrs["code_map"] = code
    attrs["core"] = {"name": core.name, "instances": len(core.instances)}
    if n_digits == 4:
        attrs["reported_tc"] = catalog.composites["qmul4x4_hybrid"].reported_tc
        attrs["core"]["reported_tc"] = catalog.composites["mul8x8_binary"].reported_tc
    return _finish(b.build(**attrs), config)


# -- registry used by the CLI ----------------------------------------------

GENERATORS = {
    "rca_binary": lambda n, variant, cfg: gen_binary_rca(n or 8, cfg),
    "rca_quaternary": lambda n, variant, cfg: gen_quaternary_rca(n or 4, variant or cfg.adder_variant, cfg),
    "v1_adder": lambda n, variant, cfg: gen_v1_adder(cfg),
    "v2_structural": lambda n, variant, cfg: gen_v2_structural(cfg),
    "qfa": lambda n, variant, cfg: wrap_primitive(variant or cfg.adder_variant, cfg.catalog()),
    "wallace_binary": lambda n, variant, cfg: gen_wallace_binary(n or 8, cfg),
    "wallace_quaternary": lambda n, variant, cfg: gen_wallace_quaternary(n or 4, cfg),
    "v1_multiplier": lambda n, variant, cfg: gen_v1_multiplier(n or 4, cfg),
    "primitive": lambda n, variant, cfg: wrap_primitive(variant, cfg.catalog()),
}

# shorthand circuit names: (generator, n, variant, oracle)
NAMED_CIRCUITS = {
    "qfa": ("qfa", None, None, "add"),
    "v1add": ("v1_adder", None, None, "add"),
    "rca8": ("rca_binary", 8, None, "add"),
    "qrca4": ("rca_quaternary", 4, None, "add"),
    "bmul8": ("wallace_binary", 8, None, "mul"),
    "qmul4": ("wallace_quaternary", 4, None, "mul"),
    "v1mul4": ("v1_multiplier", 4, None, "mul"),
}


def build(generator: str, n: int | None = None, variant: str | None = None,
          config: GeneratorConfig = GeneratorConfig()) -> Netlist:
    try:
        fn = GENERATORS[generator]
    except KeyError:
        raise ValueError(f"unknown generator {generator!r}; expected one of {sorted(GENERATORS)}") from None
    if generator == "primitive" and not variant:
        raise ValueError("the primitive generator needs --variant <catalog key>")
    return fn(n, variant, config)
