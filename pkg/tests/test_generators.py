import itertools
import random
from collections import Counter

import pytest

from mvlc.catalog import NAMED_MIXED_KINDS, parse_mixed_kind
from mvlc.generators import (GENERATORS, NAMED_CIRCUITS, GeneratorConfig, build, choose_cell,
                             gen_binary_rca, gen_quaternary_rca, gen_v1_adder, gen_v1_multiplier,
                             gen_v2_structural, gen_wallace_binary, gen_wallace_quaternary,
                             wrap_primitive)
from mvlc.levels import add_oracle
from mvlc.report import metrics
from mvlc.simulate import equiv_check, evaluate, verify_exhaustive, verify_sampled

QFA_KEYS = ["qfa_v1:3ps", "qfa_v1:1ps", "qfa_v2", "qfa_v3:moaiyeri", "qfa_v3:roosta_3ps",
            "qfa_v3:roosta_1ps", "v1"]


def digits(value, base, n):
    return [(value // base**i) % base for i in range(n)]


def operands(prefix, value, base, n):
    return {f"{prefix}{i}": d for i, d in enumerate(digits(value, base, n))}


def read(result, prefix, base, n):
    return sum(result[f"{prefix}{i}"].value * base**i for i in range(n))


# -- ripple carry ------------------------------------------------------------

def test_binary_rca_counts():
    assert metrics(gen_binary_rca(1)).derived_tc == 28
    assert metrics(gen_binary_rca(8)).derived_tc == 224


def test_binary_rca_small_sum():
    n = gen_binary_rca(2)
    r = evaluate(n, {**operands("a", 3, 2, 2), **operands("b", 3, 2, 2), "cin": 0})
    assert read(r, "s", 2, 2) + 4 * r["cout"].value == 6


@pytest.mark.parametrize("variant", QFA_KEYS)
def test_quaternary_rca_one_digit(variant):
    n = gen_quaternary_rca(1, variant)
    for a, b, ci in itertools.product(range(4), range(4), range(2)):
        r = evaluate(n, {"a0": a, "b0": b, "cin": ci})
        assert (r["s0"].value, r["cout"].value) == tuple(x.value for x in add_oracle(4, a, b, ci))


def test_quaternary_rca_two_digit_example():
    n = gen_quaternary_rca(2)
    r = evaluate(n, {"a0": 3, "a1": 3, "b0": 1, "b1": 0, "cin": 0})
    assert (r["s0"].value, r["s1"].value, r["cout"].value) == (0, 0, 1)


def test_quaternary_rca_vs_binary_random():
    q, b = gen_quaternary_rca(4), gen_binary_rca(8)
    rng = random.Random(11)
    pairs = [(rng.randrange(256), rng.randrange(256)) for _ in range(1000)]
    pairs += list(itertools.product((0, 255), repeat=2))
    for x, y in pairs:
        rq = evaluate(q, {**operands("a", x, 4, 4), **operands("b", y, 4, 4), "cin": 0})
        rb = evaluate(b, {**operands("a", x, 2, 8), **operands("b", y, 2, 8), "cin": 0})
        total_q = read(rq, "s", 4, 4) + 256 * rq["cout"].value
        total_b = read(rb, "s", 2, 8) + 256 * rb["cout"].value
        assert total_q == total_b == x + y


@pytest.mark.parametrize("n", [1, 2, 3])
def test_quaternary_rca_exhaustive(n):
    assert verify_exhaustive(gen_quaternary_rca(n), "add").ok


def test_large_rca_sampled():
    report = verify_sampled(gen_quaternary_rca(16), "add", samples=10_000, seed=3)
    assert report.ok and not report.exhaustive and report.total_vectors >= 10_000


def test_rca_rejects_bad_width():
    with pytest.raises(ValueError):
        gen_binary_rca(0)
    with pytest.raises(ValueError):
        gen_quaternary_rca(0)


# -- V1 / V2 adders ------------------------------------------------------------

def test_v1_adder_counts_and_example():
    n = gen_v1_adder()
    assert n.reported_tc == 112
    assert metrics(n).derived_tc == 2 * 14 + 2 * 28 + 12 == 96
    r = evaluate(n, {"a0": 2, "b0": 2, "cin": 0})
    assert (r["s0"].value, r["cout"].value) == (0, 1)
    assert verify_exhaustive(n, "add").ok


def test_v1_adder_gray_is_not_arithmetic():
    n = gen_v1_adder(GeneratorConfig(code_map="gray"))
    assert n.validate().ok
    assert not verify_exhaustive(n, "add").ok


def test_v2_structural():
    n = gen_v2_structural()
    assert n.validate().ok
    assert n.reported_tc is None
    assert verify_exhaustive(n, "add").ok
    assert {"nqi:bit", "iqi:bit", "pqi:bit", "qcombine"} <= {i.primitive for i in n.instances}


# -- Wallace trees -----------------------------------------------------------

def test_wallace_binary_structure():
    n = gen_wallace_binary(8)
    kinds = Counter(i.primitive for i in n.instances)
    assert kinds["and2_binary"] == 64
    assert n.reported_tc == 1892
    assert len(n.outputs) == 16
    r = evaluate(n, {**operands("a", 255, 2, 8), **operands("b", 255, 2, 8)})
    assert read(r, "p", 2, 16) == 65025


def test_wallace_binary_two_bits_table():
    n = gen_wallace_binary(2)
    for x, y in itertools.product(range(4), repeat=2):
        r = evaluate(n, {**operands("a", x, 2, 2), **operands("b", y, 2, 2)})
        assert read(r, "p", 2, 4) == x * y


@pytest.mark.parametrize("n", range(2, 7))
def test_wallace_binary_exhaustive(n):
    assert verify_exhaustive(gen_wallace_binary(n), "mul").ok


def test_wallace_quaternary_structure():
    n = gen_wallace_quaternary(4)
    kinds = Counter(i.primitive for i in n.instances)
    assert kinds["qmul_digit"] == 16
    assert n.reported_tc == 2888
    assert len(n.outputs) == 8
    r = evaluate(n, {**operands("a", 255, 4, 4), **operands("b", 255, 4, 4)})
    assert read(r, "p", 4, 8) == 65025


@pytest.mark.parametrize("width", [1, 2, 3])
def test_wallace_quaternary_exhaustive(width):
    assert verify_exhaustive(gen_wallace_quaternary(width), "mul").ok


@pytest.mark.parametrize("width", [2, 3, 4])
def test_wallace_quaternary_carry_radices(width):
    n = gen_wallace_quaternary(width)
    for inst in n.instances:
        spec = n.spec(inst)
        if inst.primitive == "qmul_digit":
            assert n.nets[inst.bindings["c"]] == 3
        elif spec.name in NAMED_MIXED_KINDS or spec.name.startswith("Q"):
            maxes = parse_mixed_kind(spec.name)
            if "co" in inst.bindings:
                assert n.nets[inst.bindings["co"]] == sum(maxes) // 4 + 1


def test_wallace_quaternary_uses_named_cells_only():
    for width in (2, 3, 4):
        n = gen_wallace_quaternary(width)
        mixed = {i.primitive for i in n.instances if i.primitive.startswith("Q")}
        assert mixed <= set(NAMED_MIXED_KINDS)


def test_ternary_never_on_binary_port():
    n = gen_wallace_quaternary(4)
    for inst in n.instances:
        spec = n.spec(inst)
        for p in spec.inputs:
            assert n.nets[inst.bindings[p.name]] <= p.radix


def test_choose_cell():
    assert choose_cell([3, 2, 2]) == "Q322"
    assert choose_cell([2, 3, 3]) == "Q332"
    assert choose_cell([1, 3]) == "QHA31"
    assert choose_cell([2, 3]) == "QHA32"


def test_v1_multiplier():
    n = gen_v1_multiplier(4)
    assert n.reported_tc == 2032
    assert n.attrs["core"]["reported_tc"] == 1892
    assert verify_exhaustive(n, "mul").ok


def test_hybrid_equals_direct_small():
    for width in (1, 2, 3):
        assert equiv_check(gen_v1_multiplier(width), gen_wallace_quaternary(width)).ok


# -- registry ------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(NAMED_CIRCUITS))
def test_named_circuits_validate(name):
    gen, n, variant, _ = NAMED_CIRCUITS[name]
    assert build(gen, n, variant).validate().ok


def test_generators_registry():
    assert {"rca_binary", "rca_quaternary", "wallace_binary", "wallace_quaternary",
            "v1_multiplier", "v1_adder", "primitive"} <= set(GENERATORS)
    with pytest.raises(ValueError):
        build("nonexistent")


def test_wrap_primitive():
    n = wrap_primitive("inverter_quaternary")
    assert n.reported_tc == 10
    assert metrics(n).supply_rails == 3


def test_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(qmul_tc_choice=99)
    with pytest.raises(ValueError):
        GeneratorConfig(code_map="octal")


def test_generator_fanout_config():
    n = gen_wallace_quaternary(3, GeneratorConfig(max_fanout=2))
    assert n.attrs.get("buffered")
    assert verify_exhaustive(n, "mul").ok


def test_additivity():
    n = gen_binary_rca(4)
    parts = [n.spec(i).reported_tc for i in n.instances]
    assert metrics(n).derived_tc == sum(parts)
