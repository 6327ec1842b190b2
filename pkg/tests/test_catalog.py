import itertools

import pytest

from mvlc.catalog import (COUNTERPARTS, NAMED_MIXED_KINDS, UnknownPrimitiveError, builtin_catalog,
                          carry_radix, counterpart_pairs, mixed_kind_name, mixed_radix_adder_spec,
                          parse_mixed_kind)
from mvlc.levels import add_oracle, gray_decode, mul_digit_oracle, threshold

REQUIRED = {
    "inverter_binary": (2, 1),
    "nand2_binary": (4, 1),
    "xor2_binary": (10, 1),
    "and2_binary": (6, 1),
    "full_adder_binary": (28, 1),
    "half_adder_binary": (16, 1),
    "inverter_quaternary": (10, 3),
    "nand2_quaternary:sharifi": (20, None),
    "nand2_quaternary:ebrahimi": (16, None),
    "decoder_q_to_b": (14, None),
    "encoder_b_to_q": (12, None),
    "qfa_v1:3ps": (112, 3),
    "qfa_v1:1ps": (112, 1),
    "qfa_v2": (111, None),
    "qfa_v3:moaiyeri": (154, None),
    "qfa_v3:roosta_3ps": (82, 3),
    "qfa_v3:roosta_1ps": (130, 1),
    "qfa_v3:roosta_3ps_buffered": (100, None),
    "qfa_v3:roosta_1ps_buffered": (148, None),
}


@pytest.mark.parametrize("key", sorted(REQUIRED))
def test_required_entries(catalog, key):
    tc, rails = REQUIRED[key]
    spec = catalog.resolve(key)
    assert spec.reported_tc == tc
    if rails is not None:
        assert spec.supply_rails == rails


def test_lookup_examples(catalog):
    assert catalog.lookup("nand2_quaternary", variant="sharifi").reported_tc == 20
    assert catalog.lookup("full_adder_binary").reported_tc == 28
    assert catalog.lookup("decoder_q_to_b").reported_tc == 14
    assert catalog.lookup("encoder_b_to_q").reported_tc == 12
    assert catalog.lookup("inverter_binary").reported_tc == 2
    assert catalog.lookup("inverter_binary").source == "derived"


def test_unspecified_counts(catalog):
    for key in ("nqi", "iqi", "pqi", *NAMED_MIXED_KINDS):
        spec = catalog.resolve(key)
        assert spec.reported_tc is None
    assert catalog.resolve("nqi").supply_rails == 1


def test_qmul_interval(catalog):
    spec = catalog.resolve("qmul_digit")
    assert spec.tc_range == (54, 76)
    assert spec.reported_tc == 54
    assert builtin_catalog(76).resolve("qmul_digit").reported_tc == 76


def test_unknown_and_ambiguous(catalog):
    with pytest.raises(UnknownPrimitiveError):
        catalog.resolve("flux_capacitor")
    with pytest.raises(UnknownPrimitiveError, match="ambiguous"):
        catalog.resolve("qfa_v3")
    assert "qfa_v3:roosta_3ps" in catalog
    assert "nope" not in catalog


def test_with_tc_overrides(catalog):
    custom = catalog.with_tc({"nqi": 4, "Q332": 30})
    assert custom.resolve("nqi").reported_tc == 4
    assert custom.resolve("nqi:bit").reported_tc == 4
    assert custom.resolve("Q332").reported_tc == 30
    assert catalog.resolve("nqi").reported_tc is None
    with pytest.raises(UnknownPrimitiveError):
        catalog.with_tc({"nothing": 1})


def test_roosta_buffered_pairing(catalog):
    pairs = {}
    for spec in catalog.variants("qfa_v3"):
        if "unbuffered" in spec.meta:
            pairs[catalog.resolve(spec.meta["unbuffered"]).reported_tc] = spec.reported_tc
    assert pairs == {82: 100, 130: 148}


# -- behaviors against oracles -------------------------------------------

@pytest.mark.parametrize("key", ["qfa_v1:3ps", "qfa_v1:1ps", "qfa_v2", "qfa_v3:moaiyeri",
                                 "qfa_v3:roosta_3ps", "qfa_v3:roosta_1ps",
                                 "qfa_v3:roosta_3ps_buffered", "qfa_v3:roosta_1ps_buffered"])
def test_qfa_behaviors(catalog, key):
    spec = catalog.resolve(key)
    for a, b, ci in itertools.product(range(4), range(4), range(2)):
        assert spec(a, b, ci) == tuple(x.value for x in add_oracle(4, a, b, ci))


def test_qfa_example(catalog):
    assert catalog.resolve("qfa_v2")(1, 2, 1) == (0, 1)


def test_binary_full_adder(catalog):
    fa = catalog.resolve("full_adder_binary")
    assert fa(1, 1, 1) == (1, 1)
    for a, b, c in itertools.product(range(2), repeat=3):
        s, co = fa(a, b, c)
        assert 2 * co + s == a + b + c


def test_qmul_digit_behavior(catalog):
    spec = catalog.resolve("qmul_digit")
    assert spec.port("c").radix == 3
    for a, b in itertools.product(range(4), repeat=2):
        assert spec(a, b) == tuple(x.value for x in mul_digit_oracle(a, b))
    assert max(spec(a, b)[1] for a, b in itertools.product(range(4), repeat=2)) == 2


def test_detectors(catalog):
    for kind in ("nqi", "iqi", "pqi"):
        for q in range(4):
            t = threshold(kind.upper(), q).value
            assert catalog.resolve(kind)(q) == (t,)
            assert catalog.resolve(f"{kind}:bit")(q) == (t // 3,)


def test_codecs(catalog):
    dec = catalog.resolve("decoder_q_to_b:gray")
    enc = catalog.resolve("encoder_b_to_q:gray")
    assert dec(2) == (0, 1)
    for q in range(4):
        assert dec(q) == gray_decode(q)
        assert enc(*dec(q)) == (q,)
    pdec = catalog.resolve("decoder_q_to_b")
    assert [pdec(q) for q in range(4)] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_quaternary_gates(catalog):
    inv = catalog.resolve("inverter_quaternary")
    assert [inv(q)[0] for q in range(4)] == [3, 2, 1, 0]
    nand = catalog.resolve("nand2_quaternary:sharifi")
    for a, b in itertools.product(range(4), repeat=2):
        assert nand(a, b) == (3 - min(a, b),)


def test_lut_matches_behavior(catalog):
    for spec in catalog:
        rows = list(itertools.product(*(range(p.radix) for p in reversed(spec.inputs))))
        for row in rows:
            values = tuple(reversed(row))
            assert tuple(spec.lut[spec.index(values)]) == spec.behavior(*values)


# -- mixed radix cells --------------------------------------------------------

def test_mixed_examples():
    assert mixed_radix_adder_spec("Q332")(3, 3, 2) == (0, 2)
    assert mixed_radix_adder_spec("QHA31")(3, 1) == (0, 1)
    assert mixed_radix_adder_spec("QHA32")(0, 0) == (0, 0)


@pytest.mark.parametrize("kind", NAMED_MIXED_KINDS)
def test_mixed_brute_force(kind):
    spec = mixed_radix_adder_spec(kind)
    maxes = parse_mixed_kind(kind)
    co = spec.port("co")
    assert co.radix == carry_radix(sum(maxes)) == sum(maxes) // 4 + 1
    for values in itertools.product(*(range(m + 1) for m in maxes)):
        s, c = spec(*values)
        assert 4 * c + s == sum(values)
        assert c < co.radix


def test_mixed_kind_names():
    assert parse_mixed_kind("Q322") == (3, 2, 2)
    assert parse_mixed_kind("QHA31") == (3, 1)
    assert mixed_kind_name([2, 3, 2]) == "Q322"
    with pytest.raises(ValueError):
        parse_mixed_kind("Q233")
    with pytest.raises(ValueError):
        parse_mixed_kind("X12")


def test_mixed_port_radices():
    spec = mixed_radix_adder_spec("Q322")
    assert [p.radix for p in spec.inputs] == [4, 3, 3]
    assert spec.source == "etiQMUL"
    assert mixed_radix_adder_spec("Q333").source == "extension"


# -- counterparts --------------------------------------------------------------

def test_counterpart_pairs_cover_quaternary_cells(catalog):
    pairs = counterpart_pairs(catalog)
    names = {q.name for q, _ in pairs}
    assert names == set(COUNTERPARTS)
    for q, b in pairs:
        assert b.ports[0].radix == 2
        assert q.reported_tc / b.reported_tc > 2
