import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fixtures import (ADDER_TABLE_ERRATA, ADDER_TABLE_LEFT, ADDER_TABLE_RIGHT,
                      GRAY_DECODER_TABLE)
from mvlc.levels import (GRAY, POSITIONAL, CodeMap, DigitVector, LogicLevel, RadixError, TableError,
                         add_oracle, code_map, decompose_quaternary, gray_decode, gray_encode,
                         hamming, information_bits, level, mul_digit_oracle, radix_convert,
                         radix_unconvert, recompose, successor, threshold)


def test_logic_level_range():
    assert int(LogicLevel(4, 3)) == 3
    with pytest.raises(RadixError):
        LogicLevel(4, 4)
    with pytest.raises(RadixError):
        LogicLevel(1, 0)
    with pytest.raises(RadixError):
        level(2, 2)
    assert level(LogicLevel(3, 2), 3) == LogicLevel(3, 2)


def test_threshold_examples():
    assert threshold("NQI", 0).value == 3
    assert threshold("IQI", 1).value == 3
    assert threshold("IQI", 2).value == 0
    assert threshold("PQI", 3).value == 0


def test_threshold_matches_decoder_table():
    for q, nqi, iqi, pqi, _, _ in GRAY_DECODER_TABLE:
        assert (threshold("NQI", q).value, threshold("IQI", q).value,
                threshold("PQI", q).value) == (nqi, iqi, pqi)


def test_thresholds_are_nested_steps():
    for q in range(3):
        changed = [threshold(k, q) != threshold(k, q + 1) for k in ("NQI", "IQI", "PQI")]
        assert sum(changed) == 1


def test_gray_examples():
    assert gray_decode(0) == (1, 0)
    assert gray_decode(3) == (0, 0)
    assert gray_encode(*gray_decode(2)).value == 2
    assert gray_encode(1, 1).value == 1
    assert gray_encode(0, 1).value == 2
    assert gray_encode(0, 0).value == 3


def test_gray_matches_decoder_table():
    for q, _, _, _, x, y in GRAY_DECODER_TABLE:
        assert gray_decode(q) == (x, y)
        assert gray_encode(x, y).value == q


def test_gray_adjacency():
    for q in range(3):
        assert hamming(gray_decode(q), gray_decode(q + 1)) == 1


def test_positional_map():
    assert [POSITIONAL.decode(q) for q in range(4)] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert code_map("gray") is GRAY
    with pytest.raises(ValueError):
        code_map("bogus")


def test_code_map_must_be_bijective():
    with pytest.raises(TableError):
        CodeMap("broken", {0: (0, 0), 1: (0, 0), 2: (1, 0), 3: (1, 1)})


def test_add_oracle_examples():
    assert tuple(x.value for x in add_oracle(4, 1, 3, 0)) == (0, 1)
    assert tuple(x.value for x in add_oracle(4, 3, 3, 1)) == (3, 1)
    assert tuple(x.value for x in add_oracle(4, 0, 0, 0)) == (0, 0)
    assert tuple(x.value for x in add_oracle(4, 3, 3, 0)) == (2, 1)
    s, c = add_oracle(2, 1, 1, 1)
    assert (s.radix, c.radix, s.value, c.value) == (2, 2, 1, 1)


@pytest.mark.parametrize("radix", [2, 4])
def test_add_oracle_conservation(radix):
    for a, b, ci in itertools.product(range(radix), range(radix), range(2)):
        s, c = add_oracle(radix, a, b, ci)
        assert radix * c.value + s.value == a + b + ci


def test_adder_table_errata_fixture():
    """The literal table disagrees with arithmetic in exactly the two annotated rows."""
    found = set()
    for half, rows in (("left", ADDER_TABLE_LEFT), ("right", ADDER_TABLE_RIGHT)):
        for i, (a, b, ci, qs, qc) in enumerate(rows):
            s, c = add_oracle(4, a, b, ci)
            if (s.value, c.value) != (qs, qc):
                found.add((half, i))
    assert found == ADDER_TABLE_ERRATA


def test_adder_table_erratum_rows():
    # (3,3,0) is printed with QS=3; arithmetic gives 2
    a, b, ci, qs, qc = ADDER_TABLE_LEFT[15]
    assert (a, b, ci, qs, qc) == (3, 3, 0, 3, 1)
    assert tuple(x.value for x in add_oracle(4, a, b, ci)) == (2, 1)
    # printed "2 3 0 2 1" sits in the Ci=1 half; its outputs are the Ci=1 result
    a, b, ci, qs, qc = ADDER_TABLE_RIGHT[11]
    assert ci == 0
    assert tuple(x.value for x in add_oracle(4, a, b, ci)) != (qs, qc)
    assert tuple(x.value for x in add_oracle(4, a, b, 1)) == (qs, qc)


def test_adder_table_other_rows_agree():
    rows = [r for i, r in enumerate(ADDER_TABLE_LEFT) if ("left", i) not in ADDER_TABLE_ERRATA]
    rows += [r for i, r in enumerate(ADDER_TABLE_RIGHT) if ("right", i) not in ADDER_TABLE_ERRATA]
    assert len(rows) == 30
    for a, b, ci, qs, qc in rows:
        assert tuple(x.value for x in add_oracle(4, a, b, ci)) == (qs, qc)


def test_mul_digit_oracle():
    p, c = mul_digit_oracle(3, 3)
    assert (p.value, c.value, c.radix) == (1, 2, 3)
    assert all(tuple(x.value for x in mul_digit_oracle(0, k)) == (0, 0) for k in range(4))
    assert tuple(x.value for x in mul_digit_oracle(2, 3)) == (2, 1)


def test_mul_digit_brute_force():
    for a, b in itertools.product(range(4), repeat=2):
        p, c = mul_digit_oracle(a, b)
        assert 4 * c.value + p.value == a * b
        assert c.value <= 2


def test_successor():
    assert successor(1).value == 2
    assert successor(3).value == 0
    for q in range(4):
        v = q
        for _ in range(4):
            v = successor(v)
        assert v.value == q


def test_decompose_examples():
    nqi = {q: threshold("NQI", q).value for q in range(4)}
    f3, f2, f1 = decompose_quaternary(nqi)
    assert f3 == {(0,): 1, (1,): 0, (2,): 0, (3,): 0}
    assert not any(f2.values()) and not any(f1.values())

    succ = {q: successor(q).value for q in range(4)}
    f3, f2, f1 = decompose_quaternary(succ)
    assert [k for k, v in f3.items() if v] == [(2,)]
    assert [k for k, v in f2.items() if v] == [(1,)]
    assert [k for k, v in f1.items() if v] == [(0,)]

    zero = {q: 0 for q in range(4)}
    assert all(not any(f.values()) for f in decompose_quaternary(zero))


def test_decompose_rejects_partial_tables():
    with pytest.raises(TableError):
        decompose_quaternary({0: 1, 1: 2})
    with pytest.raises((TableError, RadixError)):
        decompose_quaternary({q: 4 for q in range(4)})


def test_recomposition_exhaustive_over_small_domains():
    rng = random.Random(7)
    for arity in (1, 2, 3):
        domain = list(itertools.product(range(4), repeat=arity))
        for _ in range(20):
            table = {k: rng.randrange(4) for k in domain}
            parts = decompose_quaternary(table)
            assert recompose(*parts) == table


def test_radix_convert_examples():
    assert radix_convert(DigitVector(4, (1, 3))).digits == (1, 0, 1, 1)
    assert radix_convert(DigitVector(4, ())).digits == ()
    with pytest.raises(ValueError):
        radix_unconvert(DigitVector(2, (1, 0, 1)))


def test_radix_convert_gray_bit_order():
    # bit pairs are stored (y, x), low bit first
    x, y = gray_decode(0)
    assert radix_convert(DigitVector(4, (0,)), "gray").digits == (y, x)


def test_radix_convert_preserves_value_seeded():
    rng = random.Random(2024)
    for _ in range(10_000):
        width = rng.randrange(0, 9)
        v = DigitVector(4, tuple(rng.randrange(4) for _ in range(width)))
        bits = radix_convert(v)
        assert bits.value == v.value
        assert radix_unconvert(bits) == v


@given(st.lists(st.integers(0, 3), max_size=12), st.sampled_from(["positional", "gray"]))
def test_radix_convert_roundtrip(digits, kind):
    v = DigitVector(4, tuple(digits))
    assert radix_unconvert(radix_convert(v, kind), kind) == v


@given(st.integers(0, 4**8 - 1))
def test_digit_vector_from_int(value):
    v = DigitVector.from_int(value, 4, 8)
    assert v.value == value
    assert len(v) == 8


def test_information_bits():
    assert information_bits(4) == 2
    assert information_bits(2) == 1
