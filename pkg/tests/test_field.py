import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zkmsa.field import (
    MODULUS,
    FieldElement,
    FieldError,
    decode_signed,
    encode_signed,
    fe_add,
    fe_inv,
    fe_mul,
    fe_neg,
    from_decimal,
    to_decimal,
)

MINUS_ONE = 21888242871839275222246405745257275088548364400416034343698204186575808495616

elements = st.integers(min_value=0, max_value=MODULUS - 1)


def test_modulus_is_the_bn254_scalar_prime():
    assert MODULUS == MINUS_ONE + 1
    assert pow(3, MODULUS - 1, MODULUS) == 1


@pytest.mark.parametrize("a, b, expected", [
    (0, 12345, 12345),
    (MODULUS - 1, 1, 0),
    (5, 7, 12),
])
def test_add(a, b, expected):
    assert fe_add(a, b) == expected


@pytest.mark.parametrize("a, b, expected", [
    (1, 98765, 98765),
    (MODULUS - 1, MODULUS - 1, 1),
    (0, 98765, 0),
])
def test_mul(a, b, expected):
    assert fe_mul(a, b) == expected


def test_neg():
    assert fe_neg(0) == 0
    assert fe_neg(1) == MINUS_ONE
    assert len(str(fe_neg(1))) == 77
    assert fe_neg(5) == MODULUS - 5


def test_inv():
    assert fe_inv(1) == 1
    assert fe_inv(MODULUS - 1) == MODULUS - 1
    with pytest.raises(FieldError):
        fe_inv(0)
    with pytest.raises(FieldError):
        fe_inv(MODULUS)


@given(elements.filter(bool))
def test_inverse_law(a):
    assert fe_mul(a, fe_inv(a)) == 1


@given(elements)
def test_neg_is_additive_inverse(a):
    assert fe_add(a, fe_neg(a)) == 0


def test_field_axioms_on_random_triples():
    rng = random.Random(1)
    for _ in range(1000):
        a, b, c = (FieldElement(rng.randrange(MODULUS)) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c


def test_field_element_stays_reduced():
    x = FieldElement(-1)
    assert x == MINUS_ONE
    assert isinstance(x + 1, FieldElement) and x + 1 == 0
    assert 1 - FieldElement(2) == MINUS_ONE
    assert FieldElement(3) / FieldElement(3) == 1
    assert FieldElement(2) ** 3 == 8


def test_encode_signed():
    assert encode_signed(-1) == MINUS_ONE
    assert encode_signed(0) == 0
    assert encode_signed(7) == 7
    with pytest.raises(FieldError):
        encode_signed(MODULUS // 2 + 1)
    with pytest.raises(FieldError):
        encode_signed(-MODULUS)


def test_decode_signed():
    assert decode_signed(MODULUS - 1, 10) == -1
    assert decode_signed(0, 10) == 0
    assert decode_signed(10, 10) == 10
    with pytest.raises(FieldError):
        decode_signed(11, 10)
    with pytest.raises(FieldError):
        decode_signed(MODULUS - 11, 10)


def test_signed_round_trip():
    for s in range(-1000, 1001):
        assert decode_signed(encode_signed(s), abs(s)) == s


@given(st.integers(2, 10), st.integers(1, 30), st.data())
def test_signed_round_trip_over_score_window(nseq, aln_len, data):
    bound = nseq * nseq * aln_len
    s = data.draw(st.integers(-bound, bound))
    assert decode_signed(encode_signed(s), bound) == s


def test_decimal_serialization():
    assert to_decimal(MODULUS - 1) == str(MINUS_ONE)
    assert from_decimal("0") == 0
    assert from_decimal(str(MINUS_ONE)) == MINUS_ONE
    for bad in ["-1", "01", "", "1.0", str(MODULUS)]:
        with pytest.raises(FieldError):
            from_decimal(bad)
