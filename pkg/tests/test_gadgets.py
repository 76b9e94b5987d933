import itertools
import random

import pytest

from zkmsa.field import MODULUS, decode_signed, encode_signed, fe_inv
from zkmsa.gadgets import g_and, g_is_equal, g_is_zero, g_not, g_or
from zkmsa.r1cs import (
    INV_OR_ZERO,
    PRIVATE_INPUT,
    ConstraintSystemBuilder,
    check_satisfied,
    stats,
    synthesize_witness,
)


def unary(gadget):
    b = ConstraintSystemBuilder()
    x = b.alloc_signal(PRIVATE_INPUT, "x")
    out = gadget(b, x)
    return b.finalize(), out


def binary(gadget):
    b = ConstraintSystemBuilder()
    x = b.alloc_signal(PRIVATE_INPUT, "a")
    y = b.alloc_signal(PRIVATE_INPUT, "b")
    out = gadget(b, x, y)
    return b.finalize(), out


def run(cs, out, **inputs):
    w = synthesize_witness(cs, inputs)
    assert check_satisfied(cs, w)
    return w[out]


@pytest.mark.parametrize("gadget, cost", [
    (g_is_zero, 2),
    (g_not, 0),
])
def test_unary_costs(gadget, cost):
    cs, _ = unary(gadget)
    assert stats(cs).nonlinear_constraints == cost
    assert stats(cs).linear_constraints == 0


@pytest.mark.parametrize("gadget, cost", [
    (g_is_equal, 2),
    (g_and, 1),
    (g_or, 1),
])
def test_binary_costs(gadget, cost):
    cs, _ = binary(gadget)
    assert stats(cs).nonlinear_constraints == cost
    assert stats(cs).linear_constraints == 0


def test_is_zero():
    cs, out = unary(g_is_zero)
    assert run(cs, out, x=0) == 1
    w = synthesize_witness(cs, {"x": 7})
    hint = next(s.target for s in cs.witness_program if s.rule == INV_OR_ZERO)
    assert w[hint] == fe_inv(7)
    assert w[out] == 0
    assert check_satisfied(cs, w)


@pytest.mark.parametrize("a, b, expected", [
    (5, 5, 1),
    (0, 3, 0),
    (MODULUS - 1, encode_signed(-1), 1),
])
def test_is_equal(a, b, expected):
    cs, out = binary(g_is_equal)
    assert run(cs, out, a=a, b=int(b)) == expected


@pytest.mark.parametrize("gadget, table", [
    (g_and, {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 1}),
    (g_or, {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 1}),
])
def test_boolean_truth_tables(gadget, table):
    cs, out = binary(gadget)
    for (a, b), expected in table.items():
        assert run(cs, out, a=a, b=b) == expected


def test_not():
    cs, out = unary(g_not)
    assert run(cs, out, x=0) == 1
    assert run(cs, out, x=1) == 0


def test_is_equal_output_is_boolean_for_arbitrary_field_inputs():
    cs, out = binary(g_is_equal)
    rng = random.Random(7)
    for _ in range(300):
        a = rng.randrange(MODULUS)
        b = a if rng.random() < 0.3 else rng.randrange(MODULUS)
        assert run(cs, out, a=a, b=b) == (1 if a == b else 0)


def _small_field_eval(terms, assignment, p):
    return sum(decode_signed(c, 8) * assignment[s] for s, c in terms.items()) % p


@pytest.mark.parametrize("p", [7, 11, 13])
def test_is_zero_constraints_force_the_output(p):
    # The two constraints only involve x, the hint and t = x*hint (out = 1 - t).
    cs, out = unary(g_is_zero)
    signals = sorted({s for k in cs.constraints for lc in k for s in lc} - {0})
    x = 1
    assert len(signals) == 3
    t_terms = next(s.operands for s in cs.witness_program if s.target == out)
    for values in itertools.product(range(p), repeat=len(signals)):
        assignment = dict(zip(signals, values))
        assignment[0] = 1
        ok = all(
            _small_field_eval(k.a, assignment, p) * _small_field_eval(k.b, assignment, p) % p
            == _small_field_eval(k.c, assignment, p)
            for k in cs.constraints
        )
        if ok:
            out_value = _small_field_eval(t_terms, assignment, p)
            assert out_value == (1 if assignment[x] == 0 else 0)


def test_is_zero_rejects_a_wrong_output():
    cs, out = unary(g_is_zero)
    t = next(iter(cs.witness_program[-1].operands.keys() - {0}))
    for x in (0, 1, 5, MODULUS - 1):
        w = synthesize_witness(cs, {"x": x})
        w.values[t] = 1 - w.values[t]
        w.values[out] = 1 - w.values[out]
        assert not check_satisfied(cs, w)
