import json

import pytest

from zkmsa.field import MODULUS
from zkmsa.gadgets import g_and, g_is_equal
from zkmsa.msa_circuit import MsaInstance, build_scoring_system, encode_instance
from zkmsa.oracle import sp_score, validate
from zkmsa.r1cs import (
    INV_OR_ZERO,
    LINEAR,
    PRIVATE_INPUT,
    PRODUCT,
    PUBLIC_INPUT,
    CircuitError,
    ConstraintSystem,
    ConstraintSystemBuilder,
    LinearCombination,
    Witness,
    WitnessError,
    WitnessStep,
    check_satisfied,
    first_violation,
    stats,
    synthesize_witness,
)


def test_linear_combination_merges_and_drops_zero_terms():
    lc = LinearCombination([(1, 2), (1, 3), (2, 5), (2, -5)])
    assert lc.terms == {1: 5}
    assert (LinearCombination.of(1) - LinearCombination.of(1)).terms == {}
    assert (LinearCombination.of(3) * -1).terms == {3: MODULUS - 1}
    assert LinearCombination.constant(4).is_constant()


def test_alloc_signal_sequencing():
    b = ConstraintSystemBuilder()
    x = b.alloc_signal(PUBLIC_INPUT, "x")
    y = b.alloc_signal(PRIVATE_INPUT, "y")
    assert x == 1 and y == 2
    assert b.public_inputs == [x]
    assert b.private_inputs == [y]


def test_alloc_after_finalize_rejected():
    b = ConstraintSystemBuilder()
    b.finalize()
    with pytest.raises(CircuitError):
        b.alloc_signal()


def test_enforce_classification():
    b = ConstraintSystemBuilder()
    x = b.alloc_signal(PRIVATE_INPUT, "x")
    y = b.alloc_signal(PRIVATE_INPUT, "y")
    k1 = b.enforce(LinearCombination.constant(3), LinearCombination.constant(2), LinearCombination.constant(6))
    k2 = b.enforce(x, y, LinearCombination.constant(6))
    k3 = b.enforce(LinearCombination.constant(3), x, y)
    assert not k1.is_nonlinear()
    assert k2.is_nonlinear()
    assert not k3.is_nonlinear()
    cs = b.finalize()
    st = stats(cs)
    assert (st.nonlinear_constraints, st.linear_constraints) == (1, 2)


def test_enforce_unknown_signal_rejected():
    b = ConstraintSystemBuilder()
    with pytest.raises(CircuitError):
        b.enforce(5, 0, 0)


def test_product_step_and_constraint():
    b = ConstraintSystemBuilder()
    x = b.alloc_signal(PRIVATE_INPUT, "x")
    y = b.alloc_signal(PRIVATE_INPUT, "y")
    z = b.product(x, y)
    sq = b.alloc_signal()
    b.push_witness_step(WitnessStep(sq, PRODUCT, (x, x)))
    cs = b.finalize()
    w = synthesize_witness(cs, {"x": 6, "y": 7})
    assert w[z] == 42 and w[sq] == 36
    assert check_satisfied(cs, w)
    w.values[z] = 41
    assert not check_satisfied(cs, w)


def test_linear_step():
    b = ConstraintSystemBuilder()
    x = b.alloc_signal(PRIVATE_INPUT, "x")
    y = b.alloc_signal()
    b.push_witness_step(WitnessStep(y, LINEAR, LinearCombination({x: 3, 0: 1})))
    cs = b.finalize()
    assert synthesize_witness(cs, {"x": 5})[y] == 16


def test_inv_or_zero_hint_on_zero_satisfies_is_zero():
    b = ConstraintSystemBuilder()
    x = b.alloc_signal(PRIVATE_INPUT, "x")
    out = g_is_equal(b, x, LinearCombination())
    cs = b.finalize()
    w = synthesize_witness(cs, {"x": 0})
    hint = next(s.target for s in cs.witness_program if s.rule == INV_OR_ZERO)
    assert w[hint] == 0
    assert w[out] == 1
    assert check_satisfied(cs, w)


def test_forward_reference_rejected():
    b = ConstraintSystemBuilder()
    t = b.alloc_signal()
    u = b.alloc_signal()
    with pytest.raises(CircuitError):
        b.push_witness_step(WitnessStep(t, PRODUCT, (u, u)))
    b.push_witness_step(WitnessStep(u, LINEAR, {0: 1}))
    with pytest.raises(CircuitError):
        b.push_witness_step(WitnessStep(u, LINEAR, {0: 2}))


def test_finalize_requires_every_signal_assigned():
    b = ConstraintSystemBuilder()
    b.alloc_signal()
    with pytest.raises(CircuitError):
        b.finalize()


def test_linear_signals_are_substituted_not_constrained():
    b = ConstraintSystemBuilder()
    x = b.alloc_signal(PRIVATE_INPUT, "x")
    y = b.alloc_signal(PRIVATE_INPUT, "y")
    s = b.define_linear(LinearCombination.of(x) + y)
    b.enforce(s, s, LinearCombination.constant(4))
    cs = b.finalize()
    assert len(cs.constraints) == 1
    assert cs.constraints[0].a == {x: 1, y: 1}
    assert s in cs.eliminated
    assert check_satisfied(cs, synthesize_witness(cs, {"x": 1, "y": 1}))


def test_empty_system():
    cs = ConstraintSystemBuilder().finalize()
    w = synthesize_witness(cs, {})
    assert w.values == [1]
    assert check_satisfied(cs, w)
    st = stats(cs)
    assert (st.nonlinear_constraints, st.linear_constraints, st.public_inputs, st.private_inputs, st.outputs) == (0,) * 5
    assert st.wires == 1


def test_synthesize_errors():
    b = ConstraintSystemBuilder()
    b.alloc_signal(PRIVATE_INPUT, "x")
    cs = b.finalize()
    with pytest.raises(WitnessError):
        synthesize_witness(cs, {})
    with pytest.raises(WitnessError):
        synthesize_witness(cs, {"x": MODULUS})
    with pytest.raises(WitnessError):
        synthesize_witness(cs, {"x": -1})
    with pytest.raises(WitnessError):
        synthesize_witness(cs, {"x": 1, "z": 2})


def test_check_satisfied_length_mismatch():
    cs = ConstraintSystemBuilder().finalize()
    with pytest.raises(WitnessError):
        check_satisfied(cs, Witness([1, 0]))


def test_scoring_system_standalone_has_nine_nonlinear_constraints():
    b = ConstraintSystemBuilder()
    x0 = b.alloc_signal(PRIVATE_INPUT, "x[0]")
    x1 = b.alloc_signal(PRIVATE_INPUT, "x[1]")
    build_scoring_system(b, x0, x1)
    st = stats(b.finalize())
    assert st.nonlinear_constraints == 9
    assert st.linear_constraints == 0


def _small_main(circuit):
    params, cs = circuit(2, 3, 4)
    inst = MsaInstance(["GA", "GTA"], ["G--A", "GT-A"], 0)
    inst.score = sp_score(inst.aln)
    assert validate(inst)
    return cs, synthesize_witness(cs, encode_instance(params, inst))


def test_main_witness_is_complete_and_deterministic(circuit):
    cs, w = _small_main(circuit)
    assert w[cs.labels["y"]] == 1
    assert check_satisfied(cs, w)
    params, _ = circuit(2, 3, 4)
    inst = MsaInstance(["GA", "GTA"], ["G--A", "GT-A"], sp_score(["G--A", "GT-A"]))
    assert synthesize_witness(cs, encode_instance(params, inst)).values == w.values


def test_main_score_off_by_one_gives_zero(circuit):
    params, cs = circuit(2, 3, 4)
    aln = ["G--A", "GT-A"]
    inst = MsaInstance(["GA", "GTA"], aln, sp_score(aln) + 1)
    assert not validate(inst)
    w = synthesize_witness(cs, encode_instance(params, inst))
    assert w[cs.labels["y"]] == 0
    assert check_satisfied(cs, w)


def _free_hints(cs, w):
    """Inverse hints whose operand is zero: the is_zero constraints leave them free."""
    return {s.target for s in cs.witness_program if s.rule == INV_OR_ZERO and w[s.operands[0]] == 0}


def test_mutating_any_constrained_signal_breaks_satisfaction(circuit):
    cs, w = _small_main(circuit)
    used = set()
    for k in cs.constraints:
        used.update(k.a, k.b, k.c)
    used.discard(0)
    free = _free_hints(cs, w)
    assert free
    for s in sorted(used):
        mutated = Witness(list(w.values))
        mutated.values[s] = (mutated.values[s] + 1) % MODULUS
        assert check_satisfied(cs, mutated) == (s in free), s


def test_first_violation_points_at_broken_constraint():
    b = ConstraintSystemBuilder()
    x = b.alloc_signal(PRIVATE_INPUT, "x")
    y = b.alloc_signal(PRIVATE_INPUT, "y")
    b.enforce(x, x, x)
    z = g_and(b, x, y)
    cs = b.finalize()
    w = synthesize_witness(cs, {"x": 1, "y": 1})
    assert first_violation(cs, w) is None
    w.values[z] = 0
    assert first_violation(cs, w) == 1


def test_json_round_trip(circuit):
    cs, w = _small_main(circuit)
    doc = json.loads(cs.to_json())
    assert set(doc) >= {"num_signals", "constraints", "public_inputs", "outputs", "input_layout"}
    coeff, signal = doc["constraints"][-1]["a"][0]
    assert isinstance(coeff, str) and isinstance(signal, int)
    back = ConstraintSystem.from_json(cs.to_json())
    assert back.to_json() == cs.to_json()
    assert stats(back) == stats(cs)
    w2 = Witness.from_json(w.to_json())
    assert w2.values == w.values
    assert check_satisfied(back, w2)
    assert all(isinstance(v, str) for v in json.loads(w.to_json()))


def test_malformed_json_rejected():
    with pytest.raises(CircuitError):
        ConstraintSystem.from_json('{"num_signals": 1}')
    with pytest.raises(WitnessError):
        Witness.from_json('["2"]')
