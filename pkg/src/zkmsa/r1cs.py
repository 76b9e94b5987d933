"""Rank-1 constraint systems with an embedded witness program.

A constraint ``(a, b, c)`` holds under a witness ``w`` when
``<a, w> * <b, w> == <c, w>`` modulo the field prime. Signal 0 is the
constant one.

Signals defined by a linear witness step are never constrained directly.
The builder substitutes their defining combination wherever they are
referenced, the same way an R1CS optimizer eliminates linear constraints.
Only genuinely quadratic relations reach the constraint list.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from zkmsa.field import MODULUS, FieldError, from_decimal

ONE = 0

PUBLIC_INPUT = "public_input"
PRIVATE_INPUT = "private_input"
INTERNAL = "internal"
_VISIBILITIES = (PUBLIC_INPUT, PRIVATE_INPUT, INTERNAL)

LINEAR = "linear"
PRODUCT = "product"
INV_OR_ZERO = "inv_or_zero"


class CircuitError(ValueError):
    pass


class WitnessError(CircuitError):
    pass


class LinearCombination:
    """Sparse map from signal index to a nonzero field coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[int, int] = {}
        for signal, coeff in items:
            merged[signal] = (merged.get(signal, 0) + coeff) % MODULUS
        self.terms = {s: c for s, c in merged.items() if c}

    @classmethod
    def constant(cls, value: int) -> LinearCombination:
        return cls({ONE: value})

    @classmethod
    def of(cls, signal: int, coeff: int = 1) -> LinearCombination:
        return cls({signal: coeff})

    def is_constant(self) -> bool:
        return all(s == ONE for s in self.terms)

    def signals(self):
        return self.terms.keys()

    def evaluate(self, values) -> int:
        return sum(c * values[s] for s, c in self.terms.items()) % MODULUS

    def __add__(self, other: LinearCombination | int) -> LinearCombination:
        other = as_lc(other)
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, 0) + c
        return LinearCombination(out)

    def __neg__(self) -> LinearCombination:
        return LinearCombination({s: -c for s, c in self.terms.items()})

    def __sub__(self, other: LinearCombination | int) -> LinearCombination:
        return self + (-as_lc(other))

    def __mul__(self, k: int) -> LinearCombination:
        return LinearCombination({s: c * k for s, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LinearCombination) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"LinearCombination({self.terms})"


LCLike = Union[int, LinearCombination]


def as_lc(x: LCLike) -> LinearCombination:
    """A bare ``int`` is a signal index, not a constant."""
    if isinstance(x, LinearCombination):
        return x
    return LinearCombination.of(x)


class WitnessStep(NamedTuple):
    target: int
    rule: str
    # LINEAR: dict term map; PRODUCT: (x, y); INV_OR_ZERO: (x,)
    operands: object


class Constraint(NamedTuple):
    a: dict
    b: dict
    c: dict

    def is_nonlinear(self) -> bool:
        return _has_variable(self.a) and _has_variable(self.b)


def _has_variable(terms: dict) -> bool:
    return any(s != ONE for s in terms)


def _eval(terms: dict, values) -> int:
    return sum(c * values[s] for s, c in terms.items()) % MODULUS


@dataclass(frozen=True)
class CircuitStats:
    nonlinear_constraints: int
    linear_constraints: int
    wires: int
    public_inputs: int
    private_inputs: int
    outputs: int

    @property
    def constraints(self) -> int:
        return self.nonlinear_constraints + self.linear_constraints


@dataclass
class ConstraintSystem:
    num_signals: int
    constraints: list[Constraint]
    public_inputs: list[int]
    private_inputs: list[int]
    outputs: list[int]
    input_layout: dict[str, int]
    witness_program: list[WitnessStep]
    eliminated: frozenset[int] = frozenset()
    labels: dict[str, int] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def lc_out(terms: dict) -> list:
            return [[str(c), s] for s, c in sorted(terms.items())]

        program = []
        for step in self.witness_program:
            if step.rule == LINEAR:
                ops = lc_out(step.operands)
            else:
                ops = list(step.operands)
            program.append([step.rule, step.target, ops])
        return {
            "num_signals": self.num_signals,
            "constraints": [{"a": lc_out(k.a), "b": lc_out(k.b), "c": lc_out(k.c)} for k in self.constraints],
            "public_inputs": list(self.public_inputs),
            "private_inputs": list(self.private_inputs),
            "outputs": list(self.outputs),
            "input_layout": dict(self.input_layout),
            "witness_program": program,
            "eliminated": sorted(self.eliminated),
            "labels": dict(self.labels),
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, doc: dict) -> ConstraintSystem:
        try:
            def lc_in(pairs: list) -> dict:
                return {int(s): int(from_decimal(c)) for c, s in pairs}

            constraints = [Constraint(lc_in(k["a"]), lc_in(k["b"]), lc_in(k["c"])) for k in doc["constraints"]]
            program = []
            for rule, target, ops in doc["witness_program"]:
                if rule == LINEAR:
                    program.append(WitnessStep(int(target), rule, lc_in(ops)))
                elif rule in (PRODUCT, INV_OR_ZERO):
                    program.append(WitnessStep(int(target), rule, tuple(int(x) for x in ops)))
                else:
                    raise CircuitError(f"unknown witness rule {rule!r}")
            return cls(
                num_signals=int(doc["num_signals"]),
                constraints=constraints,
                public_inputs=[int(s) for s in doc["public_inputs"]],
                private_inputs=[int(s) for s in doc.get("private_inputs", [])],
                outputs=[int(s) for s in doc["outputs"]],
                input_layout={str(k): int(v) for k, v in doc["input_layout"].items()},
                witness_program=program,
                eliminated=frozenset(int(s) for s in doc.get("eliminated", [])),
                labels={str(k): int(v) for k, v in doc.get("labels", {}).items()},
                meta=dict(doc.get("meta", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CircuitError):
                raise
            raise CircuitError(f"malformed constraint system: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> ConstraintSystem:
        return cls.from_json_dict(json.loads(text))


class ConstraintSystemBuilder:
    def __init__(self):
        self.num_signals = 1
        self.constraints: list[Constraint] = []
        self.public_inputs: list[int] = []
        self.private_inputs: list[int] = []
        self.outputs: list[int] = []
        self.input_layout: dict[str, int] = {}
        self.witness_program: list[WitnessStep] = []
        self.labels: dict[str, int] = {}
        self._linear: dict[int, dict] = {}
        self._assigned = bytearray([1])
        self._finalized = False

    def _check_open(self) -> None:
        if self._finalized:
            raise CircuitError("builder already finalized")

    def _check_known(self, signal: int) -> None:
        if not isinstance(signal, int) or not 0 <= signal < self.num_signals:
            raise CircuitError(f"unknown signal {signal!r}")

    def alloc_signal(self, visibility: str = INTERNAL, name: str | None = None) -> int:
        self._check_open()
        if visibility not in _VISIBILITIES:
            raise CircuitError(f"unknown visibility {visibility!r}")
        sid = self.num_signals
        self.num_signals += 1
        is_input = visibility != INTERNAL
        self._assigned.append(1 if is_input else 0)
        if visibility == PUBLIC_INPUT:
            self.public_inputs.append(sid)
        elif visibility == PRIVATE_INPUT:
            self.private_inputs.append(sid)
        if name is not None:
            if not is_input:
                raise CircuitError("only inputs take a layout name")
            if name in self.input_layout:
                raise CircuitError(f"duplicate input name {name!r}")
            self.input_layout[name] = sid
        return sid

    def expand(self, x: LCLike) -> dict:
        """Term map of ``x`` with linearly defined signals substituted."""
        lc = as_lc(x)
        out: dict[int, int] = {}
        for s, c in lc.terms.items():
            self._check_known(s)
            sub = self._linear.get(s)
            if sub is None:
                out[s] = out.get(s, 0) + c
            else:
                for t, d in sub.items():
                    out[t] = out.get(t, 0) + c * d
        return {s: c % MODULUS for s, c in out.items() if c % MODULUS}

    def enforce(self, a: LCLike, b: LCLike, c: LCLike) -> Constraint:
        self._check_open()
        k = Constraint(self.expand(a), self.expand(b), self.expand(c))
        self.constraints.append(k)
        return k

    def push_witness_step(self, step: WitnessStep) -> None:
        self._check_open()
        self._check_known(step.target)
        if self._assigned[step.target]:
            raise CircuitError(f"signal {step.target} is already assigned")
        if step.rule == LINEAR:
            if isinstance(step.operands, LinearCombination):
                step = step._replace(operands=dict(step.operands.terms))
            refs = list(step.operands)
        elif step.rule == PRODUCT:
            refs = list(step.operands)
            if len(refs) != 2:
                raise CircuitError("product step takes two operands")
        elif step.rule == INV_OR_ZERO:
            refs = list(step.operands)
            if len(refs) != 1:
                raise CircuitError("inv_or_zero step takes one operand")
        else:
            raise CircuitError(f"unknown witness rule {step.rule!r}")
        for s in refs:
            self._check_known(s)
            if not self._assigned[s]:
                raise CircuitError(f"witness step for {step.target} reads unassigned signal {s}")
        self._assigned[step.target] = 1
        self.witness_program.append(step)

    def define_linear(self, x: LCLike) -> int:
        """Fresh signal equal to ``x``; costs no constraint."""
        terms = self.expand(x)
        sid = self.alloc_signal()
        self.push_witness_step(WitnessStep(sid, LINEAR, terms))
        self._linear[sid] = terms
        return sid

    def product(self, x: int, y: int) -> int:
        """Fresh signal ``x * y`` with the constraint binding it."""
        sid = self.alloc_signal()
        self.push_witness_step(WitnessStep(sid, PRODUCT, (x, y)))
        self.enforce(x, y, sid)
        return sid

    def inv_or_zero(self, x: int) -> int:
        sid = self.alloc_signal()
        self.push_witness_step(WitnessStep(sid, INV_OR_ZERO, (x,)))
        return sid

    def linear_terms(self, signal: int) -> dict | None:
        return self._linear.get(signal)

    def mark_output(self, signal: int) -> None:
        self._check_open()
        self._check_known(signal)
        if signal == ONE:
            raise CircuitError("the constant signal cannot be an output")
        if signal in self._linear:
            raise CircuitError("an output must be a constrained signal")
        self.outputs.append(signal)

    def label(self, name: str, signal: int) -> None:
        self._check_known(signal)
        self.labels[name] = signal

    def finalize(self) -> ConstraintSystem:
        self._check_open()
        missing = [s for s in range(self.num_signals) if not self._assigned[s]]
        if missing:
            raise CircuitError(f"{len(missing)} signals have no witness step, first {missing[0]}")
        self._finalized = True
        return ConstraintSystem(
            num_signals=self.num_signals,
            constraints=self.constraints,
            public_inputs=self.public_inputs,
            private_inputs=self.private_inputs,
            outputs=self.outputs,
            input_layout=self.input_layout,
            witness_program=self.witness_program,
            eliminated=frozenset(self._linear),
            labels=self.labels,
        )


@dataclass
class Witness:
    values: list[int]

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, signal: int) -> int:
        return self.values[signal]

    def to_json(self) -> str:
        return json.dumps([str(v) for v in self.values])

    @classmethod
    def from_json(cls, text: str) -> Witness:
        try:
            raw = json.loads(text)
            values = [int(from_decimal(v)) for v in raw]
        except (TypeError, ValueError) as exc:
            raise WitnessError(f"malformed witness: {exc}") from exc
        if not values or values[0] != 1:
            raise WitnessError("witness must start with the constant 1")
        return cls(values)


def synthesize_witness(cs: ConstraintSystem, inputs: Mapping[str, int]) -> Witness:
    unknown = set(inputs) - set(cs.input_layout)
    if unknown:
        raise WitnessError(f"unknown input {sorted(unknown)[0]!r}")
    values: list = [None] * cs.num_signals
    values[ONE] = 1
    for name, sid in cs.input_layout.items():
        if name not in inputs:
            raise WitnessError(f"missing input {name!r}")
        v = inputs[name]
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < MODULUS:
            raise WitnessError(f"input {name!r} is not a field element: {v!r}")
        values[sid] = int(v)
    for target, rule, ops in cs.witness_program:
        if rule == PRODUCT:
            x, y = ops
            values[target] = values[x] * values[y] % MODULUS
        elif rule == LINEAR:
            values[target] = _eval(ops, values)
        else:
            x = values[ops[0]]
            values[target] = pow(x, -1, MODULUS) if x else 0
    return Witness(values)


def check_satisfied(cs: ConstraintSystem, w: Witness) -> bool:
    values = w.values
    if len(values) != cs.num_signals:
        raise WitnessError(f"witness has {len(values)} values, circuit has {cs.num_signals} signals")
    if values[ONE] != 1:
        return False
    for a, b, c in cs.constraints:
        if _eval(a, values) * _eval(b, values) % MODULUS != _eval(c, values):
            return False
    return True


def first_violation(cs: ConstraintSystem, w: Witness) -> int | None:
    """Index of the first failing constraint, or None."""
    values = w.values
    for i, (a, b, c) in enumerate(cs.constraints):
        if _eval(a, values) * _eval(b, values) % MODULUS != _eval(c, values):
            return i
    return None


def stats(cs: ConstraintSystem) -> CircuitStats:
    nonlinear = sum(1 for k in cs.constraints if k.is_nonlinear())
    return CircuitStats(
        nonlinear_constraints=nonlinear,
        linear_constraints=len(cs.constraints) - nonlinear,
        wires=cs.num_signals - len(cs.eliminated),
        public_inputs=len(cs.public_inputs),
        private_inputs=len(cs.private_inputs),
        outputs=len(cs.outputs),
    )


__all__ = [
    "ONE",
    "PUBLIC_INPUT",
    "PRIVATE_INPUT",
    "INTERNAL",
    "LINEAR",
    "PRODUCT",
    "INV_OR_ZERO",
    "CircuitError",
    "WitnessError",
    "FieldError",
    "LinearCombination",
    "as_lc",
    "WitnessStep",
    "Constraint",
    "CircuitStats",
    "ConstraintSystem",
    "ConstraintSystemBuilder",
    "Witness",
    "synthesize_witness",
    "check_satisfied",
    "first_violation",
    "stats",
]
