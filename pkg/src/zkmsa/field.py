"""Arithmetic modulo the BN254 scalar-field prime.

Circuit signals live in this field. Negative integers are carried as
their additive inverse, so -1 is ``MODULUS - 1``.
"""

from __future__ import annotations

MODULUS = 21888242871839275222246405745257275088548364400416034343698204186575808495617


class FieldError(ValueError):
    pass


class FieldElement(int):
    """An integer reduced modulo :data:`MODULUS`.

    Subclasses ``int`` so elements compare and hash like their canonical
    representative and can be dropped into any integer context.
    """

    __slots__ = ()

    def __new__(cls, value: int = 0) -> FieldElement:
        return super().__new__(cls, int(value) % MODULUS)

    def __add__(self, other: int) -> FieldElement:
        return FieldElement(int(self) + int(other))

    __radd__ = __add__

    def __sub__(self, other: int) -> FieldElement:
        return FieldElement(int(self) - int(other))

    def __rsub__(self, other: int) -> FieldElement:
        return FieldElement(int(other) - int(self))

    def __mul__(self, other: int) -> FieldElement:
        return FieldElement(int(self) * int(other))

    __rmul__ = __mul__

    def __neg__(self) -> FieldElement:
        return FieldElement(-int(self))

    def __truediv__(self, other: int) -> FieldElement:
        return self * fe_inv(other)

    def __pow__(self, exponent: int) -> FieldElement:
        return FieldElement(pow(int(self), exponent, MODULUS))

    def __repr__(self) -> str:
        return f"FieldElement({int(self)})"

    def __str__(self) -> str:
        return str(int(self))


def fe_add(a: int, b: int) -> FieldElement:
    return FieldElement(int(a) + int(b))


def fe_mul(a: int, b: int) -> FieldElement:
    return FieldElement(int(a) * int(b))


def fe_neg(a: int) -> FieldElement:
    return FieldElement(-int(a))


def fe_inv(a: int) -> FieldElement:
    """Multiplicative inverse. Raises :class:`FieldError` for zero."""
    a = int(a) % MODULUS
    if a == 0:
        raise FieldError("zero has no multiplicative inverse")
    return FieldElement(pow(a, -1, MODULUS))


def encode_signed(s: int) -> FieldElement:
    if 2 * abs(s) >= MODULUS:
        raise FieldError(f"signed value {s} out of range")
    return FieldElement(s)


def decode_signed(a: int, bound: int) -> int:
    """Interpret ``a`` as a signed integer with ``|s| <= bound``."""
    if bound < 0 or 2 * bound >= MODULUS:
        raise FieldError(f"bound {bound} out of range")
    a = int(a)
    if not 0 <= a < MODULUS:
        raise FieldError(f"{a} is not a reduced field element")
    if a <= bound:
        return a
    if a >= MODULUS - bound:
        return a - MODULUS
    raise FieldError(f"field element {a} lies outside the signed window +/-{bound}")


def to_decimal(a: int) -> str:
    return str(int(a) % MODULUS)


def from_decimal(text: str) -> FieldElement:
    if not isinstance(text, str) or not text.isdigit() or (len(text) > 1 and text[0] == "0"):
        raise FieldError(f"not a canonical decimal field element: {text!r}")
    value = int(text)
    if value >= MODULUS:
        raise FieldError(f"{text} is not reduced modulo the field prime")
    return FieldElement(value)
