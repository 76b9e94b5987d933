"""Equality and boolean gadgets over :class:`ConstraintSystemBuilder`.

Non-linear constraint cost of each gadget:

    is_zero   2
    is_equal  2
    and       1
    or        1
    not       0

``and``/``or``/``not`` assume boolean inputs; callers only feed them
outputs of other gadgets.
"""

from __future__ import annotations

from zkmsa.r1cs import ONE, ConstraintSystemBuilder, LCLike, LinearCombination, as_lc


def g_is_zero(builder: ConstraintSystemBuilder, x: LCLike) -> int:
    """1 if ``x`` is zero, else 0.

    Hint ``inv`` is x^-1 (or 0); ``t = x * inv`` and ``out = 1 - t``, so the
    two constraints read ``x * inv = 1 - out`` and ``x * out = 0``.
    """
    if isinstance(x, LinearCombination):
        (s, c), = x.terms.items() if len(x.terms) == 1 else ((None, None),)
        x = s if c == 1 and s != ONE else builder.define_linear(x)
    inv = builder.inv_or_zero(x)
    t = builder.product(x, inv)
    out = builder.define_linear(LinearCombination.constant(1) - t)
    builder.enforce(x, out, LinearCombination())
    return out


def g_is_equal(builder: ConstraintSystemBuilder, a: LCLike, b: LCLike) -> int:
    return g_is_zero(builder, as_lc(a) - as_lc(b))


def g_and(builder: ConstraintSystemBuilder, a: int, b: int) -> int:
    return builder.product(a, b)


def g_or(builder: ConstraintSystemBuilder, a: int, b: int) -> int:
    ab = builder.product(a, b)
    return builder.define_linear(as_lc(a) + as_lc(b) - ab)


def g_not(builder: ConstraintSystemBuilder, a: int) -> int:
    return builder.define_linear(LinearCombination.constant(1) - as_lc(a))


def const(builder: ConstraintSystemBuilder, value: int) -> int:
    """Signal pinned to a constant, at no constraint cost."""
    return builder.define_linear(LinearCombination({ONE: value}))
