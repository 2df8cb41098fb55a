"""Exact rational helpers.

``Rational`` is :class:`fractions.Fraction`, which already keeps every value
reduced with a positive denominator and represents zero as ``0/1``.
"""

from __future__ import annotations

import operator
from fractions import Fraction
from math import factorial

from .errors import DomainError

Rational = Fraction

_OPS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact rationals")
    return Fraction(x)


def rat_arith(x, y, op: str) -> Fraction:
    """Apply ``op`` (one of add, sub, mul, div) to two rationals exactly."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise DomainError(f"unknown operation {op!r}") from None
    x, y = as_rational(x), as_rational(y)
    if op == "div" and y == 0:
        raise DomainError("division by zero")
    return fn(x, y)


def rising_factorial(x, n: int) -> Fraction:
    """Rising factorial x (x+1) ... (x+n-1); the empty product is 1."""
    if n < 0:
        raise DomainError("rising factorial needs n >= 0")
    x = as_rational(x)
    out = Fraction(1)
    for i in range(n):
        out *= x + i
    return out


def falling_factorial(x, n: int) -> Fraction:
    if n < 0:
        raise DomainError("falling factorial needs n >= 0")
    x = as_rational(x)
    out = Fraction(1)
    for i in range(n):
        out *= x - i
    return out


def gen_binom(x, k: int) -> Fraction:
    """Binomial coefficient with an arbitrary rational upper argument.

    Returns x (x-1) ... (x-k+1) / k!, which is 1 for ``k == 0``.
    """
    if k < 0:
        raise DomainError("binomial lower argument must be >= 0")
    return falling_factorial(x, k) / factorial(k)


def format_rational(x) -> str:
    """Serialize as ``p/q`` (``p`` alone when ``q == 1``)."""
    x = as_rational(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip().replace("−", "-")
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational literal: {text!r}") from None
    if q <= 0:
        raise ValueError(f"denominator must be positive: {text!r}")
    return Fraction(p, q)
