"""Sparse polynomials in two formal variables with exact rational coefficients.

The first exponent ``k`` belongs to the radius ratio ``varrho = a / rho`` and the
second exponent ``l`` to the squared eccentricity ``e2``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import DomainError

Exponent = tuple[int, int]


class BiPoly:
    """Immutable sparse polynomial ``sum c[k, l] * varrho**k * e2**l``.

    Terms with a zero coefficient are never stored, so two polynomials are
    equal exactly when their term maps are equal.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, object] | Iterable[tuple[Exponent, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, Fraction] = {}
        for (k, l), c in items:
            if k < 0 or l < 0:
                raise DomainError(f"negative exponent ({k}, {l})")
            acc[(k, l)] = acc.get((k, l), 0) + Fraction(c)
        self._terms = {e: c for e, c in acc.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Exponent, Fraction]) -> "BiPoly":
        # terms must already be free of zeros
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, k: int, l: int, c=1) -> "BiPoly":
        return cls({(k, l): c})

    @classmethod
    def one(cls) -> "BiPoly":
        return cls._raw({(0, 0): Fraction(1)})

    @classmethod
    def zero(cls) -> "BiPoly":
        return cls._raw({})

    # -- mapping-like access -------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return dict(self._terms)

    def coeff(self, k: int, l: int) -> Fraction:
        return self._terms.get((k, l), Fraction(0))

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator[Exponent]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def min_degrees(self) -> Exponent:
        if not self._terms:
            raise DomainError("zero polynomial has no degree")
        return min(k for k, _ in self._terms), min(l for _, l in self._terms)

    def max_degrees(self) -> Exponent:
        if not self._terms:
            return (-1, -1)
        return max(k for k, _ in self._terms), max(l for _, l in self._terms)

    # -- arithmetic -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, BiPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == BiPoly({(0, 0): other})._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other) -> "BiPoly":
        other = _coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return BiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "BiPoly":
        return BiPoly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "BiPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "BiPoly":
        return _coerce(other) - self

    def __mul__(self, other) -> "BiPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return bipoly_mul(self, other)

    __rmul__ = __mul__

    def scale(self, c) -> "BiPoly":
        c = Fraction(c)
        if not c:
            return BiPoly.zero()
        return BiPoly._raw({e: v * c for e, v in self._terms.items()})

    def shift(self, dk: int, dl: int) -> "BiPoly":
        """Multiply by ``varrho**dk * e2**dl`` (negative shifts must divide)."""
        out = {}
        for (k, l), c in self._terms.items():
            if k + dk < 0 or l + dl < 0:
                raise DomainError(f"monomial shift ({dk}, {dl}) does not divide term ({k}, {l})")
            out[(k + dk, l + dl)] = c
        return BiPoly._raw(out)

    def truncate(self, kmax: int, lmax: int) -> "BiPoly":
        return bipoly_truncate(self, kmax, lmax)

    def mul_trunc(self, other: "BiPoly", kmax: int, lmax: int) -> "BiPoly":
        """Product keeping only exponents ``k <= kmax`` and ``l <= lmax``.

        Exponent boxes are ideals of the monomial order, so the kept
        coefficients equal those of the untruncated product.
        """
        out: dict[Exponent, Fraction] = {}
        for (k1, l1), c1 in self._terms.items():
            if k1 > kmax or l1 > lmax:
                continue
            for (k2, l2), c2 in other._terms.items():
                k, l = k1 + k2, l1 + l2
                if k > kmax or l > lmax:
                    continue
                out[(k, l)] = out.get((k, l), 0) + c1 * c2
        return BiPoly._raw({e: c for e, c in out.items() if c})

    def inverse_trunc(self, kmax: int, lmax: int) -> "BiPoly":
        """Multiplicative inverse as a truncated power series.

        Requires a nonzero constant term.
        """
        c0 = self.coeff(0, 0)
        if not c0:
            raise DomainError("series without constant term has no inverse")
        # x = 1/c0 * (1 - t) with t = 1 - self/c0; sum the geometric series
        t = (BiPoly.one() - self.scale(1 / c0)).truncate(kmax, lmax)
        result = BiPoly.one()
        power = BiPoly.one()
        # each power of t raises the total degree by at least one
        for _ in range(kmax + lmax):
            power = power.mul_trunc(t, kmax, lmax)
            if power.is_zero():
                break
            result = result + power
        return result.scale(1 / c0)

    def evaluate(self, varrho: float, e2: float) -> float:
        return sum(float(c) * varrho**k * e2**l for (k, l), c in self._terms.items())

    def __repr__(self) -> str:
        if not self._terms:
            return "BiPoly(0)"
        parts = []
        for (k, l), c in sorted(self._terms.items()):
            parts.append(f"{c}*r^{k}*e2^{l}")
        return "BiPoly(" + " + ".join(parts) + ")"


def _coerce(x) -> BiPoly:
    if isinstance(x, BiPoly):
        return x
    return BiPoly({(0, 0): x})


def bipoly_mul(p: BiPoly, q: BiPoly) -> BiPoly:
    """Exact product: exponents add componentwise, zero terms are dropped."""
    out: dict[Exponent, Fraction] = {}
    for (k1, l1), c1 in p.items():
        for (k2, l2), c2 in q.items():
            e = (k1 + k2, l1 + l2)
            out[e] = out.get(e, 0) + c1 * c2
    return BiPoly._raw({e: c for e, c in out.items() if c})


def bipoly_truncate(p: BiPoly, kmax: int, lmax: int) -> BiPoly:
    """Drop every term with ``k > kmax`` or ``l > lmax``."""
    if kmax < 0 or lmax < 0:
        raise DomainError("truncation bounds must be non-negative")
    return BiPoly._raw({(k, l): c for (k, l), c in p.items() if k <= kmax and l <= lmax})
