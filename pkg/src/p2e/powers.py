"""Integer powers of series in ``s = sin^2(psi)`` whose coefficients are BiPolys.

A base series is a list ``a`` with ``a[n]`` the BiPoly multiplying ``s**n``.
Two independent constructions of ``(sum_n a[n] s**n) ** i`` are provided:

* ``potential_powers``: the recurrence for ordinary potential polynomials,
  ``b[n] = 1/(n a0) * sum_{k=1..n} (k i - n + k) a[k] b[n-k]``. Every base
  series used here is divisible by ``varrho * e2`` with a unit cofactor in
  ``a[0]``, so the division is carried out on the normalized series.
* ``bell_powers``: the multinomial expansion over compositions of ``n``, where
  each factor ``a[m] ** i_m`` is expanded in ``varrho`` with partial ordinary
  Bell polynomials. No division is needed, which makes it the fallback.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterator, Sequence

from .bipoly import BiPoly
from .errors import DomainError


def _padded(a: Sequence[BiPoly], nmax: int) -> list[BiPoly]:
    out = list(a[: nmax + 1])
    out += [BiPoly.zero()] * (nmax + 1 - len(out))
    return out


def _power_trunc(p: BiPoly, i: int, kmax: int, lmax: int) -> BiPoly:
    out = BiPoly.one().truncate(kmax, lmax)
    base = p.truncate(kmax, lmax)
    while i:
        if i & 1:
            out = out.mul_trunc(base, kmax, lmax)
        i >>= 1
        if i:
            base = base.mul_trunc(base, kmax, lmax)
    return out


def normalizable(a: Sequence[BiPoly]) -> bool:
    """True when every ``a[n]`` is divisible by ``varrho*e2`` and ``a[0]/(varrho*e2)`` is a unit."""
    if not a or a[0].is_zero():
        return False
    for p in a:
        for k, l in p:
            if k < 1 or l < 1:
                return False
    return a[0].coeff(1, 1) != 0


def potential_powers(a: Sequence[BiPoly], i: int, nmax: int, kmax: int, lmax: int) -> list[BiPoly]:
    """Coefficients ``b[0..nmax]`` of the ``i``-th power, truncated to ``k <= kmax, l <= lmax``."""
    if i < 1:
        raise DomainError("power must be >= 1")
    a = _padded(a, nmax)
    if not normalizable(a):
        raise DomainError("base series is not divisible by varrho*e2 with a unit cofactor")
    kt, lt = kmax - i, lmax - i
    if kt < 0 or lt < 0:
        return [BiPoly.zero() for _ in range(nmax + 1)]
    at = [p.shift(-1, -1).truncate(kt, lt) for p in a]
    inv0 = at[0].inverse_trunc(kt, lt)
    b = [_power_trunc(at[0], i, kt, lt)]
    for n in range(1, nmax + 1):
        acc = BiPoly.zero()
        for k in range(1, n + 1):
            w = k * i - n + k
            if w and not at[k].is_zero():
                acc = acc + at[k].mul_trunc(b[n - k], kt, lt).scale(w)
        b.append(acc.mul_trunc(inv0, kt, lt).scale(Fraction(1, n)))
    return [p.shift(i, i) for p in b]


def partial_bell_table(x: Sequence[BiPoly], kmax: int, imax: int, lmax: int) -> list[list[BiPoly]]:
    """Partial ordinary Bell polynomials ``B[i][k]`` for ``i <= imax``, ``k <= kmax``.

    ``x[j]`` (``j >= 1``) is the coefficient of ``varrho**j`` in a series
    with zero constant term; ``x[0]`` is ignored. ``B[i][k]`` is then the
    coefficient of ``varrho**k`` in the ``i``-th power of that series.
    """
    zero = BiPoly.zero()
    table = [[BiPoly.one() if k == 0 else zero for k in range(kmax + 1)]]
    for i in range(1, imax + 1):
        row = [zero] * (kmax + 1)
        prev = table[-1]
        for k in range(i, kmax + 1):
            acc = zero
            for j in range(1, k - i + 2):
                if j < len(x) and not x[j].is_zero() and not prev[k - j].is_zero():
                    acc = acc + x[j].mul_trunc(prev[k - j], 0, lmax)
            row[k] = acc
        table.append(row)
    return table


def _split_by_rho(p: BiPoly) -> list[BiPoly]:
    """Coefficients of ``varrho**k`` as BiPolys in ``e2`` alone."""
    kmax = p.max_degrees()[0]
    out = [dict() for _ in range(max(kmax, 0) + 1)]
    for (k, l), c in p.items():
        out[k][(0, l)] = c
    return [BiPoly(t) for t in out]


def compositions(n: int, i: int) -> Iterator[tuple[int, ...]]:
    """Tuples ``(i_0, ..., i_n)`` with ``sum i_m = i`` and ``sum m*i_m = n``."""

    def rec(m: int, left_n: int, left_i: int):
        if m == 0:
            if left_n == 0:
                yield (left_i,)
            return
        for im in range(min(left_n // m, left_i) + 1):
            for rest in rec(m - 1, left_n - m * im, left_i - im):
                yield rest + (im,)

    if n == 0:
        yield (i,)
        return
    yield from rec(n, n, i)


def bell_powers(a: Sequence[BiPoly], i: int, nmax: int, kmax: int, lmax: int) -> list[BiPoly]:
    """Same contract as :func:`potential_powers`, via compositions and Bell polynomials."""
    if i < 1:
        raise DomainError("power must be >= 1")
    a = _padded(a, nmax)
    for p in a:
        for k, _ in p:
            if k < 1:
                raise DomainError("Bell expansion needs base coefficients without a varrho**0 term")
    # factor_powers[m][j] = a[m] ** j, for j <= i
    factor_powers: list[list[BiPoly]] = []
    for m in range(nmax + 1):
        x = _split_by_rho(a[m].truncate(kmax, lmax)) if not a[m].is_zero() else []
        bell = partial_bell_table(x, kmax, i, lmax)
        powers = []
        for j in range(i + 1):
            acc = {}
            for k in range(kmax + 1):
                for (_, l), c in bell[j][k].items():
                    acc[(k, l)] = c
            powers.append(BiPoly(acc))
        factor_powers.append(powers)
    out = []
    ifact = factorial(i)
    for n in range(nmax + 1):
        acc = BiPoly.zero()
        for comp in compositions(n, i):
            coef = ifact
            for im in comp:
                coef //= factorial(im)
            term = BiPoly.one()
            for m, im in enumerate(comp):
                if im:
                    term = term.mul_trunc(factor_powers[m][im], kmax, lmax)
                    if term.is_zero():
                        break
            if not term.is_zero():
                acc = acc + term.scale(coef)
        out.append(acc)
    return out


def series_power(a: Sequence[BiPoly], i: int, nmax: int, kmax: int, lmax: int, method: str = "auto") -> list[BiPoly]:
    """``i``-th power of a base series by the chosen construction.

    ``auto`` uses the potential-polynomial recurrence when the base series
    admits exact division and the Bell expansion otherwise.
    """
    if method == "auto":
        method = "recurrence" if normalizable(_padded(a, nmax)) else "bell"
    if method == "recurrence":
        return potential_powers(a, i, nmax, kmax, lmax)
    if method == "bell":
        return bell_powers(a, i, nmax, kmax, lmax)
    raise DomainError(f"unknown power method {method!r}")
