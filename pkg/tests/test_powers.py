from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from p2e.bipoly import BiPoly
from p2e.coeffgen import gen_tensor
from p2e.errors import DomainError
from p2e.powers import (
    bell_powers,
    compositions,
    normalizable,
    partial_bell_table,
    potential_powers,
    series_power,
)


def brute_power(rows, i, nmax, kmax, lmax):
    """Repeated truncated multiplication of ``sum_n rows[n] s**n``."""
    acc = [BiPoly.one()] + [BiPoly.zero()] * nmax
    for _ in range(i):
        nxt = [BiPoly.zero()] * (nmax + 1)
        for n1, p in enumerate(acc):
            for n2, q in enumerate(rows[: nmax + 1 - n1]):
                nxt[n1 + n2] = nxt[n1 + n2] + p.mul_trunc(q, kmax, lmax)
        acc = nxt
    return acc


def rows_of(quantity, bounds):
    t = gen_tensor(quantity, "sinpow", bounds)
    rows = [dict() for _ in range(bounds[0] + 1)]
    for (n, k, l), c in t.entries.items():
        rows[n][(k, l)] = c
    return [BiPoly(r) for r in rows]


@pytest.fixture(scope="module")
def phi_rows():
    return rows_of("phi", (4, 4, 6))


@pytest.fixture(scope="module")
def sin_rows():
    return rows_of("sin", (4, 4, 6))


class TestCompositions:
    def test_small(self):
        assert sorted(compositions(2, 2)) == [(0, 2, 0), (1, 0, 1)]

    def test_zero_order(self):
        assert list(compositions(0, 3)) == [(3,)]

    @given(st.integers(0, 7), st.integers(1, 5))
    def test_constraints(self, n, i):
        seen = set()
        for c in compositions(n, i):
            assert sum(c) == i
            assert sum(m * im for m, im in enumerate(c)) == n
            assert c not in seen
            seen.add(c)


class TestBell:
    def test_matches_powers(self):
        # x(varrho) = 2 varrho + 3 varrho^2 e2
        x = [BiPoly.zero(), BiPoly.monomial(0, 0, 2), BiPoly.monomial(0, 1, 3)]
        table = partial_bell_table(x, 5, 3, 4)
        series = BiPoly.monomial(1, 0, 2) + BiPoly.monomial(2, 1, 3)
        for i in range(4):
            power = BiPoly.one()
            for _ in range(i):
                power = power.mul_trunc(series, 5, 4)
            for k in range(6):
                want = BiPoly({(0, l): c for (kk, l), c in power.items() if kk == k})
                assert table[i][k] == want


class TestPotentialPowers:
    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    @pytest.mark.parametrize("method", ["recurrence", "bell"])
    def test_phi_against_brute_force(self, phi_rows, i, method):
        got = series_power(phi_rows, i, 4, 4, 6, method)
        assert got == brute_power(phi_rows, i, 4, 4, 6)

    @pytest.mark.parametrize("i", [2, 3])
    def test_sin_against_brute_force(self, sin_rows, i):
        want = brute_power(sin_rows, i, 4, 4, 6)
        assert potential_powers(sin_rows, i, 4, 4, 6) == want
        assert bell_powers(sin_rows, i, 4, 4, 6) == want

    def test_normalizable(self, phi_rows):
        assert normalizable(phi_rows)
        assert not normalizable([BiPoly.one()])
        assert not normalizable([BiPoly.zero()])

    def test_auto_falls_back_to_bell(self):
        rows = [BiPoly.monomial(1, 0, 1), BiPoly.monomial(1, 1, 2)]
        assert series_power(rows, 2, 2, 3, 3) == brute_power(rows, 2, 2, 3, 3)
        with pytest.raises(DomainError):
            potential_powers(rows, 2, 2, 3, 3)

    def test_bad_power_and_method(self, phi_rows):
        with pytest.raises(DomainError):
            potential_powers(phi_rows, 0, 2, 2, 2)
        with pytest.raises(DomainError):
            series_power(phi_rows, 2, 2, 2, 2, method="magic")

    def test_power_beyond_truncation_is_zero(self, phi_rows):
        assert all(p.is_zero() for p in potential_powers(phi_rows, 5, 4, 4, 6))

    @settings(max_examples=25, deadline=None)
    @given(
        st.lists(
            st.dictionaries(
                st.tuples(st.integers(1, 3), st.integers(1, 3)),
                st.fractions(min_value=-5, max_value=5, max_denominator=5),
                max_size=3,
            ),
            min_size=1,
            max_size=3,
        ),
        st.fractions(min_value=Fraction(1, 5), max_value=5, max_denominator=5),
        st.integers(2, 3),
    )
    def test_random_bases(self, extra, lead, i):
        rows = [BiPoly(r) for r in extra]
        rows[0] = rows[0] + BiPoly.monomial(1, 1, lead) - BiPoly.monomial(1, 1, rows[0].coeff(1, 1))
        want = brute_power(rows, i, 3, 5, 5)
        assert potential_powers(rows, i, 3, 5, 5) == want
        assert bell_powers(rows, i, 3, 5, 5) == want
