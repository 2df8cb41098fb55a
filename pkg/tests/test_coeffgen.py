from fractions import Fraction as F

import pytest

from p2e.coeffgen import (
    CONVERSION_PARAMS,
    CoefficientGenerator,
    gen_c_phi,
    gen_d_cos,
    gen_d_cosdiff,
    gen_d_h,
    gen_d_N,
    gen_d_phi,
    gen_d_sin,
    gen_phi_diff_powers,
    gen_sin_ratio_powers,
    gen_tensor,
    sinpow_to_fourier,
)
from p2e.errors import ConfigurationError, DomainError
from series_oracle import sinpow_series


@pytest.fixture(scope="module")
def expansion():
    return sinpow_series(7)


class TestClosedForms:
    @pytest.mark.parametrize(
        "idx, want", [((0, 1, 1), 1), ((1, 2, 2), -2), ((1, 2, 3), 2), ((2, 3, 4), F(-77, 4))]
    )
    def test_d_phi(self, idx, want):
        assert gen_d_phi(*idx) == want

    @pytest.mark.parametrize("idx, want", [((1, 1, 1), F(1, 2)), ((1, 2, 2), 0), ((2, 1, 2), F(-1, 16))])
    def test_c_phi(self, idx, want):
        assert gen_c_phi(*idx) == want

    def test_c_phi_leading_terms(self):
        assert (gen_c_phi(1, 1, 1), gen_c_phi(1, 1, 2), gen_c_phi(2, 2, 2)) == (F(1, 2), F(1, 8), F(1, 4))

    @pytest.mark.parametrize("idx", [(0, 0, 1), (0, 1, 2), (1, 1, 1), (-1, 1, 1)])
    def test_d_phi_domain(self, idx):
        with pytest.raises(DomainError):
            gen_d_phi(*idx)

    @pytest.mark.parametrize("idx", [(0, 1, 1), (1, 0, 1), (2, 3, 2)])
    def test_c_phi_domain(self, idx):
        with pytest.raises(DomainError):
            gen_c_phi(*idx)

    def test_d_phi_against_expansion(self, expansion):
        # exhaustive scan: every structural cell, zeros included
        for n in range(0, 7):
            for k in range(1, 8):
                for l in range(max(n + 1, k), min(n + k, 7) + 1):
                    assert gen_d_phi(n, k, l) == expansion["phi"].get((n, k, l), 0), (n, k, l)

    def test_expansion_has_no_terms_outside_structure(self, expansion):
        for n, k, l in expansion["phi"]:
            assert k >= 1 and max(n + 1, k) <= l <= n + k


class TestDerivedFamilies:
    @pytest.mark.parametrize("idx, want", [((0, 1, 1), 1), ((1, 1, 1), -1), ((1, 1, 2), F(1, 2)), ((1, 2, 2), F(-7, 2))])
    def test_d_sin(self, idx, want):
        assert gen_d_sin(*idx) == want

    @pytest.mark.parametrize("idx, want", [((1, 1, 1), -1), ((2, 2, 2), F(5, 2)), ((2, 2, 3), F(-5, 2)), ((1, 2, 2), F(-3, 2))])
    def test_d_cos(self, idx, want):
        assert gen_d_cos(*idx) == want

    def test_d_cosdiff_leading(self):
        # cos(x) ~ 1 - x^2/2 on the leading term varrho e2 of (phi - psi)
        assert gen_d_cosdiff(1, 2, 2) == F(-1, 2)

    def test_d_cosdiff_domain(self):
        with pytest.raises(DomainError):
            gen_d_cosdiff(1, 1, 1)
        with pytest.raises(DomainError):
            gen_d_cosdiff(1, 2, 3)  # l = n + k

    @pytest.mark.parametrize("idx, want", [((1, 0, 1), F(-1, 2)), ((1, 1, 2), -1)])
    def test_d_N(self, idx, want):
        assert gen_d_N(*idx) == want

    def test_d_N_domain(self):
        with pytest.raises(DomainError):
            gen_d_N(1, 1, 1)

    def test_d_h_from_parts(self):
        assert gen_d_h(1, 1, 2) == gen_d_cosdiff(1, 2, 2) - gen_d_N(1, 1, 2) == F(1, 2)

    @pytest.mark.parametrize("idx, want", [((1, 0, 1), F(1, 2)), ((2, 1, 2), F(-1, 2)), ((2, 1, 3), F(1, 2)), ((2, 0, 2), F(1, 8))])
    def test_d_h(self, idx, want):
        assert gen_d_h(*idx) == want

    @pytest.mark.parametrize("q", ["sin", "cos", "h"])
    def test_sinpow_against_expansion(self, expansion, q):
        t = gen_tensor(q, "sinpow", (7, 7, 7))
        for idx in t.indices():
            assert t[idx] == expansion[q].get(idx, 0), idx
        assert all(t.admits(*idx) for idx in expansion[q])


class TestPowerFamilies:
    def test_first_power_is_base(self):
        fam = gen_phi_diff_powers(1, (4, 4, 6))
        base = gen_tensor("phi", "sinpow", (4, 4, 6))
        assert dict(fam.entries) == dict(base.entries)

    def test_square_leading(self):
        assert gen_phi_diff_powers(2, (2, 3, 4)).get(0, 2, 2) == 1

    def test_k_below_power_vanishes(self):
        fam = gen_phi_diff_powers(3, (4, 4, 6))
        assert all(k >= 3 for _, k, _ in fam.entries)

    def test_sin_ratio_first_power(self):
        fam = gen_sin_ratio_powers(1, (3, 3, 4))
        assert dict(fam.entries) == dict(gen_tensor("sin", "sinpow", (3, 3, 4)).entries)

    def test_sin_ratio_square(self):
        fam = gen_sin_ratio_powers(2, (2, 3, 4))
        assert fam.get(0, 2, 2) == 1
        assert all(k >= 2 for _, k, _ in fam.entries)

    @pytest.mark.parametrize("fn", [gen_phi_diff_powers, gen_sin_ratio_powers])
    def test_power_domain(self, fn):
        with pytest.raises(DomainError):
            fn(0, (2, 2, 2))

    def test_methods_agree(self):
        a = CoefficientGenerator((4, 4, 5), method="recurrence")
        b = CoefficientGenerator((4, 4, 5), method="bell")
        for q in ("h", "sin", "cos"):
            assert a.sinpow_tensor(q) == b.sinpow_tensor(q)


class TestConversion:
    def test_examples(self):
        sin_f = gen_tensor("sin", "fourier", (1, 1, 1))
        cos_f = gen_tensor("cos", "fourier", (1, 1, 1))
        h_f = gen_tensor("h", "fourier", (1, 1, 1))
        assert sin_f[0, 1, 1] == F(1, 2)
        assert cos_f[0, 1, 1] == F(-1, 2)
        assert h_f[0, 0, 1] == F(1, 4) and h_f[1, 0, 1] == F(-1, 4)

    @pytest.mark.parametrize("q", ["h", "sin", "cos"])
    def test_conversion_matches_tensor(self, q):
        bounds = (5, 5, 6)
        src = gen_tensor(q, "sinpow", (6, 5, 6))
        assert sinpow_to_fourier(src, *CONVERSION_PARAMS[q], bounds) == gen_tensor(q, "fourier", bounds)

    def test_source_must_cover(self):
        src = gen_tensor("sin", "sinpow", (2, 2, 2))
        with pytest.raises(ConfigurationError):
            sinpow_to_fourier(src, 0, 0, 0, (2, 2, 4))

    def test_source_must_be_sinpow(self):
        with pytest.raises(DomainError):
            sinpow_to_fourier(gen_tensor("sin", "fourier", (2, 2, 2)), 0, 0, 0, (2, 2, 2))


class TestTensors:
    def test_phi_sinpow_subtable(self):
        t = gen_tensor("phi", "sinpow", (2, 2, 4))
        assert t[0, 1, 1] == 1 and t[1, 2, 2] == -2 and t[1, 2, 3] == 2
        assert all(n <= 2 and k <= 2 for n, k, _ in t.entries)

    def test_h_single_cell(self):
        t = gen_tensor("h", "sinpow", (1, 0, 1))
        assert dict(t.entries) == {(1, 0, 1): F(1, 2)}

    def test_cos_sinpow_n0_empty(self):
        assert len(gen_tensor("cos", "sinpow", (0, 4, 4))) == 0

    def test_generator_capacity(self):
        g = CoefficientGenerator((2, 2, 3))
        assert g.capacity == (3, 2, 3)
        with pytest.raises(ConfigurationError):
            g.sinpow_tensor("sin", (4, 2, 3))

    def test_negative_bounds(self):
        with pytest.raises(DomainError):
            gen_tensor("phi", "sinpow", (-1, 1, 1))

    def test_threaded_fill_is_consistent(self):
        from concurrent.futures import ThreadPoolExecutor

        g = CoefficientGenerator((4, 4, 5))
        with ThreadPoolExecutor(4) as pool:
            outs = list(pool.map(lambda q: g.sinpow_tensor(q), ["h", "sin", "cos", "h", "sin", "cos"]))
        assert outs[0] == outs[3] and outs[1] == outs[4] and outs[2] == outs[5]
        assert outs[0] == gen_tensor("h", "sinpow", (4, 4, 5))
