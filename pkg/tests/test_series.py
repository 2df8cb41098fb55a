import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import grid_points
from p2e.errors import ConfigurationError, DomainError
from p2e.oracle import solve_phi
from p2e.series import (
    EllipseParams,
    QueryPoint,
    SeriesSet,
    Truncation,
    convergence_diag,
    eval_fourier,
    eval_h,
    eval_phi,
    eval_sincos,
    eval_sincos_joint,
    eval_sinpow,
    evaluate,
    phi_partial_sums,
    to_polar,
)
from p2e.tensor import CoeffTensor, write_cache
from p2e.coeffgen import gen_tensor

coords = st.floats(-50, 50, allow_nan=False).filter(lambda x: abs(x) > 1e-3)


class TestGeometry:
    def test_to_polar_345(self):
        pp = to_polar(3.0, 4.0, 1.0)
        assert pp.rho == 5 and pp.varrho == pytest.approx(0.2)
        assert pp.psi == math.atan2(4, 3) and pp.s == pytest.approx(16 / 25)

    def test_major_axis(self):
        pp = to_polar(1.0, 0.0, 1.0)
        assert pp.psi == 0 and pp.s == 0

    def test_minor_axis(self):
        pp = to_polar(0.0, 2.0, 1.0)
        assert pp.psi == pytest.approx(math.pi / 2) and pp.s == 1

    def test_origin(self):
        with pytest.raises(DomainError):
            to_polar(0.0, 0.0, 1.0)

    @pytest.mark.parametrize("a, e2", [(0, 0.1), (-1, 0.1), (1, 1.0), (1, -0.1), (float("inf"), 0)])
    def test_bad_ellipse(self, a, e2):
        with pytest.raises(DomainError):
            EllipseParams(a, e2)

    def test_b_and_from_axes(self):
        ell = EllipseParams.from_axes(2.0, 1.0)
        assert ell.e2 == pytest.approx(0.75) and ell.b == pytest.approx(1.0)

    def test_query_point_polar(self):
        pt = QueryPoint.from_polar(0.3, 2.0)
        assert pt.rho == pytest.approx(2.0) and pt.psi == pytest.approx(0.3)

    @pytest.mark.parametrize("tr", [(-1, 1, 1), (1, 0, 1), (1, 1, 0)])
    def test_bad_truncation(self, tr):
        with pytest.raises(DomainError):
            Truncation(*tr)


class TestKernelsOnTensors:
    def test_e2_zero_gives_zero(self, series):
        for q in ("phi", "h", "sin", "cos"):
            assert eval_sinpow(series[q, "sinpow"], 0.4, 0.7, 0.0) == 0
            assert eval_fourier(series[q, "fourier"], 0.4, 0.7, 0.0) == 0

    def test_h_on_major_axis_ray(self, series):
        assert eval_sinpow(series["h", "sinpow"], 0.0, 0.7, 0.05) == 0

    def test_single_cell_sinpow(self):
        t = CoeffTensor("phi", "sinpow", {(0, 1, 1): Fraction(1)}, (0, 1, 1))
        assert eval_sinpow(t, 0.3, 0.7, 0.05) == pytest.approx(0.7 * 0.05, rel=1e-15)

    def test_single_cell_fourier(self):
        t = CoeffTensor("phi", "fourier", {(1, 1, 1): Fraction(1, 2)}, (1, 1, 1))
        psi = 0.4
        assert eval_fourier(t, psi, 0.7, 0.05) == pytest.approx(0.7 * 0.05 / 2 * math.sin(2 * psi), rel=1e-14)
        assert eval_fourier(t, 0.0, 0.7, 0.05) == 0

    def test_truncation_beyond_bounds(self, series):
        with pytest.raises(ConfigurationError):
            eval_sinpow(series["phi", "sinpow"], 0.3, 0.5, 0.01, Truncation(9, 8, 9))

    def test_form_checks(self, series):
        with pytest.raises(DomainError):
            eval_sinpow(series["phi", "fourier"], 0.3, 0.5, 0.01)
        with pytest.raises(DomainError):
            eval_fourier(series["phi", "sinpow"], 0.3, 0.5, 0.01)

    def test_vectorized(self, series):
        t = series["h", "sinpow"]
        s = np.linspace(0, 1, 7)
        out = eval_sinpow(t, s, 0.5, 0.01)
        assert out.shape == (7,)
        assert out[3] == eval_sinpow(t, s[3], 0.5, 0.01)


class TestIdentities:
    @settings(max_examples=60)
    @given(coords, coords, st.sampled_from(["sinpow", "fourier"]))
    def test_circle(self, u, v, form):
        ell = EllipseParams(1.3, 0.0)
        pt = QueryPoint(u, v)
        assert eval_phi(pt, ell, form=form) == math.atan2(v, u)
        assert eval_h(pt, ell, form=form) == math.hypot(u, v) - 1.3

    def test_345(self):
        assert eval_h((3.0, 4.0), EllipseParams(1.0, 0.0)) == 4

    @pytest.mark.parametrize("form", ["sinpow", "fourier"])
    def test_equator(self, form):
        ell = EllipseParams(1.0, 0.05)
        assert eval_phi((1.5, 0.0), ell, form=form) == 0
        assert eval_h((1.5, 0.0), ell, form=form) == pytest.approx(0.5, abs=1e-15)

    @settings(max_examples=60)
    @given(st.floats(0.05, 3.0), st.floats(0.05, 3.0), st.sampled_from(["sinpow", "fourier"]))
    def test_symmetry(self, u, v, form):
        ell = EllipseParams(1.0, 0.01)
        phi = eval_phi((u, v), ell, form=form)
        assert eval_phi((u, -v), ell, form=form) == -phi
        assert eval_phi((-u, v), ell, form=form) == pytest.approx(math.pi - phi, abs=2 * math.ulp(math.pi))
        assert eval_h((u, -v), ell, form=form) == eval_h((u, v), ell, form=form)
        assert eval_h((-u, -v), ell, form=form) == eval_h((u, v), ell, form=form)
        s, c = eval_sincos_joint((u, v), ell)
        assert eval_sincos_joint((u, -v), ell) == (-s, c)
        assert eval_sincos_joint((-u, v), ell) == (s, -c)


class TestAgainstOracle:
    def test_diagonal_point_high_e2(self):
        ell = EllipseParams(1.0, 0.1)
        o = solve_phi((0.9, 0.9), ell)
        # guard ratio 0.11; the series residual at this e2 is near 1e-10
        assert abs(eval_phi((0.9, 0.9), ell) - o.phi_star) < 1e-9
        assert abs(eval_h((0.9, 0.9), ell) - o.h_star) < 1e-9

    def test_forms_agree_within_residuals(self, series):
        for e2, _, _, pt in grid_points():
            ell = EllipseParams(1.0, e2)
            o = solve_phi(pt, ell)
            for fn, truth in ((eval_phi, o.phi_star), (eval_h, o.h_star)):
                f = fn(pt, ell, form="fourier", series=series)
                s = fn(pt, ell, form="sinpow", series=series)
                slack = 10 * max(abs(f - truth), abs(s - truth), 1e-16)
                assert abs(f - s) <= slack

    def test_wgs84_surface_point(self, wgs84):
        lat = math.radians(40.0)
        n = wgs84.a / math.sqrt(1 - wgs84.e2 * math.sin(lat) ** 2)
        pt = (n * math.cos(lat), n * (1 - wgs84.e2) * math.sin(lat))
        res = evaluate(pt, wgs84)
        assert res.phi == pytest.approx(lat, abs=1e-15)
        assert abs(res.h) < 1e-8
        assert res.converged_hint

    def test_sincos_forms(self, series):
        ell = EllipseParams(1.0, 0.01)
        pt = QueryPoint.from_polar(0.7, 1.4)
        truth = solve_phi(pt, ell).phi_star
        for form in ("sinpow", "fourier"):
            s, c = eval_sincos(pt, ell, form=form, series=series)
            assert s == pytest.approx(math.sin(truth), abs=1e-13)
            assert c == pytest.approx(math.cos(truth), abs=1e-13)
        with pytest.raises(DomainError):
            eval_sincos(pt, ell, form="taylor")


class TestDiagnostics:
    def test_constant_sequence(self):
        assert convergence_diag([1.0, 1.0, 1.0]) == (0.0, True)

    def test_doubling_increments(self):
        ratio, ok = convergence_diag([0.0, 1.0, 3.0])
        assert ratio == 2 and not ok

    def test_shrinking(self):
        ratio, ok = convergence_diag([1.0, 1.0 + 1e-10, 1.0 + 1e-10 + 1e-13])
        assert ratio == pytest.approx(1e-3, rel=1e-2) and ok

    def test_jump_from_zero(self):
        assert convergence_diag([1.0, 1.0, 2.0]) == (math.inf, False)

    def test_needs_three(self):
        with pytest.raises(DomainError):
            convergence_diag([1.0, 2.0])

    def test_wgs84_increments_shrink(self, wgs84):
        ps = phi_partial_sums((4.5e6, 4.4e6), wgs84)
        inc = np.abs(np.diff(ps))
        big = inc[inc > 1e-15]
        assert np.all(big[1:] < big[:-1])

    def test_guard_flags(self):
        ell = EllipseParams(1.0, 0.1)
        res = evaluate((0.0, 2.0), ell)
        assert res.guard_ratio == math.inf and not res.converged_hint
        res = evaluate((0.01, 1.0), ell)
        assert res.guard_ratio > 0.5 and not res.converged_hint

    def test_pythagorean_when_converged(self):
        ell = EllipseParams(1.0, 0.001)
        res = evaluate((1.2, 0.8), ell)
        assert res.converged_hint
        assert abs(res.sin_phi**2 + res.cos_phi**2 - 1) <= 1e-12

    def test_fourier_evaluate(self):
        res = evaluate((1.2, 0.8), EllipseParams(1.0, 0.001), form="fourier")
        assert res.converged_hint


class TestSeriesSet:
    def test_cache_dir(self, tmp_path):
        for q in ("phi", "h"):
            write_cache(gen_tensor(q, "sinpow", (3, 3, 4)), tmp_path / f"{q}_sinpow.p2e")
        ss = SeriesSet.from_cache_dir(tmp_path)
        assert ss.bounds == (3, 3, 4)
        ell = EllipseParams(1.0, 0.001)
        assert eval_phi((1.2, 0.8), ell, Truncation(3, 3, 4), series=ss) == pytest.approx(
            eval_phi((1.2, 0.8), ell), abs=1e-12
        )
        with pytest.raises(ConfigurationError):
            ss["sin", "fourier"]

    def test_empty_cache_dir(self, tmp_path):
        with pytest.raises(ConfigurationError):
            SeriesSet.from_cache_dir(tmp_path)
