"""Floating-point evaluation of the truncated series for phi, h, sin(phi), cos(phi).

All series are evaluated for the point folded into the first quadrant and the
signs are restored afterwards, which makes phi odd and h even in ``v``
exactly.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .coeffgen import DEFAULT_BOUNDS, gen_tensor
from .errors import ConfigurationError, DomainError
from .tensor import FORMS, QUANTITIES, CoeffTensor, read_cache

GUARD_THRESHOLD = 0.5
CONSISTENCY_TOL = 1e-12
CONVERGENCE_TOL = 1e-12


@dataclass(frozen=True)
class EllipseParams:
    """Axis-aligned, origin-centred ellipse with semi-major axis ``a``."""

    a: float
    e2: float

    def __post_init__(self):
        if not self.a > 0 or not math.isfinite(self.a):
            raise DomainError(f"semi-major axis must be positive, got {self.a}")
        if not 0 <= self.e2 < 1:
            raise DomainError(f"eccentricity squared must lie in [0, 1), got {self.e2}")

    @property
    def b(self) -> float:
        return self.a * math.sqrt(1.0 - self.e2)

    @classmethod
    def from_axes(cls, a: float, b: float) -> "EllipseParams":
        if not 0 < b <= a:
            raise DomainError("need 0 < b <= a")
        return cls(a, 1.0 - (b / a) ** 2)


@dataclass(frozen=True)
class QueryPoint:
    u: float
    v: float

    @classmethod
    def from_polar(cls, psi: float, rho: float) -> "QueryPoint":
        return cls(rho * math.cos(psi), rho * math.sin(psi))

    @property
    def rho(self) -> float:
        return math.hypot(self.u, self.v)

    @property
    def psi(self) -> float:
        return math.atan2(self.v, self.u)


@dataclass(frozen=True)
class Truncation:
    """Orders kept in the outer (``n``), ``varrho`` (``k``) and ``e2`` (``l``) sums."""

    N: int
    K: int
    L: int

    def __post_init__(self):
        if self.N < 0 or self.K < 1 or self.L < 1:
            raise DomainError(f"invalid truncation {self}")

    @classmethod
    def of(cls, value) -> "Truncation":
        if isinstance(value, Truncation):
            return value
        return cls(*value)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.N, self.K, self.L)


DEFAULT_TRUNCATION = Truncation(*DEFAULT_BOUNDS)


@dataclass(frozen=True)
class PolarPoint:
    psi: float
    rho: float
    varrho: float
    s: float
    # first-quadrant copy used by every series
    psi_folded: float
    sin_folded: float
    cos_folded: float
    sign_u: float
    sign_v: float

    def __iter__(self):
        return iter((self.psi, self.rho, self.varrho, self.s))


@dataclass(frozen=True)
class EvalResult:
    phi: float
    h: float
    sin_phi: float
    cos_phi: float
    guard_ratio: float
    converged_hint: bool


def to_polar(u: float, v: float, a: float) -> PolarPoint:
    """Polar coordinates of ``(u, v)`` plus ``varrho = a/rho`` and ``s = sin^2 psi``."""
    rho = math.hypot(u, v)
    if rho == 0:
        raise DomainError("the origin has no polar angle")
    sin_f = abs(v) / rho
    cos_f = abs(u) / rho
    return PolarPoint(
        psi=math.atan2(v, u),
        rho=rho,
        varrho=a / rho,
        s=sin_f * sin_f,
        psi_folded=math.atan2(abs(v), abs(u)),
        sin_folded=sin_f,
        cos_folded=cos_f,
        sign_u=math.copysign(1.0, u),
        sign_v=math.copysign(1.0, v),
    )


def guard_ratio(pp: PolarPoint, e2: float) -> float:
    """``a e2 / |u|``, the small parameter of the reversion step."""
    if pp.cos_folded == 0:
        return math.inf if e2 > 0 else 0.0
    return pp.varrho * e2 / pp.cos_folded


def _check_trunc(t: CoeffTensor, tr: Truncation) -> None:
    n, k, l = t.bounds
    if tr.N > n or tr.K > k or tr.L > l:
        raise ConfigurationError(f"truncation {tr.as_tuple()} exceeds tensor bounds {t.bounds}")


def eval_sinpow(t: CoeffTensor, s, varrho, e2, tr=None):
    """Nested Horner evaluation of a sin-power series (``e2``, then ``varrho``, then ``s``)."""
    if t.form != "sinpow":
        raise DomainError("eval_sinpow needs a sin-power tensor")
    tr = Truncation.of(tr or t.bounds)
    _check_trunc(t, tr)
    out = kernels.sinpow(t.dense, s, varrho, e2, tr.N, tr.K, tr.L)
    return float(out) if out.ndim == 0 else out


def eval_fourier(t: CoeffTensor, psi, varrho, e2, tr=None):
    """Multiple-angle sum; ``sin(2 n psi)`` for phi, ``cos(2 n psi)`` otherwise."""
    if t.form != "fourier":
        raise DomainError("eval_fourier needs a Fourier tensor")
    tr = Truncation.of(tr or t.bounds)
    _check_trunc(t, tr)
    out = kernels.fourier(t.dense, psi, varrho, e2, tr.N, tr.K, tr.L, t.quantity == "phi")
    return float(out) if out.ndim == 0 else out


class SeriesSet:
    """The eight coefficient tensors needed for evaluation, keyed by (quantity, form)."""

    def __init__(self, tensors: dict[tuple[str, str], CoeffTensor]):
        self.tensors = dict(tensors)

    def __getitem__(self, key: tuple[str, str]) -> CoeffTensor:
        try:
            return self.tensors[key]
        except KeyError:
            raise ConfigurationError(f"no {key[0]}/{key[1]} coefficients loaded") from None

    @property
    def bounds(self) -> tuple[int, int, int]:
        return tuple(min(t.bounds[i] for t in self.tensors.values()) for i in range(3))

    @classmethod
    def generate(cls, bounds=DEFAULT_BOUNDS) -> "SeriesSet":
        bounds = tuple(bounds)
        return cls({(q, f): gen_tensor(q, f, bounds) for q in QUANTITIES for f in FORMS})

    @classmethod
    def from_cache_dir(cls, path: str | os.PathLike) -> "SeriesSet":
        tensors = {}
        for q in QUANTITIES:
            for f in FORMS:
                fname = os.path.join(path, f"{q}_{f}.p2e")
                if os.path.exists(fname):
                    tensors[(q, f)] = read_cache(fname)
        if not tensors:
            raise ConfigurationError(f"no cache files found in {path}")
        return cls(tensors)


@lru_cache(maxsize=8)
def default_series(bounds: tuple[int, int, int] = DEFAULT_BOUNDS) -> SeriesSet:
    return SeriesSet.generate(bounds)


def _resolve(series: SeriesSet | None, tr: Truncation) -> SeriesSet:
    if series is not None:
        return series
    b = DEFAULT_BOUNDS
    return default_series(tuple(max(x, y) for x, y in zip(b, tr.as_tuple())))


def _phi_offset(pp: PolarPoint, e2: float, tr: Truncation, form: str, series: SeriesSet) -> float:
    """``phi - psi`` for the folded point."""
    if form == "sinpow":
        series_val = eval_sinpow(series["phi", "sinpow"], pp.s, pp.varrho, e2, tr)
        return pp.cos_folded * pp.sin_folded * series_val
    if form == "fourier":
        return eval_fourier(series["phi", "fourier"], pp.psi_folded, pp.varrho, e2, tr)
    raise DomainError(f"unknown form {form!r}")


def _as_point(pt) -> QueryPoint:
    return pt if isinstance(pt, QueryPoint) else QueryPoint(*pt)


def eval_phi(pt, ell: EllipseParams, tr=DEFAULT_TRUNCATION, form: str = "sinpow", series: SeriesSet | None = None) -> float:
    """Normal angle of the ellipse through the query point."""
    pt, tr = _as_point(pt), Truncation.of(tr)
    pp = to_polar(pt.u, pt.v, ell.a)
    delta = _phi_offset(pp, ell.e2, tr, form, _resolve(series, tr))
    # mirroring in either axis flips the sign of phi - psi
    return pp.psi + pp.sign_u * pp.sign_v * delta


def eval_h(pt, ell: EllipseParams, tr=DEFAULT_TRUNCATION, form: str = "sinpow", series: SeriesSet | None = None) -> float:
    """Signed distance from the ellipse along its normal (negative inside)."""
    pt, tr = _as_point(pt), Truncation.of(tr)
    pp = to_polar(pt.u, pt.v, ell.a)
    series = _resolve(series, tr)
    if form == "sinpow":
        total = eval_sinpow(series["h", "sinpow"], pp.s, pp.varrho, ell.e2, tr)
    elif form == "fourier":
        total = eval_fourier(series["h", "fourier"], pp.psi_folded, pp.varrho, ell.e2, tr)
    else:
        raise DomainError(f"unknown form {form!r}")
    return ell.a * total + pp.rho - ell.a


def _split_sums(delta: float, order: int) -> tuple[float, float]:
    """Even and odd Taylor parts of cos/sin at ``delta`` up to ``delta**order``."""
    d2 = delta * delta
    even_top = order - order % 2
    odd_top = order - 1 + order % 2
    even = 0.0
    for i in range(even_top, -1, -2):
        even = even * d2 + (-1) ** (i // 2) / math.factorial(i)
    odd = 0.0
    for i in range(odd_top, 0, -2):
        odd = odd * d2 + (-1) ** ((i - 1) // 2) / math.factorial(i)
    return even, odd * delta


def _restore(pp: PolarPoint, sin_f: float, cos_f: float) -> tuple[float, float]:
    return pp.sign_v * sin_f, pp.sign_u * cos_f


def eval_sincos_joint(pt, ell: EllipseParams, tr=DEFAULT_TRUNCATION, series: SeriesSet | None = None) -> tuple[float, float]:
    """``(sin phi, cos phi)`` from one ``phi - psi`` value and its even/odd Taylor parts.

    ``(phi - psi)**i`` starts at ``varrho**i``, so terms beyond ``i = K`` fall
    outside the truncation and are dropped.
    """
    pt, tr = _as_point(pt), Truncation.of(tr)
    pp = to_polar(pt.u, pt.v, ell.a)
    delta = _phi_offset(pp, ell.e2, tr, "sinpow", _resolve(series, tr))
    even, odd = _split_sums(delta, tr.K)
    sin_f = pp.sin_folded * even + pp.cos_folded * odd
    cos_f = pp.cos_folded * even - pp.sin_folded * odd
    return _restore(pp, sin_f, cos_f)


def eval_sincos(pt, ell: EllipseParams, tr=DEFAULT_TRUNCATION, form: str = "sinpow", series: SeriesSet | None = None) -> tuple[float, float]:
    """``(sin phi, cos phi)`` from the ratio series ``sin(phi)/sin(psi) - 1`` and ``cos(phi)/cos(psi) - 1``."""
    pt, tr = _as_point(pt), Truncation.of(tr)
    pp = to_polar(pt.u, pt.v, ell.a)
    series = _resolve(series, tr)
    if form == "sinpow":
        rs = eval_sinpow(series["sin", "sinpow"], pp.s, pp.varrho, ell.e2, tr)
        rc = eval_sinpow(series["cos", "sinpow"], pp.s, pp.varrho, ell.e2, tr)
    elif form == "fourier":
        rs = eval_fourier(series["sin", "fourier"], pp.psi_folded, pp.varrho, ell.e2, tr)
        rc = eval_fourier(series["cos", "fourier"], pp.psi_folded, pp.varrho, ell.e2, tr)
    else:
        raise DomainError(f"unknown form {form!r}")
    return _restore(pp, pp.sin_folded * (1.0 + rs), pp.cos_folded * (1.0 + rc))


def convergence_diag(partial_sums: Sequence[float], tol: float = CONVERGENCE_TOL) -> tuple[float, bool]:
    """Tail-ratio estimate from the last two increments of a partial-sum sequence."""
    if len(partial_sums) < 3:
        raise DomainError("need at least three partial sums")
    last = abs(partial_sums[-1] - partial_sums[-2])
    prev = abs(partial_sums[-2] - partial_sums[-3])
    if last == 0:
        ratio = 0.0
    elif prev == 0:
        ratio = math.inf
    else:
        ratio = last / prev
    return ratio, bool(ratio < 1 and last <= tol)


def phi_partial_sums(pt, ell: EllipseParams, tr=DEFAULT_TRUNCATION, series: SeriesSet | None = None) -> np.ndarray:
    """Partial sums over ``n`` of the folded ``phi`` in sin-power form.

    Summing onto ``psi`` means increments below the rounding level of
    ``phi`` itself register as zero.
    """
    pt, tr = _as_point(pt), Truncation.of(tr)
    pp = to_polar(pt.u, pt.v, ell.a)
    t = _resolve(series, tr)["phi", "sinpow"]
    _check_trunc(t, tr)
    inner = kernels.inner_terms(t.dense, pp.varrho, ell.e2, tr.N, tr.K, tr.L)
    terms = inner * pp.s ** np.arange(tr.N + 1)
    return pp.psi_folded + pp.cos_folded * pp.sin_folded * np.cumsum(terms)


def evaluate(
    pt,
    ell: EllipseParams,
    tr=DEFAULT_TRUNCATION,
    form: str = "sinpow",
    series: SeriesSet | None = None,
    guard_threshold: float = GUARD_THRESHOLD,
    consistency_tol: float = CONSISTENCY_TOL,
) -> EvalResult:
    """Evaluate phi, h, sin(phi) and cos(phi) together with convergence diagnostics.

    The result is always returned; ``converged_hint`` is False when the guard
    ratio exceeds ``guard_threshold``, the ``n``-increments of the phi series
    have not died out, or ``sin^2 + cos^2`` drifts from 1.
    """
    pt, tr = _as_point(pt), Truncation.of(tr)
    series = _resolve(series, tr)
    pp = to_polar(pt.u, pt.v, ell.a)
    phi = eval_phi(pt, ell, tr, form, series)
    h = eval_h(pt, ell, tr, form, series)
    if form == "sinpow":
        sin_phi, cos_phi = eval_sincos_joint(pt, ell, tr, series)
    else:
        sin_phi, cos_phi = eval_sincos(pt, ell, tr, form, series)
    guard = guard_ratio(pp, ell.e2)
    hint = guard <= guard_threshold
    if hint and tr.N >= 2:
        _, hint = convergence_diag(phi_partial_sums(pt, ell, tr, series))
    if abs(sin_phi * sin_phi + cos_phi * cos_phi - 1.0) > consistency_tol:
        hint = False
    return EvalResult(phi, h, sin_phi, cos_phi, guard, hint)
