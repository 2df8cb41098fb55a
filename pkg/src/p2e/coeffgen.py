"""Exact generation of every coefficient family of the point-to-ellipse series.

Sin-power coefficients are produced bottom-up::

    d_phi --(powers)--> d_phi[i] --> d_sin, d_cos, d' (cos(phi-psi))
    d_sin --(powers)--> d_sin[j] --> d_N ((1 - e2 sin^2 phi)^(1/2))
    d' and d_N --> d_h

Fourier coefficients for ``phi`` come from their own closed form; those of
``h``, ``sin`` and ``cos`` come from the sin-power ones via power reduction.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .bipoly import BiPoly
from .errors import ConfigurationError, DomainError
from .powers import series_power
from .rational import gen_binom, rising_factorial
from .tensor import CoeffTensor, PowerCoeffFamily, check_kind, l_window, power_in_structure

Bounds = tuple[int, int, int]
DEFAULT_BOUNDS: Bounds = (8, 8, 9)

# (n_min, k_floor_shift, upper_shift) of each sin-power series, used when
# converting it to a cos(2 n psi) series
CONVERSION_PARAMS = {
    "h": (1, 1, 0),
    "sin": (0, 0, 0),
    "cos": (1, 0, -1),
}


def _binom(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


def _half_k_terms(k: int):
    """Shared outer loops of the two phi closed forms.

    Yields ``(r, m, p, q, weight)`` where ``weight`` collects the factors that
    do not depend on ``n``, ``l`` or ``t``.
    """
    half_k = Fraction(k, 2)
    for r in range(k):
        for m in range(k - r):
            bkm = _binom(k - 1, m + r)
            for p in range(m // 2 + 1):
                bmp = _binom(m + 1, 2 * p + 1)
                for q in range(r // 2 + 1):
                    w = rising_factorial(half_k, r - q) * bkm * bmp / (factorial(q) * factorial(r - 2 * q) * (m + 1 + r))
                    yield r, m, p, q, w


@lru_cache(maxsize=None)
def gen_d_phi(n: int, k: int, l: int) -> Fraction:
    """Sin-power coefficient of ``(phi - psi) / (cos psi sin psi)``."""
    if n < 0 or k < 1 or not max(n + 1, k) <= l <= n + k:
        raise DomainError(f"d_phi({n}, {k}, {l}) outside max(n+1,k) <= l <= n+k")
    half_k = Fraction(k, 2)
    sign = -1 if (n - l + k) % 2 else 1
    total = Fraction(0)
    for r, m, p, q, w in _half_k_terms(k):
        for t in range(min(l - k, r - q) + 1):
            s = l - k - t
            last = _binom(p, n - m - r + q - l + k + t + p)
            if not last:
                continue
            total += w * 2 ** (r - 2 * q) * _binom(r - q, t) * gen_binom(half_k + r - q + s - 1, s) * last
    return sign * total


def _angle_weight(n: int, p: int, w: int) -> int:
    """Net coefficient of sin(2 n psi) from cos^(2p+1) * sin^(2w+1) after product-to-sum."""
    total = 0
    for i in range(p + 1):
        b = _binom(2 * p + 1, i)
        j = w + p - i + 1 - n
        if 0 <= j <= w:
            total += (-1) ** j * b * _binom(2 * w + 1, j)
        j = w - p + i - n
        if 0 <= j <= w:
            total += (-1) ** j * b * _binom(2 * w + 1, j)
        j = w - p + i + n
        if 0 <= j <= w:
            total -= (-1) ** j * b * _binom(2 * w + 1, j)
    return total


@lru_cache(maxsize=None)
def gen_c_phi(n: int, k: int, l: int) -> Fraction:
    """Coefficient of ``varrho**k e2**l sin(2 n psi)`` in ``phi - psi``."""
    if n < 1 or k < 1 or l < max(n, k):
        raise DomainError(f"c_phi({n}, {k}, {l}) needs n >= 1, k >= 1, l >= max(n, k)")
    half_k = Fraction(k, 2)
    total = Fraction(0)
    for r, m, p, q, w in _half_k_terms(k):
        for t in range(min(l - k, r - q) + 1):
            s = l - k - t
            ang = _angle_weight(n, p, m + r - q + s - p)
            if not ang:
                continue
            total += (
                w
                * _binom(r - q, t)
                * gen_binom(half_k + r - q + s - 1, s)
                * ang
                / 2 ** (2 * (m + s) + r + 1)
            )
    return -total if (l - k) % 2 else total


def _reduction_weight(i: int, n: int) -> Fraction:
    """Weight of sin^(2i) in the cos(2 n psi) term of its power-reduction expansion."""
    delta = 1 if n == 0 else 0
    return Fraction(2 * (-1) ** n * _binom(2 * i, i - n), 2 ** (2 * i + delta))


def sinpow_to_fourier(
    src: CoeffTensor, n_min: int, k_floor_shift: int, upper_shift: int, bounds: Bounds
) -> CoeffTensor:
    """Re-expand a sin-power series in multiples ``cos(2 n psi)``.

    ``src`` must hold sin-power orders up to ``bounds[2]`` because every
    ``e2**l`` coefficient draws on orders ``i <= l``.
    """
    if src.form != "sinpow":
        raise DomainError("conversion source must be a sin-power tensor")
    nmax, kmax, lmax = bounds
    sn, sk, sl = src.bounds
    if sn < lmax or sk < kmax or sl < lmax:
        raise ConfigurationError(f"source bounds {src.bounds} do not cover conversion to {bounds}")
    k_start = 0 if src.quantity == "h" else 1
    entries = {}
    for n in range(nmax + 1):
        for k in range(k_start, kmax + 1):
            for l in range(max(n, n_min, k + k_floor_shift), lmax + 1):
                total = Fraction(0)
                for i in range(max(n, n_min, l - k - upper_shift), l + 1):
                    d = src.get(i, k, l)
                    if d:
                        total += d * _reduction_weight(i, n)
                if total:
                    entries[(n, k, l)] = total
    return CoeffTensor(src.quantity, "fourier", entries, bounds)


class CoefficientGenerator:
    """Memoized generator for all coefficient families up to fixed bounds.

    Power families of ``phi - psi`` are generated one order higher in ``k``
    than requested since the ``h`` series reads ``d'`` at ``k + 1``.
    Memo tables are filled under a lock, so one instance may be shared
    between threads.
    """

    def __init__(self, bounds: Bounds = DEFAULT_BOUNDS, method: str = "auto"):
        nmax, kmax, lmax = (int(b) for b in bounds)
        if min(nmax, kmax, lmax) < 0:
            raise DomainError("bounds must be non-negative")
        self.bounds = (nmax, kmax, lmax)
        # Fourier conversion reads sin-power orders up to l
        self.capacity = (max(nmax, lmax), kmax, lmax)
        self.method = method
        self._kphi = kmax + 1
        self._lock = threading.RLock()
        self._phi_base: list[BiPoly] | None = None
        self._sin_base: list[BiPoly] | None = None
        self._phi_pow: dict[int, list[BiPoly]] = {}
        self._sin_pow: dict[int, list[BiPoly]] = {}
        self._memo: dict[tuple, Fraction] = {}

    def covers(self, n: int, k: int, l: int) -> bool:
        return n <= self.capacity[0] and k <= self.capacity[1] and l <= self.capacity[2]

    def _require(self, n: int, k: int, l: int) -> None:
        if not self.covers(n, k, l):
            raise ConfigurationError(f"({n}, {k}, {l}) exceeds generator capacity {self.capacity}")

    # -- base series and their powers ----------------------------------------

    def _phi_series(self) -> list[BiPoly]:
        with self._lock:
            if self._phi_base is None:
                nmax, _, lmax = self.capacity
                rows = []
                for n in range(nmax + 1):
                    terms = {}
                    for k in range(1, self._kphi + 1):
                        for l in range(max(n + 1, k), min(n + k, lmax) + 1):
                            terms[(k, l)] = gen_d_phi(n, k, l)
                    rows.append(BiPoly(terms))
                self._phi_base = rows
            return self._phi_base

    def phi_diff_power(self, i: int) -> list[BiPoly]:
        """``b[n]`` of ``(phi - psi)^i = (cos psi sin psi)^i sum_n b[n] s^n``."""
        if i < 1:
            raise DomainError("power must be >= 1")
        with self._lock:
            if i not in self._phi_pow:
                nmax, _, lmax = self.capacity
                if i == 1:
                    self._phi_pow[1] = self._phi_series()
                else:
                    self._phi_pow[i] = series_power(self._phi_series(), i, nmax, self._kphi, lmax, self.method)
            return self._phi_pow[i]

    def d_phi_pow(self, n: int, k: int, l: int, i: int) -> Fraction:
        if n < 0 or n > self.capacity[0]:
            return Fraction(0)
        return self.phi_diff_power(i)[n].coeff(k, l)

    def _sin_series(self) -> list[BiPoly]:
        with self._lock:
            if self._sin_base is None:
                nmax, kmax, lmax = self.capacity
                rows = []
                for n in range(nmax + 1):
                    terms = {}
                    for k in range(1, kmax + 1):
                        for l in range(max(n, k), min(n + k, lmax) + 1):
                            terms[(k, l)] = self.d_sin(n, k, l)
                    rows.append(BiPoly(terms))
                self._sin_base = rows
            return self._sin_base

    def sin_ratio_power(self, j: int) -> list[BiPoly]:
        """Coefficients of ``(sin(phi)/sin(psi) - 1)^j`` in powers of ``s``."""
        if j < 1:
            raise DomainError("power must be >= 1")
        with self._lock:
            if j not in self._sin_pow:
                nmax, kmax, lmax = self.capacity
                if j == 1:
                    self._sin_pow[1] = self._sin_series()
                else:
                    self._sin_pow[j] = series_power(self._sin_series(), j, nmax, kmax, lmax, self.method)
            return self._sin_pow[j]

    def d_sin_pow(self, n: int, k: int, l: int, j: int) -> Fraction:
        if j == 0:
            # zeroth power is the constant series 1
            return Fraction(1) if (n, k, l) == (0, 0, 0) else Fraction(0)
        if n < 0 or n > self.capacity[0] or l < 0:
            return Fraction(0)
        return self.sin_ratio_power(j)[n].coeff(k, l)

    # -- derived sin-power coefficients ----------------------------------------

    def _memoized(self, key, fn):
        try:
            return self._memo[key]
        except KeyError:
            pass
        with self._lock:
            if key not in self._memo:
                self._memo[key] = fn()
            return self._memo[key]

    def d_sin(self, n: int, k: int, l: int) -> Fraction:
        if n < 0 or k < 1 or not max(n, k) <= l <= n + k:
            raise DomainError(f"d_sin({n}, {k}, {l}) outside max(n,k) <= l <= n+k")
        self._require(n, k, l)

        def compute():
            total = Fraction(0)
            for i in range(1, min(k, 2 * n + 1) + 1):
                hi, lo = -(-i // 2), i // 2
                for j in range(max(0, hi - l + n), min(hi, n - lo) + 1):
                    d = self.d_phi_pow(n - lo - j, k, l, i)
                    if d:
                        total += _binom(hi, j) * Fraction((-1) ** (lo + j), factorial(i)) * d
            return total

        return self._memoized(("sin", n, k, l), compute)

    def d_cos(self, n: int, k: int, l: int) -> Fraction:
        if n < 1 or k < 1 or not max(n, k) <= l <= n + k - 1:
            raise DomainError(f"d_cos({n}, {k}, {l}) outside max(n,k) <= l <= n+k-1")
        self._require(n, k, l)

        def compute():
            total = Fraction(0)
            for i in range(1, min(k, 2 * n + 1) + 1):
                hi, lo = -(-i // 2), i // 2
                for j in range(max(0, lo - l + n), min(lo, n - hi) + 1):
                    d = self.d_phi_pow(n - hi - j, k, l, i)
                    if d:
                        total += _binom(lo, j) * Fraction((-1) ** (hi + j), factorial(i)) * d
            return total

        return self._memoized(("cos", n, k, l), compute)

    def d_cosdiff(self, n: int, k: int, l: int) -> Fraction:
        """Sin-power coefficient of ``cos(phi - psi) - 1``."""
        if n < 1 or k < 2 or not max(n, k) <= l <= n - 1 + k:
            raise DomainError(f"d'({n}, {k}, {l}) outside n >= 1, k >= 2, max(n,k) <= l <= n-1+k")
        if n > self.capacity[0] or k > self._kphi or l > self.capacity[2]:
            raise ConfigurationError(f"({n}, {k}, {l}) exceeds generator capacity {self.capacity}")

        def compute():
            total = Fraction(0)
            for i in range(1, min(n, k // 2) + 1):
                for j in range(min(i, n - i) + 1):
                    d = self.d_phi_pow(n - i - j, k, l, 2 * i)
                    if d:
                        total += Fraction((-1) ** (i + j), factorial(2 * i)) * _binom(i, j) * d
            return total

        return self._memoized(("cosdiff", n, k, l), compute)

    def d_N(self, n: int, k: int, l: int) -> Fraction:
        """Sin-power coefficient of ``(1 - e2 sin^2 phi)^(1/2)``."""
        if n < 1 or k < 0 or not max(n, k + 1) <= l <= n + k:
            raise DomainError(f"d_N({n}, {k}, {l}) outside max(n,k+1) <= l <= n+k")
        self._require(n, k, l)

        def compute():
            total = Fraction(0)
            for i in range(1, min(n, l) + 1):
                inner = Fraction(0)
                for j in range(min(2 * i, k) + 1):
                    d = self.d_sin_pow(n - i, k, l - i, j)
                    if d:
                        inner += _binom(2 * i, j) * d
                if inner:
                    total += gen_binom(Fraction(1, 2), i) * (-1) ** i * inner
            return total

        return self._memoized(("N", n, k, l), compute)

    def d_h(self, n: int, k: int, l: int) -> Fraction:
        if n < 1 or k < 0 or not max(n, k + 1) <= l <= n + k:
            raise DomainError(f"d_h({n}, {k}, {l}) outside max(n,k+1) <= l <= n+k")
        if k == 0:
            return -self.d_N(n, 0, l)
        return self.d_cosdiff(n, k + 1, l) - self.d_N(n, k, l)

    # -- tensors ------------------------------------------------------------------

    def sinpow_tensor(self, quantity: str, bounds: Bounds | None = None) -> CoeffTensor:
        bounds = self.bounds if bounds is None else bounds
        self._require(*bounds)
        fn = {"phi": lambda n, k, l: gen_d_phi(n, k, l), "h": self.d_h, "sin": self.d_sin, "cos": self.d_cos}[quantity]
        nmax, kmax, lmax = bounds
        entries = {}
        for n in range(nmax + 1):
            for k in range(kmax + 1):
                for l in l_window(quantity, "sinpow", n, k, lmax):
                    entries[(n, k, l)] = fn(n, k, l)
        return CoeffTensor(quantity, "sinpow", entries, bounds)

    def fourier_tensor(self, quantity: str, bounds: Bounds | None = None) -> CoeffTensor:
        bounds = self.bounds if bounds is None else bounds
        nmax, kmax, lmax = bounds
        if quantity == "phi":
            entries = {}
            for n in range(1, nmax + 1):
                for k in range(1, kmax + 1):
                    for l in range(max(n, k), lmax + 1):
                        entries[(n, k, l)] = gen_c_phi(n, k, l)
            return CoeffTensor("phi", "fourier", entries, bounds)
        src = self.sinpow_tensor(quantity, (lmax, kmax, lmax))
        return sinpow_to_fourier(src, *CONVERSION_PARAMS[quantity], bounds)

    def tensor(self, quantity: str, form: str, bounds: Bounds | None = None) -> CoeffTensor:
        check_kind(quantity, form)
        if form == "sinpow":
            return self.sinpow_tensor(quantity, bounds)
        return self.fourier_tensor(quantity, bounds)

    def power_family(self, base: str, i: int, bounds: Bounds | None = None) -> PowerCoeffFamily:
        bounds = self.bounds if bounds is None else bounds
        self._require(*bounds)
        rows = self.phi_diff_power(i) if base == "phi_diff" else self.sin_ratio_power(i)
        nmax, kmax, lmax = bounds
        entries = {}
        for n in range(nmax + 1):
            for (k, l), c in rows[n].items():
                if k <= kmax and l <= lmax and power_in_structure(base, i, n, k, l):
                    entries[(n, k, l)] = c
                elif k <= kmax and l <= lmax:
                    raise AssertionError(f"{base}^{i} produced out-of-structure term {(n, k, l)}")
        return PowerCoeffFamily(base, i, entries, bounds)


# -- shared generator for the per-cell functions ------------------------------

_shared_lock = threading.Lock()
_shared: CoefficientGenerator | None = None


def shared_generator(bounds: Bounds = (0, 0, 0)) -> CoefficientGenerator:
    """Process-wide generator, regrown when a request exceeds its capacity."""
    global _shared
    with _shared_lock:
        if _shared is None or not _shared.covers(*bounds):
            old = _shared.capacity if _shared is not None else DEFAULT_BOUNDS
            _shared = CoefficientGenerator(tuple(max(a, b) for a, b in zip(old, bounds)))
        return _shared


def gen_d_sin(n: int, k: int, l: int) -> Fraction:
    return shared_generator((n, k, l)).d_sin(n, k, l)


def gen_d_cos(n: int, k: int, l: int) -> Fraction:
    return shared_generator((n, k, l)).d_cos(n, k, l)


def gen_d_cosdiff(n: int, k: int, l: int) -> Fraction:
    if k < 2:
        raise DomainError("d' needs k >= 2")
    return shared_generator((n, k - 1, l)).d_cosdiff(n, k, l)


def gen_d_N(n: int, k: int, l: int) -> Fraction:
    return shared_generator((n, k, l)).d_N(n, k, l)


def gen_d_h(n: int, k: int, l: int) -> Fraction:
    return shared_generator((n, k, l)).d_h(n, k, l)


def gen_phi_diff_powers(i: int, bounds: Bounds) -> PowerCoeffFamily:
    if i < 1:
        raise DomainError("power must be >= 1")
    return shared_generator(bounds).power_family("phi_diff", i, bounds)


def gen_sin_ratio_powers(j: int, bounds: Bounds) -> PowerCoeffFamily:
    if j < 1:
        raise DomainError("power must be >= 1")
    return shared_generator(bounds).power_family("sin_ratio", j, bounds)


def gen_tensor(quantity: str, form: str, bounds: Bounds = DEFAULT_BOUNDS) -> CoeffTensor:
    """Fill every in-bounds coefficient of one series."""
    check_kind(quantity, form)
    if min(bounds) < 0:
        raise DomainError("bounds must be non-negative")
    return shared_generator(tuple(bounds)).tensor(quantity, form, tuple(bounds))
