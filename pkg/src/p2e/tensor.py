"""Coefficient containers, structural index limits, and the v1 cache format."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterator, Mapping

import numpy as np

from .errors import CacheFormatError, ConfigurationError, DomainError
from .rational import format_rational, parse_rational

QUANTITIES = ("phi", "h", "sin", "cos")
FORMS = ("fourier", "sinpow")
Index = tuple[int, int, int]

# (n_min, k_min, l_lower(n, k), l_upper(n, k) or None for unbounded)
_LIMITS = {
    ("phi", "fourier"): (1, 1, lambda n, k: max(n, k), None),
    ("phi", "sinpow"): (0, 1, lambda n, k: max(n + 1, k), lambda n, k: n + k),
    ("h", "fourier"): (0, 0, lambda n, k: max(n, k + 1), None),
    ("h", "sinpow"): (1, 0, lambda n, k: max(n, k + 1), lambda n, k: n + k),
    ("sin", "fourier"): (0, 1, lambda n, k: max(n, k), None),
    ("sin", "sinpow"): (0, 1, lambda n, k: max(n, k), lambda n, k: n + k),
    ("cos", "fourier"): (0, 1, lambda n, k: max(n, k), None),
    ("cos", "sinpow"): (1, 1, lambda n, k: max(n, k), lambda n, k: n + k - 1),
}


def check_kind(quantity: str, form: str) -> None:
    if quantity not in QUANTITIES:
        raise DomainError(f"unknown quantity {quantity!r}")
    if form not in FORMS:
        raise DomainError(f"unknown form {form!r}")


def index_floor(quantity: str, form: str) -> tuple[int, int]:
    """Smallest admissible ``(n, k)`` for a series."""
    check_kind(quantity, form)
    n0, k0, _, _ = _LIMITS[(quantity, form)]
    return n0, k0


def l_window(quantity: str, form: str, n: int, k: int, lmax: int | None = None) -> range:
    """Admissible ``l`` for fixed ``(n, k)``, optionally capped at ``lmax``."""
    check_kind(quantity, form)
    n0, k0, lo, hi = _LIMITS[(quantity, form)]
    if n < n0 or k < k0:
        return range(0)
    upper = hi(n, k) if hi is not None else lmax
    if upper is None:
        raise ValueError("an unbounded window needs lmax")
    if lmax is not None:
        upper = min(upper, lmax)
    return range(lo(n, k), upper + 1)


def in_structure(quantity: str, form: str, n: int, k: int, l: int) -> bool:
    n0, k0, lo, hi = _LIMITS[(quantity, form)]
    if n < n0 or k < k0 or l < lo(n, k):
        return False
    return hi is None or l <= hi(n, k)


def structural_indices(quantity: str, form: str, bounds: tuple[int, int, int]) -> Iterator[Index]:
    """All in-structure ``(n, k, l)`` inside ``bounds``, ordered by n, k, l."""
    nmax, kmax, lmax = bounds
    n0, k0 = index_floor(quantity, form)
    for n in range(n0, nmax + 1):
        for k in range(k0, kmax + 1):
            for l in l_window(quantity, form, n, k, lmax):
                yield n, k, l


@dataclass(frozen=True)
class CoeffTensor:
    """Sparse ``(n, k, l) -> Rational`` table for one series.

    Entries absent from ``entries`` but inside the structural limits and
    ``bounds`` are exact zeros.
    """

    quantity: str
    form: str
    entries: Mapping[Index, Fraction]
    bounds: tuple[int, int, int]

    def __post_init__(self):
        check_kind(self.quantity, self.form)
        clean = {}
        for (n, k, l), v in self.entries.items():
            if not self.admits(n, k, l):
                raise DomainError(
                    f"entry {(n, k, l)} outside structural limits of {self.quantity}/{self.form} "
                    f"with bounds {self.bounds}"
                )
            v = Fraction(v)
            if v:
                clean[(n, k, l)] = v
        object.__setattr__(self, "entries", MappingProxyType(dict(sorted(clean.items()))))
        object.__setattr__(self, "bounds", tuple(int(b) for b in self.bounds))

    def admits(self, n: int, k: int, l: int) -> bool:
        nmax, kmax, lmax = self.bounds
        return n <= nmax and k <= kmax and l <= lmax and in_structure(self.quantity, self.form, n, k, l)

    def __getitem__(self, idx: Index) -> Fraction:
        n, k, l = idx
        if not self.admits(n, k, l):
            raise DomainError(f"{idx} is not a coefficient of {self.quantity}/{self.form} within {self.bounds}")
        return self.entries.get(idx, Fraction(0))

    def get(self, n: int, k: int, l: int) -> Fraction:
        """Coefficient value, zero for anything outside the tensor."""
        return self.entries.get((n, k, l), Fraction(0))

    def __len__(self) -> int:
        return len(self.entries)

    def indices(self) -> Iterator[Index]:
        return structural_indices(self.quantity, self.form, self.bounds)

    def restrict(self, bounds: tuple[int, int, int]) -> "CoeffTensor":
        nb, kb, lb = bounds
        if nb > self.bounds[0] or kb > self.bounds[1] or lb > self.bounds[2]:
            raise ConfigurationError(f"cannot widen {self.bounds} to {bounds}")
        sub = {i: v for i, v in self.entries.items() if i[0] <= nb and i[1] <= kb and i[2] <= lb}
        return CoeffTensor(self.quantity, self.form, sub, bounds)

    @cached_property
    def dense(self) -> np.ndarray:
        """Float64 array of shape ``(N+1, K+1, L+1)`` indexed ``[n, k, l]``."""
        nmax, kmax, lmax = self.bounds
        arr = np.zeros((nmax + 1, kmax + 1, lmax + 1))
        for (n, k, l), v in self.entries.items():
            arr[n, k, l] = float(v)
        arr.setflags(write=False)
        return arr


@dataclass(frozen=True)
class PowerCoeffFamily:
    """Coefficients of the ``power``-th power of a sin-power base series.

    ``base`` is ``phi_diff`` for ``(phi - psi)`` or ``sin_ratio`` for
    ``sin(phi)/sin(psi) - 1``.
    """

    base: str
    power: int
    entries: Mapping[Index, Fraction]
    bounds: tuple[int, int, int] = field(default=(0, 0, 0))

    def __post_init__(self):
        if self.base not in ("phi_diff", "sin_ratio"):
            raise DomainError(f"unknown power base {self.base!r}")
        if self.power < 1:
            raise DomainError("power must be >= 1")
        for idx in self.entries:
            if not power_in_structure(self.base, self.power, *idx):
                raise DomainError(f"power entry {idx} outside limits for {self.base}^{self.power}")
        object.__setattr__(self, "entries", MappingProxyType(dict(sorted(self.entries.items()))))

    def get(self, n: int, k: int, l: int) -> Fraction:
        return self.entries.get((n, k, l), Fraction(0))


def power_in_structure(base: str, i: int, n: int, k: int, l: int) -> bool:
    if n < 0 or k < i:
        return False
    lo = max(n + i, k) if base == "phi_diff" else max(n, k)
    return lo <= l <= n + k


# -- cache file ---------------------------------------------------------------

_MAGIC = "p2e-coeffs"
_VERSION = "v1"


def dump_cache(tensor: CoeffTensor) -> str:
    """Render a tensor in the line-oriented v1 cache format."""
    n, k, l = tensor.bounds
    lines = [f"{_MAGIC} {_VERSION} {tensor.quantity} {tensor.form} N={n} K={k} L={l}"]
    for (i, j, m), v in sorted(tensor.entries.items()):
        lines.append(f"{i} {j} {m} {format_rational(v)}")
    return "\n".join(lines) + "\n"


def load_cache(text: str) -> CoeffTensor:
    """Parse the v1 cache format, validating the header and every entry."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CacheFormatError("empty cache")
    head = lines[0].split()
    if len(head) != 7 or head[0] != _MAGIC or head[1] != _VERSION:
        raise CacheFormatError(f"bad cache header: {lines[0]!r}")
    quantity, form = head[2], head[3]
    if quantity not in QUANTITIES or form not in FORMS:
        raise CacheFormatError(f"unknown series {quantity}/{form}")
    bounds = []
    for tok, key in zip(head[4:], "NKL"):
        name, _, val = tok.partition("=")
        if name != key or not val.isdigit():
            raise CacheFormatError(f"bad bounds in header: {lines[0]!r}")
        bounds.append(int(val))
    bounds = tuple(bounds)
    entries = {}
    last = None
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 4:
            raise CacheFormatError(f"bad cache line: {ln!r}")
        try:
            idx = (int(parts[0]), int(parts[1]), int(parts[2]))
            val = parse_rational(parts[3])
        except ValueError as exc:
            raise CacheFormatError(str(exc)) from None
        if last is not None and idx <= last:
            raise CacheFormatError(f"cache entries out of order at {idx}")
        last = idx
        n, k, l = idx
        if not (n <= bounds[0] and k <= bounds[1] and l <= bounds[2] and in_structure(quantity, form, n, k, l)):
            raise CacheFormatError(f"entry {idx} outside structural limits")
        if val == 0:
            raise CacheFormatError(f"zero entry stored at {idx}")
        entries[idx] = val
    return CoeffTensor(quantity, form, entries, bounds)


def write_cache(tensor: CoeffTensor, path: str | os.PathLike | io.TextIOBase) -> None:
    text = dump_cache(tensor)
    if hasattr(path, "write"):
        path.write(text)
        return
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def read_cache(path: str | os.PathLike) -> CoeffTensor:
    with open(path, encoding="ascii") as fh:
        return load_cache(fh.read())
