"""Operation counts, timings and time-to-accuracy for series evaluation.

Op counts are measured by running the pure-Python Horner loop on
:class:`CountingFloat` scalars, so they reflect the code actually executed
rather than a formula.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels_py, kernels
from .oracle import solve_phi
from .series import EllipseParams, QueryPoint, SeriesSet, Truncation, default_series, eval_h, eval_phi, to_polar


class CountingFloat:
    """Float wrapper that counts every ``+``, ``-`` and ``*`` it takes part in."""

    __slots__ = ("value", "counter")

    def __init__(self, value: float, counter: list[int]):
        self.value = float(value)
        self.counter = counter

    def _wrap(self, value: float) -> "CountingFloat":
        self.counter[0] += 1
        return CountingFloat(value, self.counter)

    @staticmethod
    def _v(x) -> float:
        return x.value if isinstance(x, CountingFloat) else float(x)

    def __add__(self, o):
        return self._wrap(self.value + self._v(o))

    def __radd__(self, o):
        return self._wrap(self._v(o) + self.value)

    def __sub__(self, o):
        return self._wrap(self.value - self._v(o))

    def __rsub__(self, o):
        return self._wrap(self._v(o) - self.value)

    def __mul__(self, o):
        return self._wrap(self.value * self._v(o))

    def __rmul__(self, o):
        return self._wrap(self._v(o) * self.value)

    def __float__(self) -> float:
        return self.value


def horner_op_count(N: int, K: int, L: int) -> int:
    """Multiply-adds of the nested sin-power Horner scheme: ``e2``, then ``varrho``, then ``s``."""
    return 2 * (N + 1) * (K + 1) * L + 2 * (N + 1) * K + 2 * N


def count_sinpow_ops(coef: np.ndarray, tr: Truncation, s=0.3, varrho=0.5, e2=0.01) -> tuple[int, float]:
    """Run the fallback kernel on counting scalars; returns ``(ops, value)``."""
    counter = [0]
    obj = np.asarray(coef, dtype=np.float64).astype(object)
    out = _kernels_py.sinpow(
        obj,
        CountingFloat(s, counter),
        CountingFloat(varrho, counter),
        CountingFloat(e2, counter),
        tr.N,
        tr.K,
        tr.L,
    )
    return counter[0], float(out)


def _time(fn: Callable[[], object], repetitions: int) -> list[float]:
    out = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return out


@dataclass
class BenchRow:
    quantity: str
    form: str
    backend: str
    truncation: tuple[int, int, int]
    points: int
    mean_s: float
    median_s: float
    op_count: int
    max_err: float | None = None
    mean_err: float | None = None

    FIELDS = ("quantity", "form", "backend", "N", "K", "L", "points", "mean_s", "median_s", "op_count", "max_err", "mean_err")

    def as_row(self) -> list[str]:
        def fmt(x):
            return "" if x is None else format(x, ".6g")

        n, k, l = self.truncation
        return [
            self.quantity, self.form, self.backend, str(n), str(k), str(l), str(self.points),
            fmt(self.mean_s), fmt(self.median_s), str(self.op_count), fmt(self.max_err), fmt(self.mean_err),
        ]


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    oracle_mean_s: float | None = None

    def __len__(self) -> int:
        return len(self.rows)

    def summary(self) -> str:
        if not self.rows:
            return "empty report"
        lines = [f"{'backend':9s} {'N,K,L':9s} {'ops':>6s} {'us/point':>10s} {'max err':>10s}"]
        for r in self.rows:
            err = "-" if r.max_err is None else f"{r.max_err:.2e}"
            lines.append(
                f"{r.backend:9s} {','.join(map(str, r.truncation)):9s} {r.op_count:6d} "
                f"{1e6 * r.median_s / r.points:10.3f} {err:>10s}"
            )
        if self.oracle_mean_s is not None:
            lines.append(f"oracle: {1e6 * self.oracle_mean_s:.3f} us/point")
        return "\n".join(lines)


def default_points(ell: EllipseParams) -> list[QueryPoint]:
    """First-quadrant points at 5..85 degrees on three radii outside the ellipse."""
    return [
        QueryPoint.from_polar(math.radians(d), ell.a / vr)
        for vr in (0.3, 0.6, 0.9)
        for d in range(5, 90, 10)
    ]


def run_bench(
    truncations: Sequence[Truncation],
    ell: EllipseParams,
    points: Sequence[QueryPoint] | None = None,
    repetitions: int = 5,
    quantity: str = "phi",
    with_oracle: bool = True,
    series: SeriesSet | None = None,
) -> BenchReport:
    """Time sin-power evaluation of ``quantity`` on both backends for each truncation.

    With ``with_oracle`` the per-point oracle time is measured too, and each
    row carries the max/mean error against it (time-to-accuracy pairs).
    """
    report = BenchReport()
    if repetitions <= 0 or not truncations:
        return report
    if quantity not in ("phi", "h"):
        raise ValueError("bench supports phi and h")
    points = list(points) if points is not None else default_points(ell)
    need = tuple(max(t.as_tuple()[i] for t in truncations) for i in range(3))
    series = series or default_series(tuple(max(a, b) for a, b in zip(need, (8, 8, 9))))
    t = series[quantity, "sinpow"]
    polars = [to_polar(p.u, p.v, ell.a) for p in points]
    s = np.array([pp.s for pp in polars])
    vr = np.array([pp.varrho for pp in polars])
    e2 = np.full_like(s, ell.e2)

    truth = None
    if with_oracle:
        results = []
        times = _time(lambda: results.append([solve_phi(p, ell) for p in points]), repetitions)
        report.oracle_mean_s = statistics.fmean(times) / len(points)
        oracle = results[0]
        truth = np.array([o.phi_star if quantity == "phi" else o.h_star for o in oracle])

    backends = [("python", kernels.python_backend)]
    if kernels.compiled_backend is not None:
        backends.insert(0, ("compiled", kernels.compiled_backend))
    for tr in truncations:
        ops, _ = count_sinpow_ops(t.dense, tr)
        errs = None
        if truth is not None:
            fn = eval_phi if quantity == "phi" else eval_h
            vals = np.array([fn(p, ell, tr, series=series) for p in points])
            scale = 1.0 if quantity == "phi" else ell.a
            errs = np.abs(vals - truth) / scale
        for name, impl in backends:
            times = _time(lambda: kernels.sinpow(t.dense, s, vr, e2, tr.N, tr.K, tr.L, impl=impl), repetitions)
            report.rows.append(
                BenchRow(
                    quantity, "sinpow", name, tr.as_tuple(), len(points),
                    statistics.fmean(times), statistics.median(times), ops,
                    None if errs is None else float(errs.max()),
                    None if errs is None else float(errs.mean()),
                )
            )
    return report
