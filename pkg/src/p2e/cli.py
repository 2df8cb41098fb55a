"""Command-line interface: ``p2e gen-tables | eval | sweep | bench | verify-tables``.

Exit codes: 0 success, 1 table mismatch, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from contextlib import contextmanager

from .coeffgen import DEFAULT_BOUNDS, gen_tensor
from .errors import CacheFormatError, ConfigurationError, ConvergenceError, DomainError
from .golden import verify_tables
from .rational import format_rational
from .tensor import FORMS, QUANTITIES, CoeffTensor, dump_cache, l_window

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


def fmt_float(x: float) -> str:
    """17 significant digits, so every float round-trips and output is byte-stable."""
    return format(x, ".17g")


def parse_triple(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N,K,L integers, got {text!r}") from None
    if len(parts) != 3 or min(parts) < 0:
        raise argparse.ArgumentTypeError(f"expected three non-negative integers N,K,L, got {text!r}")
    return parts


def parse_point(text: str) -> tuple[float, float]:
    try:
        u, v = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected u,v, got {text!r}") from None
    return u, v


def parse_values(text: str) -> list[float]:
    """Comma list of numbers and ``start:stop:step`` ranges (stop inclusive)."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if ":" in tok:
            start, stop, step = (float(x) for x in tok.split(":"))
            if step <= 0:
                raise argparse.ArgumentTypeError("range step must be positive")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            out += [start + i * step for i in range(count)]
        elif tok:
            out.append(float(tok))
    if not out:
        raise argparse.ArgumentTypeError("empty value list")
    return out


GRID_KEYS = ("psi", "varrho", "e2", "N")
GRID_DEFAULTS = {
    "psi": "5:85:10",
    "varrho": "0.3,0.6,0.9",
    "e2": "0.001,0.0066943799901413165,0.05",
    "N": "2,4,8",
}


def parse_grid(items: list[str] | None) -> dict[str, list[float]]:
    grid = {k: parse_values(v) for k, v in GRID_DEFAULTS.items()}
    for item in items or []:
        key, sep, values = item.partition("=")
        if not sep or key not in GRID_KEYS:
            raise argparse.ArgumentTypeError(f"grid spec must be one of {GRID_KEYS} as key=values, got {item!r}")
        grid[key] = parse_values(values)
    return grid


@contextmanager
def _output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
        return
    with open(path, "w", encoding="ascii", newline="") as fh:
        yield fh


def _series(args):
    from .series import SeriesSet, default_series

    if args.cache:
        return SeriesSet.from_cache_dir(args.cache)
    return default_series(tuple(args.bounds))


def _truncation(args, n=None):
    from .series import Truncation

    nb, kb, lb = args.bounds
    return Truncation(nb if n is None else n, kb, lb)


# -- gen-tables -------------------------------------------------------------------


def render_csv(t: CoeffTensor) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "k", "l", "value"])
    for n, k, l in t.indices():
        w.writerow([n, k, l, format_rational(t[n, k, l])])
    return buf.getvalue()


def _tex_rational(x) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    sign = "-" if x < 0 else ""
    return f"{sign}\\frac{{{abs(x.numerator)}}}{{{x.denominator}}}"


def render_tex(t: CoeffTensor) -> str:
    """One row per ``(n, k)``, one column per ``e^{2l}``; ``\\times`` marks absent cells."""
    nmax, kmax, lmax = t.bounds
    lmin = min((i[2] for i in t.indices()), default=1)
    cols = list(range(lmin, lmax + 1))
    lines = [
        "\\begin{tabular}{cc|" + "c" * len(cols) + "}",
        "$n$ & $k$ & " + " & ".join(f"$e^{{{2 * l}}}$" for l in cols) + " \\\\",
        "\\hline",
    ]
    for n in range(nmax + 1):
        for k in range(kmax + 1):
            window = l_window(t.quantity, t.form, n, k, lmax)
            if not window:
                continue
            cells = [f"${_tex_rational(t[n, k, l])}$" if l in window else "$\\times$" for l in cols]
            lines.append(f"{n} & $\\varrho^{{{k}}}$ & " + " & ".join(cells) + " \\\\")
    lines.append("\\end{tabular}")
    return "\n".join(lines) + "\n"


def cmd_gen_tables(args) -> int:
    quantities = QUANTITIES if args.quantity == "all" else (args.quantity,)
    forms = FORMS if args.form == "all" else (args.form,)
    render = {"csv": render_csv, "tex": render_tex, "cache": dump_cache}[args.format]
    many = len(quantities) * len(forms) > 1
    if many and not args.output:
        raise ConfigurationError("--output DIR is required when generating several tables")
    for q in quantities:
        for f in forms:
            text = render(gen_tensor(q, f, tuple(args.bounds)))
            if many:
                os.makedirs(args.output, exist_ok=True)
                ext = {"csv": "csv", "tex": "tex", "cache": "p2e"}[args.format]
                path = os.path.join(args.output, f"{q}_{f}.{ext}")
            else:
                path = args.output
            with _output(path) as fh:
                fh.write(text)
    return EXIT_OK


# -- eval ---------------------------------------------------------------------------


def cmd_eval(args) -> int:
    from .oracle import solve_phi
    from .series import EllipseParams, QueryPoint, evaluate

    ell = EllipseParams(args.a, args.e2)
    pt = QueryPoint(*args.point)
    res = evaluate(pt, ell, _truncation(args), args.form, _series(args))
    rows = [
        ("phi", fmt_float(res.phi)),
        ("h", fmt_float(res.h)),
        ("sin_phi", fmt_float(res.sin_phi)),
        ("cos_phi", fmt_float(res.cos_phi)),
        ("guard_ratio", fmt_float(res.guard_ratio)),
        ("converged_hint", str(res.converged_hint).lower()),
    ]
    if args.oracle:
        o = solve_phi(pt, ell)
        rows += [
            ("oracle_phi", fmt_float(o.phi_star)),
            ("oracle_h", fmt_float(o.h_star)),
            ("delta_phi", fmt_float(res.phi - o.phi_star)),
            ("delta_h", fmt_float(res.h - o.h_star)),
            ("delta_sin_phi", fmt_float(res.sin_phi - math.sin(o.phi_star))),
            ("delta_cos_phi", fmt_float(res.cos_phi - math.cos(o.phi_star))),
            ("oracle_iterations", str(o.iterations)),
        ]
    for key, val in rows:
        print(f"{key}\t{val}")
    return EXIT_OK


# -- sweep --------------------------------------------------------------------------

SWEEP_FIELDS = (
    "quantity", "form", "psi_deg", "varrho", "e2", "N", "K", "L",
    "series", "oracle", "abs_err", "rel_err", "guard_ratio", "converged_hint", "flag",
)


def _series_value(quantity, form, pt, ell, tr, series):
    from .series import eval_h, eval_phi, eval_sincos

    if quantity == "phi":
        return eval_phi(pt, ell, tr, form, series)
    if quantity == "h":
        return eval_h(pt, ell, tr, form, series)
    sin_phi, cos_phi = eval_sincos(pt, ell, tr, form, series)
    return sin_phi if quantity == "sin" else cos_phi


def _oracle_value(quantity, o):
    return {"phi": o.phi_star, "h": o.h_star, "sin": math.sin(o.phi_star), "cos": math.cos(o.phi_star)}[quantity]


def sweep_rows(args) -> list[list[str]]:
    from .oracle import solve_phi
    from .series import GUARD_THRESHOLD, EllipseParams, QueryPoint, guard_ratio, to_polar

    grid = parse_grid(args.grid)
    series = _series(args)
    ell_cache = {}
    rows = []
    for e2 in grid["e2"]:
        ell = ell_cache.setdefault(e2, EllipseParams(args.a, e2))
        for vr in grid["varrho"]:
            for psi_deg in grid["psi"]:
                pt = QueryPoint.from_polar(math.radians(psi_deg), args.a / vr)
                flag = "ok"
                try:
                    truth = _oracle_value(args.quantity, solve_phi(pt, ell))
                except (DomainError, ConvergenceError) as exc:
                    truth, flag = math.nan, "oracle_failed" if isinstance(exc, ConvergenceError) else "oracle_rejected"
                guard = guard_ratio(to_polar(pt.u, pt.v, ell.a), e2)
                for n in grid["N"]:
                    tr = _truncation(args, int(n))
                    val = _series_value(args.quantity, args.form, pt, ell, tr, series)
                    err = abs(val - truth)
                    scale = args.a if args.quantity == "h" else 1.0
                    rel = err / abs(truth) if truth else (0.0 if err == 0 else math.inf)
                    rows.append([
                        args.quantity, args.form, fmt_float(psi_deg), fmt_float(vr), fmt_float(e2),
                        str(tr.N), str(tr.K), str(tr.L), fmt_float(val), fmt_float(truth),
                        fmt_float(err / scale), fmt_float(rel), fmt_float(guard),
                        str(guard <= GUARD_THRESHOLD).lower(), flag,
                    ])
    return rows


def cmd_sweep(args) -> int:
    rows = sweep_rows(args)
    with _output(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_FIELDS)
        w.writerows(rows)
    return EXIT_OK


# -- bench --------------------------------------------------------------------------


def cmd_bench(args) -> int:
    from .bench import BenchRow, run_bench
    from .series import EllipseParams

    ell = EllipseParams(args.a, args.e2)
    grid = parse_grid(args.grid)
    truncations = [_truncation(args, int(n)) for n in grid["N"]]
    report = run_bench(
        truncations, ell, repetitions=args.repetitions, quantity=args.quantity,
        with_oracle=args.oracle, series=_series(args),
    )
    if args.output:
        with _output(args.output) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(BenchRow.FIELDS)
            w.writerows(r.as_row() for r in report.rows)
    print(report.summary())
    return EXIT_OK


# -- verify-tables ------------------------------------------------------------------


def cmd_verify_tables(args) -> int:
    counts, mismatches = verify_tables(args.golden)
    for (q, f), n in counts.items():
        bad = sum(1 for m in mismatches if (m.quantity, m.form) == (q, f))
        print(f"{q}/{f}: {n} cells, {bad} mismatches")
    for m in mismatches:
        print(f"MISMATCH {m}")
    print(f"total mismatches: {len(mismatches)}")
    return EXIT_MISMATCH if mismatches else EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="p2e", description="Point-to-ellipse normal angle and distance by series.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, quantity_choices=QUANTITIES, form_choices=FORMS, default_form="sinpow"):
        sp.add_argument("--quantity", choices=quantity_choices, default="phi")
        sp.add_argument("--form", choices=form_choices, default=default_form)
        sp.add_argument("--bounds", type=parse_triple, default=DEFAULT_BOUNDS, metavar="N,K,L",
                        help="truncation / generation bounds (default %(default)s)")
        sp.add_argument("--cache", metavar="DIR", help="load coefficient tensors from a cache directory")

    g = sub.add_parser("gen-tables", help="emit coefficient tables")
    common(g, QUANTITIES + ("all",), FORMS + ("all",))
    g.add_argument("--format", choices=("csv", "tex", "cache"), default="csv")
    g.add_argument("-o", "--output", help="file (or directory with 'all'); stdout by default")
    g.set_defaults(func=cmd_gen_tables)

    e = sub.add_parser("eval", help="evaluate phi, h, sin(phi), cos(phi) at one point")
    common(e)
    e.add_argument("--point", type=parse_point, required=True, metavar="U,V")
    e.add_argument("--a", type=float, default=1.0)
    e.add_argument("--e2", type=float, default=0.0066943799901413165)
    e.add_argument("--oracle", action="store_true", help="also print deltas against the iterative solver")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="series vs oracle over a grid, as CSV")
    common(s)
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--grid", action="append", metavar="KEY=VALUES",
                   help="psi (degrees), varrho, e2 or N; comma lists or start:stop:step; repeatable")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bench", help="time and op-count the Horner kernels")
    common(b, ("phi", "h"))
    b.add_argument("--a", type=float, default=1.0)
    b.add_argument("--e2", type=float, default=0.0066943799901413165)
    b.add_argument("--grid", action="append", metavar="N=VALUES", help="truncation orders N to bench")
    b.add_argument("--repetitions", type=int, default=5)
    b.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=True)
    b.add_argument("-o", "--output", help="CSV report path")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify-tables", help="diff generated coefficients against the golden tables")
    v.add_argument("--golden", metavar="DIR", help="directory of golden CSVs (default: shipped copy)")
    v.set_defaults(func=cmd_verify_tables)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"p2e: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ConfigurationError, CacheFormatError, ConvergenceError, OSError) as exc:
        print(f"p2e: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
