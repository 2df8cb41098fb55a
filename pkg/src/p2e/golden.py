"""Shipped reference tables and the exact diff against freshly generated tensors.

Each golden CSV has columns ``n,k,l,value``; ``value`` is a rational ``p/q``
or ``x`` for a cell that is structurally absent.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable

from .coeffgen import gen_tensor
from .errors import ConfigurationError
from .rational import parse_rational
from .tensor import FORMS, QUANTITIES, CoeffTensor

ABSENT = "x"


@dataclass(frozen=True)
class GoldenCell:
    n: int
    k: int
    l: int
    value: Fraction | None  # None marks a structurally absent cell


@dataclass(frozen=True)
class Mismatch:
    quantity: str
    form: str
    n: int
    k: int
    l: int
    expected: str
    got: str

    def __str__(self) -> str:
        return (
            f"{self.quantity}/{self.form} (n={self.n}, k={self.k}, l={self.l}): "
            f"expected {self.expected}, got {self.got}"
        )


def golden_name(quantity: str, form: str) -> str:
    return f"{quantity}_{form}.csv"


def read_golden(path: str | os.PathLike) -> list[GoldenCell]:
    cells = []
    with open(path, newline="", encoding="ascii") as fh:
        for row in csv.DictReader(fh):
            raw = row["value"].strip()
            value = None if raw == ABSENT else parse_rational(raw)
            cells.append(GoldenCell(int(row["n"]), int(row["k"]), int(row["l"]), value))
    if not cells:
        raise ConfigurationError(f"golden file {path} has no rows")
    return cells


def shipped_dir() -> str:
    return str(resources.files("p2e") / "golden")


def golden_bounds(cells: Iterable[GoldenCell]) -> tuple[int, int, int]:
    cells = list(cells)
    return (max(c.n for c in cells), max(c.k for c in cells), max(c.l for c in cells))


def diff_table(quantity: str, form: str, cells: list[GoldenCell], tensor: CoeffTensor | None = None) -> list[Mismatch]:
    """Exact comparison of one golden table against the generator."""
    if tensor is None:
        tensor = gen_tensor(quantity, form, golden_bounds(cells))
    out = []
    for c in cells:
        admitted = tensor.admits(c.n, c.k, c.l)
        if c.value is None:
            if admitted:
                out.append(Mismatch(quantity, form, c.n, c.k, c.l, "absent", str(tensor[c.n, c.k, c.l])))
        elif not admitted:
            out.append(Mismatch(quantity, form, c.n, c.k, c.l, str(c.value), "absent"))
        elif tensor[c.n, c.k, c.l] != c.value:
            out.append(Mismatch(quantity, form, c.n, c.k, c.l, str(c.value), str(tensor[c.n, c.k, c.l])))
    return out


def verify_tables(directory: str | os.PathLike | None = None) -> tuple[dict[tuple[str, str], int], list[Mismatch]]:
    """Diff all eight tables; returns per-table cell counts and every mismatch.

    Raises
    ------
    ConfigurationError
        If a golden file is missing.
    """
    directory = directory or shipped_dir()
    counts, mismatches = {}, []
    for q in QUANTITIES:
        for f in FORMS:
            path = os.path.join(directory, golden_name(q, f))
            if not os.path.exists(path):
                raise ConfigurationError(f"missing golden file {path}")
            cells = read_golden(path)
            counts[(q, f)] = sum(c.value is not None for c in cells)
            mismatches += diff_table(q, f, cells)
    return counts, mismatches
