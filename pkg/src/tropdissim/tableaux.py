"""Partitions, semistandard Young tableaux and the top-row coweight.

Tableaux follow the English convention (strict down columns, weak along
rows) and are stored column-major, since every downstream consumer wants the
column sets ``[sigma_1, ..., sigma_k]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._bounds import BoundsError, limit
from .indexsets import IndexSet

Shape = tuple[int, ...]


def normalize_shape(parts: Iterable[int]) -> Shape:
    """Validate a partition and strip trailing zeros."""
    parts = tuple(int(p) for p in parts)
    if any(p < 0 for p in parts):
        raise ValueError(f"negative part in shape {parts}")
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise ValueError(f"shape {parts} is not weakly decreasing")
    while parts and parts[-1] == 0:
        parts = parts[:-1]
    return parts


def conjugate(shape: Sequence[int]) -> Shape:
    shape = normalize_shape(shape)
    if not shape:
        return ()
    return tuple(sum(1 for p in shape if p > j) for j in range(shape[0]))


def rho(shape: Sequence[int]) -> int:
    """Number of boxes in the top row."""
    shape = normalize_shape(shape)
    return shape[0] if shape else 0


def add_shapes(a: Sequence[int], b: Sequence[int]) -> Shape:
    """Componentwise sum of dominant weights (Cartan product)."""
    a, b = normalize_shape(a), normalize_shape(b)
    width = max(len(a), len(b))
    a = a + (0,) * (width - len(a))
    b = b + (0,) * (width - len(b))
    return tuple(x + y for x, y in zip(a, b))


def partitions(size: int, max_parts: int | None = None) -> list[Shape]:
    """All partitions of *size*, largest first."""
    out = []

    def rec(rest, cap, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        if max_parts is not None and len(acc) == max_parts:
            return
        for p in range(min(rest, cap), 0, -1):
            rec(rest - p, p, acc + [p])

    rec(size, size, [])
    return out


@dataclass(frozen=True, order=True)
class Tableau:
    """A filling given by its columns, left to right."""

    columns: tuple[IndexSet, ...]

    @classmethod
    def from_columns(cls, cols: Iterable[Iterable[int]]) -> "Tableau":
        return cls(tuple(tuple(c) for c in cols))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Tableau":
        width = len(rows[0]) if rows else 0
        return cls(tuple(tuple(r[j] for r in rows if len(r) > j) for j in range(width)))

    @property
    def shape(self) -> Shape:
        return conjugate([len(c) for c in self.columns]) if self.columns else ()

    @property
    def rows(self) -> list[list[int]]:
        height = max((len(c) for c in self.columns), default=0)
        return [[c[i] for c in self.columns if len(c) > i] for i in range(height)]

    def to_json(self) -> dict:
        return {"shape": list(self.shape), "columns": [list(c) for c in self.columns]}

    @classmethod
    def from_json(cls, obj: dict) -> "Tableau":
        return cls.from_columns(obj["columns"])


def validate_ssyt(T: Tableau, n: int) -> bool:
    """True iff *T* is column-strict, row-weak, with entries in ``1..n``."""
    cols = T.columns
    if any(len(a) < len(b) for a, b in zip(cols, cols[1:])):
        return False
    for c in cols:
        if not c or any(x < 1 or x > n for x in c):
            return False
        if any(a >= b for a, b in zip(c, c[1:])):
            return False
    for left, right in zip(cols, cols[1:]):
        if any(left[r] > right[r] for r in range(len(right))):
            return False
    return True


def columns(T: Tableau) -> tuple[IndexSet, ...]:
    return T.columns


def _check_bounds(shape: Shape, n: int) -> None:
    if len(shape) > n:
        raise ValueError(f"shape {shape} has more than n={n} rows")
    if sum(shape) > limit(12):
        raise BoundsError(f"shape {shape} exceeds the {limit(12)}-box bound")


def enumerate_ssyt(shape: Sequence[int], n: int) -> list[Tableau]:
    """All SSYT of *shape* with entries in ``1..n``, sorted by column word."""
    shape = normalize_shape(shape)
    _check_bounds(shape, n)
    heights = conjugate(shape)
    out: list[Tableau] = []

    def rec(j: int, acc: list[IndexSet]):
        if j == len(heights):
            out.append(Tableau(tuple(acc)))
            return
        for col in itertools.combinations(range(1, n + 1), heights[j]):
            if acc and any(acc[-1][r] > col[r] for r in range(len(col))):
                continue
            rec(j + 1, acc + [col])

    rec(0, [])
    return out


def dimension_oracle(shape: Sequence[int], n: int) -> int:
    """Weyl dimension of the ``GL_n`` irreducible with highest weight *shape*."""
    shape = normalize_shape(shape)
    if len(shape) > n:
        raise ValueError(f"shape {shape} has more than n={n} rows")
    lam = shape + (0,) * (n - len(shape))
    dim = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            dim *= Fraction(lam[i] - lam[j] + j - i, j - i)
    assert dim.denominator == 1
    return int(dim)
