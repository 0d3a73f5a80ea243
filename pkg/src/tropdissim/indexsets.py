"""Canonical index sets.

An index set is a plain tuple of ints in strictly increasing order.  The same
type labels leaf subsets, exterior forms ``z_sigma`` and Plucker coordinates.
Because a tuple carries its own length, keys of different sizes never collide.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Tuple

IndexSet = Tuple[int, ...]


def index_set(items: Iterable[int]) -> IndexSet:
    """Sort *items* into an IndexSet, rejecting repeats."""
    out = tuple(sorted(int(i) for i in items))
    if len(set(out)) != len(out):
        raise ValueError(f"repeated index in {list(items)!r}")
    return out


def is_index_set(obj) -> bool:
    return (isinstance(obj, tuple)
            and all(isinstance(i, int) for i in obj)
            and all(a < b for a, b in zip(obj, obj[1:])))


def key_str(sigma: IndexSet) -> str:
    """``(0, 1, 3)`` -> ``"0-1-3"``."""
    return "-".join(str(i) for i in sigma)


def parse_key(text: str) -> IndexSet:
    text = text.strip()
    if not text:
        return ()
    return index_set(int(tok) for tok in text.split("-"))


def frac_str(x: Fraction) -> str:
    """Exact rational as ``"p/q"`` (or ``"p"`` for integers)."""
    return str(Fraction(x))
