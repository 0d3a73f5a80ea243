"""Max-plus values, tropicalised supports and exact membership tests."""

from __future__ import annotations

import enum
import functools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Union

from .indexsets import frac_str, key_str, parse_key


@functools.total_ordering
class _Bottom:
    """The tropical zero, -infinity.  Absorbs under ``+``, loses every max."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, k):
        if isinstance(k, int) and k > 0:
            return self
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("-inf")

    def __repr__(self):
        return "-inf"


NEG_INF = _Bottom()
TropValue = Union[Fraction, _Bottom]


def trop(x) -> TropValue:
    """Coerce ``-inf`` spellings and rationals to a TropValue."""
    if x is NEG_INF or (isinstance(x, str) and x.strip() == "-inf"):
        return NEG_INF
    if isinstance(x, float) and x == float("-inf"):
        return NEG_INF
    return Fraction(x)


def trop_str(x: TropValue) -> str:
    return "-inf" if x is NEG_INF else frac_str(x)


Monomial = tuple[tuple[Hashable, int], ...]


def _monomial(exps: Mapping[Hashable, int]) -> Monomial:
    items = []
    for key, mult in exps.items():
        mult = int(mult)
        if mult < 0:
            raise ValueError(f"negative exponent {mult} for {key!r}")
        if mult:
            items.append((key, mult))
    if not items:
        raise ValueError("monomial has no variables")
    return tuple(sorted(items))


@dataclass(frozen=True)
class TropicalForm:
    """Support of a polynomial; each monomial becomes the linear form
    ``sum(mult * x_key)`` and the form is their maximum."""

    monomials: tuple[Monomial, ...]

    def __len__(self):
        return len(self.monomials)

    def to_json(self) -> list:
        return [{key_str(k) if isinstance(k, tuple) else str(k): m for k, m in mono}
                for mono in self.monomials]


def tropicalize(support: Iterable[Mapping[Hashable, int]]) -> TropicalForm:
    """Drop coefficients and merge duplicate monomials, keeping first-seen order."""
    seen: dict[Monomial, None] = {}
    for exps in support:
        seen.setdefault(_monomial(exps), None)
    if not seen:
        raise ValueError("cannot tropicalize an empty support")
    return TropicalForm(tuple(seen))


def eval_form(monomial: Monomial | Mapping[Hashable, int],
              point: Mapping[Hashable, TropValue]) -> TropValue:
    """Evaluate one linear form; any -inf coordinate makes the result -inf."""
    if isinstance(monomial, Mapping):
        monomial = _monomial(monomial)
    total: TropValue = Fraction(0)
    for key, mult in monomial:
        try:
            x = point[key]
        except KeyError:
            raise KeyError(f"point has no coordinate {key!r}") from None
        total = total + mult * x if x is not NEG_INF else NEG_INF
    return total


def evaluations(form: TropicalForm, point: Mapping[Hashable, TropValue]) -> list[TropValue]:
    return [eval_form(m, point) for m in form.monomials]


def argmax_count(form: TropicalForm, point: Mapping[Hashable, TropValue]) -> tuple[TropValue, int]:
    """Maximum over the monomials and how many attain it (0 when all -inf)."""
    vals = evaluations(form, point)
    best = max(vals)
    if best is NEG_INF:
        return NEG_INF, 0
    return best, sum(1 for v in vals if v == best)


class Verdict(enum.Enum):
    MEMBER = "member"
    NONMEMBER = "nonmember"
    VACUOUS = "vacuous"


def membership(form: TropicalForm, point: Mapping[Hashable, TropValue]) -> Verdict:
    """Exact test of whether the maximum is attained at least twice."""
    _, count = argmax_count(form, point)
    if count == 0:
        return Verdict.VACUOUS
    return Verdict.MEMBER if count >= 2 else Verdict.NONMEMBER


def point_to_json(point: Mapping[tuple, TropValue]) -> str:
    return json.dumps({key_str(k): trop_str(v) for k, v in point.items()}, indent=1)


def point_from_json(text: str) -> dict[tuple, TropValue]:
    return {parse_key(k): trop(v) for k, v in json.loads(text).items()}


def form_from_json(obj: list) -> TropicalForm:
    return tropicalize({parse_key(k): m for k, m in mono.items()} for mono in obj)
