"""Quadratic Plucker, exchange and flag incidence relations.

A relation is a signed sum of products ``p_a * p_b`` of Plucker coordinates.
Generated relations are checked classically by substituting maximal minors of
random rational matrices (rows ``1..|sigma|``, columns ``sigma``), and
tropically by running :func:`tropdissim.tropical.membership` on their support.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Hashable, Iterable, Mapping, Sequence

from ._bounds import BoundsError, limit
from .indexsets import IndexSet, key_str, parse_key
from .tropical import (NEG_INF, TropValue, Verdict, argmax_count, evaluations,
                       membership, tropicalize)


@dataclass(frozen=True)
class Term:
    coef: int
    a: IndexSet
    b: IndexSet


@dataclass(frozen=True)
class QuadraticRelation:
    """``sum(coef * p_a * p_b)``; terms sorted by ``(a, b)``."""

    terms: tuple[Term, ...]
    family: str = ""
    params: tuple = field(default=(), compare=False)

    def support(self) -> list[dict[IndexSet, int]]:
        out = []
        for t in self.terms:
            exps: dict[IndexSet, int] = {}
            exps[t.a] = exps.get(t.a, 0) + 1
            exps[t.b] = exps.get(t.b, 0) + 1
            out.append(exps)
        return out

    def coordinates(self) -> set[IndexSet]:
        return {s for t in self.terms for s in (t.a, t.b)}

    def canonical(self) -> tuple:
        """Key identifying the relation up to overall sign."""
        flip = -1 if self.terms[0].coef < 0 else 1
        return tuple((flip * t.coef, t.a, t.b) for t in self.terms)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "params": [list(p) if isinstance(p, tuple) else p for p in self.params],
            "terms": [{"sign": t.coef, "a": key_str(t.a), "b": key_str(t.b)} for t in self.terms],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QuadraticRelation":
        terms = tuple(Term(int(t["sign"]), parse_key(t["a"]), parse_key(t["b"]))
                      for t in obj["terms"])
        params = tuple(tuple(p) if isinstance(p, list) else p for p in obj.get("params", ()))
        return cls(terms, obj.get("family", ""), params)

    def __str__(self):
        parts = []
        for t in self.terms:
            sign = "-" if t.coef < 0 else "+"
            mag = "" if abs(t.coef) == 1 else str(abs(t.coef))
            parts.append(f"{sign} {mag}p{key_str(t.a)}*p{key_str(t.b)}")
        return " ".join(parts).lstrip("+ ")


def make_relation(raw: Iterable[tuple[int, IndexSet, IndexSet]], family: str = "",
                  params: tuple = ()) -> QuadraticRelation | None:
    """Collect like terms; return None when fewer than two survive.

    Factors of equal size commute, so they are ordered within each term.
    """
    acc: dict[tuple[IndexSet, IndexSet], int] = {}
    for coef, a, b in raw:
        a, b = tuple(a), tuple(b)
        if len(a) == len(b) and b < a:
            a, b = b, a
        acc[(a, b)] = acc.get((a, b), 0) + coef
    terms = tuple(Term(c, a, b) for (a, b), c in sorted(acc.items()) if c)
    if len(terms) < 2:
        return None
    return QuadraticRelation(terms, family, params)


def _sort_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting *seq* (distinct entries)."""
    inv = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def _ground(n: int, ground: Sequence[int] | None) -> tuple[int, ...]:
    g = tuple(range(1, n + 1)) if ground is None else tuple(sorted(ground))
    if len(g) != n or len(set(g)) != n:
        raise ValueError(f"ground set must have {n} distinct indices, got {ground}")
    return g


def _dedupe(rels: Iterable[QuadraticRelation | None]) -> list[QuadraticRelation]:
    seen = set()
    out = []
    for r in rels:
        if r is None:
            continue
        key = r.canonical()
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def gen_three_term(m: int, n: int, ground: Sequence[int] | None = None) -> list[QuadraticRelation]:
    """Three-term relations of ``Gr(m, n)``.

    For each 4-set ``i<j<k<l`` and each ``(m-2)``-set ``S`` avoiding it:
    ``p_{Sij} p_{Skl} - p_{Sik} p_{Sjl} + p_{Sil} p_{Sjk}``, where each factor
    is written with ``S`` first and then sorted, picking up the permutation
    sign.  Indices are ``1..n`` unless *ground* (any ``n`` distinct ints) is
    given.  The family is empty when ``m > n - 2``.
    """
    if n < 4 or not 2 <= m <= n:
        raise ValueError(f"need n >= 4 and 2 <= m <= n, got m={m}, n={n}")
    if n > limit(10):
        raise BoundsError(f"n={n} exceeds the desk bound {limit(10)}")
    g = _ground(n, ground)
    out = []
    for quad in itertools.combinations(g, 4):
        rest = [x for x in g if x not in quad]
        i, j, k, l = quad
        for S in itertools.combinations(rest, m - 2):
            raw = []
            for sign, (x, y), (z, w) in ((1, (i, j), (k, l)), (-1, (i, k), (j, l)), (1, (i, l), (j, k))):
                fa, fb = S + (x, y), S + (z, w)
                raw.append((sign * _sort_sign(fa) * _sort_sign(fb), tuple(sorted(fa)), tuple(sorted(fb))))
            out.append(make_relation(raw, "three_term", (m, n, quad, S)))
    return _dedupe(out)


def exchange_relation(alpha: Iterable[int], beta: Iterable[int],
                      family: str = "exchange", params: tuple = ()) -> QuadraticRelation | None:
    """``sum_t (-1)^(t-1) sgn(alpha, b_t) p_{alpha+b_t} p_{beta-b_t}``.

    ``b_t`` is the t-th smallest element of *beta*; ``sgn(alpha, j)`` is
    ``(-1)^#{i in alpha: i > j}``; terms with ``b_t in alpha`` vanish.
    """
    alpha, beta = tuple(sorted(alpha)), tuple(sorted(beta))
    raw = []
    for t, bt in enumerate(beta):
        if bt in alpha:
            continue
        sign = (-1) ** t * (-1) ** sum(1 for i in alpha if i > bt)
        raw.append((sign, tuple(sorted(alpha + (bt,))), tuple(x for x in beta if x != bt)))
    return make_relation(raw, family, params or (alpha, beta))


def gen_exchange(a: int, b: int, n: int, ground: Sequence[int] | None = None) -> list[QuadraticRelation]:
    """Exchange (``a == b``) or flag incidence (``a < b``) relations between
    coordinates of sizes ``a`` and ``b`` on ``n`` indices."""
    if not 1 <= a <= b <= n - 1:
        raise ValueError(f"need 1 <= a <= b <= n-1, got a={a}, b={b}, n={n}")
    if n > limit(10):
        raise BoundsError(f"n={n} exceeds the desk bound {limit(10)}")
    g = _ground(n, ground)
    family = "exchange" if a == b else "incidence"
    return _dedupe(
        exchange_relation(alpha, beta, family, (a, b, alpha, beta))
        for alpha in itertools.combinations(g, a - 1)
        for beta in itertools.combinations(g, b + 1)
    )


# ---------------------------------------------------------------------------
# classical self-test


def det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by Gaussian elimination."""
    m = [list(r) for r in rows]
    k = len(m)
    out = Fraction(1)
    for c in range(k):
        piv = next((r for r in range(c, k) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out *= m[c][c]
        for r in range(c + 1, k):
            f = m[r][c] / m[c][c]
            if f:
                for cc in range(c, k):
                    m[r][cc] -= f * m[c][cc]
    return out


def random_matrix(n: int, rng: random.Random, ncols: int | None = None) -> list[list[Fraction]]:
    """Entries ``p/q`` with ``|p| <= 9``, ``1 <= q <= 4``."""
    ncols = n if ncols is None else ncols
    return [[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(ncols)] for _ in range(n)]


def evaluate_classical(rel: QuadraticRelation, matrix: Sequence[Sequence[Fraction]],
                       columns: Mapping[int, int], cache: dict | None = None) -> Fraction:
    """Substitute ``p_sigma`` = minor on the first ``|sigma|`` rows and the
    columns of *sigma* (mapped through *columns*)."""
    cache = {} if cache is None else cache

    def p(sigma):
        if sigma not in cache:
            cols = [columns[s] for s in sigma]
            cache[sigma] = det([[matrix[r][c] for c in cols] for r in range(len(sigma))])
        return cache[sigma]

    return sum((t.coef * p(t.a) * p(t.b) for t in rel.terms), Fraction(0))


@dataclass
class SelfTestFailure:
    relation: QuadraticRelation
    trial: int
    value: Fraction
    matrix: list[list[Fraction]]


@dataclass
class SelfTestReport:
    relations: int
    trials: int
    failures: list[SelfTestFailure]

    @property
    def ok(self) -> bool:
        return not self.failures


def classical_selftest(relations: Sequence[QuadraticRelation], n: int | None = None,
                       trials: int = 20, seed: int = 0) -> SelfTestReport:
    """Check that every relation vanishes on minors of random matrices.

    Indices are mapped to matrix columns in increasing order; *n* defaults
    to the number of distinct indices used.  Each relation reports at most
    its first failing trial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    idx = sorted({i for r in relations for s in r.coordinates() for i in s})
    n = len(idx) if n is None else n
    if n < len(idx):
        raise ValueError(f"relations use {len(idx)} indices but n={n}")
    columns = {s: c for c, s in enumerate(idx)}
    rng = random.Random(seed)
    failures: list[SelfTestFailure] = []
    failed = set()
    for trial in range(trials):
        mat = random_matrix(n, rng)
        cache: dict = {}
        for ri, rel in enumerate(relations):
            if ri in failed:
                continue
            val = evaluate_classical(rel, mat, columns, cache)
            if val != 0:
                failed.add(ri)
                failures.append(SelfTestFailure(rel, trial, val, mat))
    return SelfTestReport(len(relations), trials, failures)


# ---------------------------------------------------------------------------
# tropical check


@dataclass
class Violation:
    relation: QuadraticRelation
    values: list[TropValue]
    max_value: TropValue
    count: int


@dataclass
class TropicalReport:
    member: int = 0
    vacuous: int = 0
    nonmember: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def tested(self) -> int:
        return self.member + self.vacuous + self.nonmember

    def merge(self, other: "TropicalReport") -> None:
        self.member += other.member
        self.vacuous += other.vacuous
        self.nonmember += other.nonmember
        self.violations.extend(other.violations)


def tropical_check(relations: Iterable[QuadraticRelation],
                   point: Mapping[Hashable, TropValue]) -> TropicalReport:
    """Tropical membership of *point* for each relation's support."""
    rep = TropicalReport()
    for rel in relations:
        form = tropicalize(rel.support())
        verdict = membership(form, point)
        if verdict is Verdict.MEMBER:
            rep.member += 1
        elif verdict is Verdict.VACUOUS:
            rep.vacuous += 1
        else:
            rep.nonmember += 1
            best, count = argmax_count(form, point)
            rep.violations.append(Violation(rel, evaluations(form, point), best, count))
    return rep


def three_term_count(m: int, n: int) -> int:
    return comb(n, 4) * comb(n - 4, m - 2) if m >= 2 else 0


def relations_to_json(rels: Iterable[QuadraticRelation]) -> str:
    return json.dumps([r.to_json() for r in rels], indent=1)


def relations_from_json(text: str) -> list[QuadraticRelation]:
    return [QuadraticRelation.from_json(o) for o in json.loads(text)]


__all__ = [
    "NEG_INF", "QuadraticRelation", "Term", "make_relation", "gen_three_term",
    "exchange_relation", "gen_exchange", "classical_selftest", "tropical_check",
    "TropicalReport", "Violation", "SelfTestReport", "three_term_count", "det",
]
