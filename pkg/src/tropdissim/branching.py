"""Branching diagrams of exterior forms and the tree valuation ``w_T``.

Hanging the tree from leaf 0, each edge ``e`` carries the general linear group
on the leaves ``L(e)`` below it.  The form ``z_sigma`` restricts along ``e`` to
``z_{sigma & L(e)}``, a column of ``|sigma & L(e)|`` boxes for the rank
``|L(e)|`` group.  The valuation weights each edge's shape by its length times
the top-row count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .indexsets import IndexSet, index_set
from .tableaux import Shape, Tableau, rho, validate_ssyt
from .tree import Edge, MetricTree


@dataclass(frozen=True)
class EdgeWeight:
    edge: Edge
    rank: int
    ones: int

    @property
    def shape(self) -> Shape:
        return (1,) * self.ones


@dataclass(frozen=True)
class BranchingDiagram:
    sigma: IndexSet
    entries: tuple[EdgeWeight, ...]

    def shape_at(self, e: Edge) -> Shape:
        e = tuple(sorted(e))
        for w in self.entries:
            if w.edge == e:
                return w.shape
        raise KeyError(f"{e!r} is not an edge")

    def to_json(self) -> str:
        return json.dumps([{"edge": list(w.edge), "rank": w.rank, "ones": w.ones}
                           for w in self.entries])


def _sigma(tree: MetricTree, sigma: Iterable[int]) -> IndexSet:
    sigma = index_set(sigma)
    if not sigma:
        raise ValueError("sigma must be nonempty")
    if 0 in sigma:
        raise ValueError("sigma must not contain the root label 0")
    if sigma[-1] > tree.n:
        raise ValueError(f"sigma {sigma} has labels outside 1..{tree.n}")
    return sigma


def branching_diagram(tree: MetricTree, sigma: Iterable[int]) -> BranchingDiagram:
    sigma = _sigma(tree, sigma)
    members = set(sigma)
    entries = []
    for e in tree.edges:
        below = tree.leaves_behind(e)
        entries.append(EdgeWeight(e, len(below), sum(1 for x in below if x in members)))
    return BranchingDiagram(sigma, tuple(entries))


def valuation(tree: MetricTree, sigma: Iterable[int]) -> Fraction:
    """``w_T(z_sigma)``."""
    diagram = branching_diagram(tree, sigma)
    return sum((tree.length(w.edge) * rho(w.shape) for w in diagram.entries), Fraction(0))


def valuation_tableau(tree: MetricTree, T: Tableau) -> Fraction:
    """``w_T(z_T)``: diagrams add over the columns of ``T``."""
    if not validate_ssyt(T, tree.n):
        raise ValueError(f"{T} is not a semistandard tableau with entries in 1..{tree.n}")
    return sum((valuation(tree, c) for c in T.columns), Fraction(0))
