"""Four-point condition and exact reconstruction of trees from distances."""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from ._bounds import BoundsError, limit
from .dissimilarity import DistanceMatrix, distance_matrix
from .newick import to_newick
from .tree import MetricTree, random_tree

__all__ = [
    "DistanceMatrix", "FourPointResult", "NonAdditiveError", "four_point_check",
    "reconstruct", "verify_injectivity", "InjectivityReport",
]


class NonAdditiveError(ValueError):
    """Distances that no metric tree realises.  ``witness`` holds the
    offending leaf triple or quadruple."""

    def __init__(self, message: str, witness: tuple[int, ...] = ()):
        super().__init__(message)
        self.witness = witness


@dataclass
class FourPointResult:
    violations: list[tuple[tuple[int, int, int, int], tuple[Fraction, Fraction, Fraction]]]

    @property
    def additive(self) -> bool:
        return not self.violations


def _as_matrix(D) -> DistanceMatrix:
    return D if isinstance(D, DistanceMatrix) else DistanceMatrix(D)


def four_point_check(D) -> FourPointResult:
    """For every 4-set, the largest of the three pairing sums must tie."""
    D = _as_matrix(D)
    bad = []
    for i, j, k, l in itertools.combinations(range(D.size), 4):
        sums = (D[i, j] + D[k, l], D[i, k] + D[j, l], D[i, l] + D[j, k])
        top = max(sums)
        if sum(1 for s in sums if s == top) < 2:
            bad.append(((i, j, k, l), sums))
    return FourPointResult(bad)


def _path(adj, src, dst) -> list:
    prev = {src: None}
    stack = [src]
    while stack:
        v = stack.pop()
        if v == dst:
            break
        for w in adj[v]:
            if w not in prev:
                prev[w] = v
                stack.append(w)
    out = [dst]
    while out[-1] != src:
        out.append(prev[out[-1]])
    return out[::-1]


def _subdivide(adj, u, v, offset: Fraction, new) -> None:
    """Insert vertex *new* on edge u-v at distance *offset* from u."""
    total = adj[u].pop(v)
    del adj[v][u]
    adj[u][new] = adj[new][u] = offset
    adj[v][new] = adj[new][v] = total - offset


def reconstruct(D) -> MetricTree:
    """Rebuild the metric tree realising the additive distances *D*.

    Leaves are inserted in label order.  Leaf ``l`` hangs off the path from
    leaf 0 to the leaf ``j`` that maximises the three-point projection
    ``(D[0,l] + D[0,j] - D[j,l]) / 2`` (smallest ``j`` on ties).  Zero-length
    internal edges are contracted at the end.
    """
    D = _as_matrix(D)
    k = D.size
    if k < 3:
        raise ValueError("need at least three leaves")
    fp = four_point_check(D)
    if not fp.additive:
        quad, sums = fp.violations[0]
        raise NonAdditiveError(
            f"four-point condition fails on {quad}: sums {[str(s) for s in sums]}", quad)

    adj: dict[int, dict[int, Fraction]] = defaultdict(dict)
    centre = k
    nxt = k + 1
    for i, j, l in ((0, 1, 2), (1, 0, 2), (2, 0, 1)):
        x = (D[i, j] + D[i, l] - D[j, l]) / 2
        if x < 0:
            raise NonAdditiveError(f"negative pendant length {x} for leaf {i}", (0, 1, 2))
        adj[i][centre] = adj[centre][i] = x

    for l in range(3, k):
        best_j, best = None, None
        for j in range(1, l):
            a = (D[0, l] + D[0, j] - D[j, l]) / 2
            if best is None or a > best:
                best_j, best = j, a
        pend = D[0, l] - best
        if best < 0 or pend < 0 or best > D[0, best_j]:
            raise NonAdditiveError(
                f"leaf {l} cannot be placed against leaves 0 and {best_j}", (0, best_j, l))
        path = _path(adj, 0, best_j)
        lo = Fraction(0)
        anchor = None
        for u, v in zip(path, path[1:]):
            hi = lo + adj[u][v]
            if best == lo and u != 0:
                anchor = u
                break
            if lo <= best < hi or (best == hi and v == best_j):
                anchor = nxt
                nxt += 1
                _subdivide(adj, u, v, best - lo, anchor)
                break
            lo = hi
        assert anchor is not None
        adj[l][anchor] = adj[anchor][l] = pend

    edges = [(u, v, ln) for u, nb in adj.items() for v, ln in nb.items() if u < v]
    tree = MetricTree(edges, {i: i for i in range(k)}).contracted()
    if distance_matrix(tree) != D:
        raise NonAdditiveError("distances are not realised by any metric tree")
    return tree


@dataclass
class InjectivityReport:
    k: int
    trials: int
    seed: int
    pairs: int = 0
    collisions: list[tuple[str, str]] = field(default_factory=list)
    roundtrips: int = 0
    roundtrip_failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.collisions and not self.roundtrip_failures


def verify_injectivity(k: int, trials: int, seed: int, denom_bound: int = 8) -> InjectivityReport:
    """Sample pairs of distinct random trees; their distance matrices must
    differ and each must reconstruct to itself.  Trial ``t`` is seeded with
    ``seed + t``."""
    if not 4 <= k <= limit(8):
        raise BoundsError(f"k must be in 4..{limit(8)}, got {k}")
    rep = InjectivityReport(k, trials, seed)
    for t in range(trials):
        rng = random.Random(seed + t)
        t1 = random_tree(k, rng.getrandbits(32), denom_bound)
        t2 = t1
        while t2 == t1:
            t2 = random_tree(k, rng.getrandbits(32), denom_bound)
        d1, d2 = distance_matrix(t1), distance_matrix(t2)
        rep.pairs += 1
        if d1 == d2:
            rep.collisions.append((to_newick(t1), to_newick(t2)))
        for tree, d in ((t1, d1), (t2, d2)):
            try:
                back = reconstruct(d)
            except NonAdditiveError:
                back = None
            if back == tree:
                rep.roundtrips += 1
            else:
                rep.roundtrip_failures.append(to_newick(tree))
    return rep
