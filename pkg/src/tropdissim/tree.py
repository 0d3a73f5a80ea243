"""Metric trees with leaves labelled ``0..n``.

Leaf 0 is the distinguished root leaf.  A :class:`MetricTree` is immutable and
always stored in normal form: unlabelled vertices of degree 1 are dropped,
unlabelled vertices of degree 2 are suppressed (their two lengths summed), and
vertices are renumbered canonically.  Leaf vertices share their label as id;
internal vertices get ids ``n+1, n+2, ...`` in preorder from the neighbour of
leaf 0, children visited in order of their smallest leaf label.  Two trees
are therefore equal exactly when they are the same metric tree.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping

from ._bounds import BoundsError, limit
from .indexsets import IndexSet

Edge = tuple[int, int]


class InvalidTreeError(ValueError):
    """The edge/label data does not describe a valid metric tree."""


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class MetricTree:
    """Leaf-labelled unrooted tree with nonnegative exact rational lengths.

    Parameters
    ----------
    edges
        Iterable of ``(u, v, length)``.  Vertex ids are any hashables; lengths
        are anything :class:`fractions.Fraction` accepts.
    labels
        Mapping from the labelled (leaf) vertices to integers ``0..n``.
    """

    def __init__(self, edges: Iterable[tuple[Hashable, Hashable, object]],
                 labels: Mapping[Hashable, int]):
        adj: dict[Hashable, dict[Hashable, Fraction]] = defaultdict(dict)
        for u, v, length in edges:
            if u == v:
                raise InvalidTreeError(f"self loop at {u!r}")
            if v in adj[u]:
                raise InvalidTreeError(f"duplicate edge {u!r}-{v!r}")
            length = Fraction(length)
            if length < 0:
                raise InvalidTreeError(f"negative length {length} on {u!r}-{v!r}")
            adj[u][v] = length
            adj[v][u] = length

        seen_labels: dict[int, Hashable] = {}
        for vert, lab in labels.items():
            if not isinstance(lab, int) or isinstance(lab, bool) or lab < 0:
                raise InvalidTreeError(f"leaf label must be a nonnegative int, got {lab!r}")
            if lab in seen_labels:
                raise InvalidTreeError(f"duplicate leaf label {lab}")
            seen_labels[lab] = vert
            adj.setdefault(vert, {})
        n = max(seen_labels, default=-1)
        if n < 2 or sorted(seen_labels) != list(range(n + 1)):
            raise InvalidTreeError(
                f"leaf labels must be exactly 0..n with n >= 2, got {sorted(seen_labels)}")

        nvert = len(adj)
        nedge = sum(len(nb) for nb in adj.values()) // 2
        if nedge != nvert - 1 or not _connected(adj):
            raise InvalidTreeError("edges do not form a tree")
        for vert, lab in labels.items():
            if len(adj[vert]) != 1:
                raise InvalidTreeError(f"leaf {lab} has degree {len(adj[vert])}, expected 1")

        _normalize(adj, set(labels))
        self.n = n
        self._lengths, self._adj = _canonical(adj, {v: lab for v, lab in labels.items()}, n)

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int, object]]) -> "MetricTree":
        """Build from integer edges where vertices ``0..n`` are the leaves.

        Every vertex of degree 1 is taken to be the leaf labelled by its id.
        """
        edges = list(edges)
        deg: dict[int, int] = defaultdict(int)
        for u, v, _ in edges:
            deg[u] += 1
            deg[v] += 1
        return cls(edges, {v: v for v, d in deg.items() if d == 1})

    # -- basic structure -------------------------------------------------

    @property
    def labels(self) -> range:
        return range(self.n + 1)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self._lengths)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self._adj))

    @property
    def internal_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in sorted(self._adj) if v > self.n)

    def length(self, e: Edge) -> Fraction:
        return self._lengths[self._check_edge(e)]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(self._adj[v])

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def is_trivalent(self) -> bool:
        return all(self.degree(v) == 3 for v in self.internal_vertices)

    def total_length(self) -> Fraction:
        return sum(self._lengths.values(), Fraction(0))

    def items(self):
        """``(edge, length)`` pairs in canonical edge order."""
        return self._lengths.items()

    def _check_edge(self, e) -> Edge:
        u, v = e
        key = _edge(u, v)
        if key not in self._lengths:
            raise KeyError(f"{e!r} is not an edge of this tree")
        return key

    # -- splits ----------------------------------------------------------

    @cached_property
    def _root_leafsets(self) -> dict[Edge, IndexSet]:
        # Hang the tree from leaf 0; each edge maps to the leaves below it.
        parent = {0: None}
        order = [0]
        for v in order:
            for w in self._adj[v]:
                if w not in parent:
                    parent[w] = v
                    order.append(w)
        below: dict[int, list[int]] = {v: ([v] if v <= self.n else []) for v in order}
        out: dict[Edge, IndexSet] = {}
        for v in reversed(order):
            p = parent[v]
            if p is None:
                continue
            out[_edge(p, v)] = tuple(sorted(below[v]))
            below[p].extend(below[v])
        return out

    def leaves_behind(self, e: Edge) -> IndexSet:
        """Labels whose path to leaf 0 runs through *e*."""
        return self._root_leafsets[self._check_edge(e)]

    def split_of_edge(self, e: Edge) -> "Split":
        """Leaf bipartition obtained by deleting *e*."""
        u, v = self._check_edge(e)
        side = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for y in self._adj[x]:
                if y in side or _edge(x, y) == (u, v):
                    continue
                side.add(y)
                stack.append(y)
        block = tuple(sorted(x for x in side if x <= self.n))
        rest = tuple(x for x in self.labels if x not in side)
        return Split.of(block, rest)

    def splits(self) -> dict[Edge, "Split"]:
        return {e: Split.of(lb, tuple(x for x in self.labels if x not in lb))
                for e, lb in self._root_leafsets.items()}

    def topology(self) -> "Topology":
        return Topology(frozenset(s for s in self.splits().values() if s.is_nontrivial()))

    # -- derived trees ---------------------------------------------------

    def scaled(self, t) -> "MetricTree":
        t = Fraction(t)
        return MetricTree.from_edges((u, v, t * w) for (u, v), w in self.items())

    def contracted(self) -> "MetricTree":
        """Contract every zero-length edge between two internal vertices."""
        merged = {v: v for v in self._adj}

        def find(v):
            while merged[v] != v:
                v = merged[v]
            return v

        for (u, v), w in self.items():
            if w == 0 and u > self.n and v > self.n:
                merged[find(v)] = find(u)
        edges = [(find(u), find(v), w) for (u, v), w in self.items() if find(u) != find(v)]
        return MetricTree(edges, {i: i for i in self.labels})

    def relabeled(self, perm: Mapping[int, int]) -> "MetricTree":
        """Apply a permutation of ``0..n`` to the leaf labels."""
        if sorted(perm) != list(self.labels) or sorted(perm.values()) != list(self.labels):
            raise ValueError("perm must be a permutation of the leaf labels")
        edges = [(("v", u), ("v", v), w) for (u, v), w in self.items()]
        return MetricTree(edges, {("v", i): perm[i] for i in self.labels})

    # -- dunder ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, MetricTree):
            return NotImplemented
        return self.n == other.n and self._lengths == other._lengths

    def __hash__(self):
        return hash((self.n, tuple(self._lengths.items())))

    def __repr__(self):
        from .newick import to_newick
        return f"MetricTree({to_newick(self)!r})"


def _connected(adj) -> bool:
    if not adj:
        return False
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(adj)


def _normalize(adj, labelled: set) -> None:
    """Drop unlabelled degree-1 vertices and suppress unlabelled degree-2 ones."""
    changed = True
    while changed:
        changed = False
        for v in list(adj):
            if v in labelled or v not in adj:
                continue
            nb = adj[v]
            if len(nb) <= 1:
                for w in nb:
                    del adj[w][v]
                del adj[v]
                changed = True
            elif len(nb) == 2:
                (a, la), (b, lb) = nb.items()
                if b in adj[a]:
                    continue  # cannot happen in a tree
                del adj[a][v]
                del adj[b][v]
                del adj[v]
                adj[a][b] = adj[b][a] = la + lb
                changed = True


def _canonical(adj, labels: Mapping, n: int):
    """Renumber vertices canonically; return (lengths by edge, adjacency)."""
    ids = {v: lab for v, lab in labels.items()}
    leaf0 = next(v for v, lab in labels.items() if lab == 0)
    root = next(iter(adj[leaf0]))

    # smallest leaf label below each vertex when hanging from root
    parent = {root: None}
    order = [root]
    for v in order:
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
    minlab: dict = {}
    for v in reversed(order):
        kids = [minlab[w] for w in adj[v] if w != parent[v]]
        own = [labels[v]] if v in labels else []
        minlab[v] = min(own + kids)

    next_id = n + 1
    stack = [root]
    while stack:
        v = stack.pop()
        if v not in ids:
            ids[v] = next_id
            next_id += 1
        kids = sorted((w for w in adj[v] if w != parent[v]), key=minlab.__getitem__)
        stack.extend(reversed(kids))

    lengths: dict[Edge, Fraction] = {}
    new_adj: dict[int, dict[int, Fraction]] = {}
    for v, nb in adj.items():
        new_adj[ids[v]] = {ids[w]: ln for w, ln in nb.items()}
        for w, ln in nb.items():
            lengths[_edge(ids[v], ids[w])] = ln
    return dict(sorted(lengths.items())), new_adj


# ---------------------------------------------------------------------------
# Splits and topologies


@dataclass(frozen=True, order=True)
class Split:
    """Leaf bipartition; ``block_a`` is the block containing label 0."""

    block_a: IndexSet
    block_b: IndexSet

    @classmethod
    def of(cls, x: Iterable[int], y: Iterable[int]) -> "Split":
        x, y = tuple(sorted(x)), tuple(sorted(y))
        if set(x) & set(y):
            raise ValueError("split blocks overlap")
        return cls(x, y) if 0 in x else cls(y, x)

    def is_nontrivial(self) -> bool:
        return len(self.block_a) >= 2 and len(self.block_b) >= 2

    def compatible(self, other: "Split") -> bool:
        """Standard compatibility: some pair of blocks is disjoint."""
        a1, b1 = set(self.block_a), set(self.block_b)
        a2, b2 = set(other.block_a), set(other.block_b)
        return not (a1 & b2) or not (b1 & a2) or not (b1 & b2) or not (a1 & a2)

    def __str__(self):
        return "{" + ",".join(map(str, self.block_a)) + "}|{" + ",".join(map(str, self.block_b)) + "}"


@dataclass(frozen=True)
class Topology:
    """Set of nontrivial splits of an (unrooted) tree shape."""

    splits: frozenset

    def sort_key(self):
        return tuple(sorted(self.splits))

    def is_trivalent_on(self, k: int) -> bool:
        return len(self.splits) == k - 3


def _insertion_trees(k: int):
    """Yield edge lists for every trivalent shape on leaves ``0..k-1``.

    Leaves are vertices ``0..k-1``; internal vertices are ``k, k+1, ...``.
    Leaf ``l`` is attached by subdividing each edge of every shape on
    ``0..l-1`` in turn.
    """
    def grow(edges, leaf, nxt):
        if leaf == k:
            yield edges
            return
        for idx, (u, v) in enumerate(edges):
            new = edges[:idx] + edges[idx + 1:] + [(u, nxt), (nxt, v), (nxt, leaf)]
            yield from grow(new, leaf + 1, nxt + 1)

    yield from grow([(0, k), (1, k), (2, k)], 3, k + 1)


def _splits_of_edges(edges, k: int) -> frozenset:
    adj = defaultdict(list)
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    parent = {0: None}
    order = [0]
    for v in order:
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
    below = {v: ({v} if v < k else set()) for v in order}
    out = set()
    for v in reversed(order):
        p = parent[v]
        if p is None:
            continue
        below[p] |= below[v]
        s = Split.of(set(range(k)) - below[v], below[v])
        if s.is_nontrivial():
            out.add(s)
    return frozenset(out)


def enumerate_topologies(k: int) -> list[Topology]:
    """All trivalent topologies on leaves ``0..k-1``, canonically ordered."""
    if not 3 <= k <= limit(8):
        raise BoundsError(f"k must be in 3..{limit(8)}, got {k}")
    found = {_splits_of_edges(edges, k) for edges in _insertion_trees(k)}
    return sorted((Topology(s) for s in found), key=Topology.sort_key)


def random_tree(k: int, seed: int, denom_bound: int = 4) -> MetricTree:
    """Random trivalent tree on leaves ``0..k-1`` with rational lengths.

    The PRNG is Python's ``random.Random(seed)`` (MT19937).  Leaves ``3..k-1``
    are attached one at a time to a uniformly chosen edge of the current tree,
    starting from the star on ``0, 1, 2``.  Each edge then receives ``p/q``
    with ``q`` uniform in ``1..denom_bound`` and ``p`` uniform in ``1..16q``,
    in edge creation order.
    """
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")
    if denom_bound < 1:
        raise ValueError(f"denom_bound must be >= 1, got {denom_bound}")
    rng = random.Random(seed)
    edges = [(0, k), (1, k), (2, k)]
    nxt = k + 1
    for leaf in range(3, k):
        u, v = edges.pop(rng.randrange(len(edges)))
        edges += [(u, nxt), (nxt, v), (nxt, leaf)]
        nxt += 1
    weighted = []
    for u, v in edges:
        q = rng.randint(1, denom_bound)
        p = rng.randint(1, 16 * q)
        weighted.append((u, v, Fraction(p, q)))
    return MetricTree.from_edges(weighted)
