"""Steiner hulls and dissimilarity vectors of metric trees.

The hull of a leaf set is found by repeatedly pruning pendant vertices that
are not in the set.  This deliberately avoids the rooted leaf sets used by
:mod:`tropdissim.branching`, so the two modules check each other.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .indexsets import IndexSet, frac_str, index_set, key_str, parse_key
from .tableaux import Tableau, validate_ssyt
from .tree import Edge, MetricTree


def _check_labels(tree: MetricTree, X: Iterable[int]) -> IndexSet:
    X = index_set(X)
    bad = [x for x in X if not 0 <= x <= tree.n]
    if bad:
        raise ValueError(f"unknown leaf label(s) {bad}; tree has labels 0..{tree.n}")
    return X


def steiner_hull(tree: MetricTree, X: Iterable[int]) -> frozenset[Edge]:
    """Edges of the smallest subtree containing the leaves *X*."""
    X = _check_labels(tree, X)
    if not X:
        raise ValueError("hull of an empty leaf set is undefined")
    keep = set(X)
    alive = {v: set(tree.neighbors(v)) for v in tree.vertices}
    stack = [v for v, nb in alive.items() if len(nb) == 1 and v not in keep]
    while stack:
        v = stack.pop()
        if len(alive[v]) != 1:
            continue
        (w,) = alive[v]
        alive[v].clear()
        alive[w].discard(v)
        if len(alive[w]) == 1 and w not in keep:
            stack.append(w)
    return frozenset((u, v) for u, nb in alive.items() for v in nb if u < v)


def d_sigma(tree: MetricTree, sigma: Iterable[int]) -> Fraction:
    """Total length of the hull of *sigma*."""
    sigma = _check_labels(tree, sigma)
    if len(sigma) < 2:
        raise ValueError(f"dissimilarity needs at least two leaves, got {sigma}")
    return sum((tree.length(e) for e in steiner_hull(tree, sigma)), Fraction(0))


def rooted_dissimilarity(tree: MetricTree, sigma: Iterable[int]) -> Fraction:
    """``d_{0,sigma}``: dissimilarity of ``sigma`` together with leaf 0."""
    sigma = _check_labels(tree, sigma)
    if 0 in sigma:
        raise ValueError("sigma must not contain the root label 0")
    if not sigma:
        raise ValueError("sigma must be nonempty")
    return d_sigma(tree, (0,) + sigma)


def tableau_dissimilarity(tree: MetricTree, T: Tableau) -> Fraction:
    """Sum of the rooted dissimilarities of the columns of *T*."""
    if not validate_ssyt(T, tree.n):
        raise ValueError(f"{T} is not a semistandard tableau with entries in 1..{tree.n}")
    return sum((rooted_dissimilarity(tree, c) for c in T.columns), Fraction(0))


@dataclass(frozen=True)
class DissimVector:
    """Dissimilarities keyed by sorted leaf sets.

    For a rooted vector, ``m`` counts the non-root leaves and every key
    includes 0.
    """

    m: int
    entries: Mapping[IndexSet, Fraction]
    rooted: bool = False

    def __getitem__(self, key) -> Fraction:
        return self.entries[index_set(key)]

    def __len__(self):
        return len(self.entries)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sigma", "value"])
        for k, v in self.entries.items():
            w.writerow([key_str(k), frac_str(v)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({key_str(k): frac_str(v) for k, v in self.entries.items()}, indent=1)

    @classmethod
    def from_json(cls, text: str, rooted: bool = False) -> "DissimVector":
        raw = json.loads(text)
        entries = {parse_key(k): Fraction(v) for k, v in raw.items()}
        sizes = {len(k) for k in entries}
        if len(sizes) != 1:
            raise ValueError("entries have mixed sizes")
        (m,) = sizes
        return cls(m - 1 if rooted else m, dict(sorted(entries.items())), rooted)


def dissimilarity_vector(tree: MetricTree, m: int) -> DissimVector:
    """``d^m``: one entry per ``m``-subset of ``0..n``."""
    if not 2 <= m <= tree.n + 1:
        raise ValueError(f"m must be in 2..{tree.n + 1}, got {m}")
    entries = {s: d_sigma(tree, s) for s in itertools.combinations(tree.labels, m)}
    return DissimVector(m, entries)


def rooted_vector(tree: MetricTree, sizes: Iterable[int] | None = None) -> dict[IndexSet, Fraction]:
    """``{sigma: d_{0,sigma}}`` for nonempty ``sigma`` in ``1..n``.

    Keys omit the root label; restrict to ``len(sigma) in sizes`` if given.
    """
    sizes = range(1, tree.n + 1) if sizes is None else sorted(set(sizes))
    out = {}
    for k in sizes:
        for s in itertools.combinations(range(1, tree.n + 1), k):
            out[s] = rooted_dissimilarity(tree, s)
    return out


def rooted_dissimilarity_vector(tree: MetricTree, m: int) -> DissimVector:
    """Rooted components for ``|sigma| = m``, keyed by ``{0} + sigma``."""
    if not 1 <= m <= tree.n:
        raise ValueError(f"m must be in 1..{tree.n}, got {m}")
    return DissimVector(m, {(0,) + s: v for s, v in rooted_vector(tree, [m]).items()}, rooted=True)


# ---------------------------------------------------------------------------
# pairwise distances


class DistanceMatrix:
    """Symmetric, nonnegative, zero-diagonal matrix over labels ``0..k-1``."""

    def __init__(self, rows: Sequence[Sequence]):
        vals = tuple(tuple(Fraction(x) for x in r) for r in rows)
        k = len(vals)
        if any(len(r) != k for r in vals):
            raise ValueError("distance matrix must be square")
        for i in range(k):
            if vals[i][i] != 0:
                raise ValueError(f"nonzero diagonal entry at {i}")
            for j in range(i + 1, k):
                if vals[i][j] != vals[j][i]:
                    raise ValueError(f"asymmetric entries at ({i},{j})")
                if vals[i][j] < 0:
                    raise ValueError(f"negative distance at ({i},{j})")
        self.rows = vals

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, DistanceMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __repr__(self):
        return f"DistanceMatrix({[[frac_str(x) for x in r] for r in self.rows]})"

    @classmethod
    def from_pairs(cls, k: int, pairs: Mapping[tuple[int, int], object]) -> "DistanceMatrix":
        rows = [[Fraction(0)] * k for _ in range(k)]
        for i, j in itertools.combinations(range(k), 2):
            if (i, j) not in pairs:
                raise ValueError(f"missing distance for pair ({i},{j})")
            rows[i][j] = rows[j][i] = Fraction(pairs[(i, j)])
        return cls(rows)

    def pairs(self) -> dict[IndexSet, Fraction]:
        return {(i, j): self.rows[i][j] for i, j in itertools.combinations(range(self.size), 2)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(range(self.size))
        for r in self.rows:
            w.writerow(frac_str(x) for x in r)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DistanceMatrix":
        """Read a header of labels and a square body.

        The header may start with an empty cell, in which case every body row
        starts with its own label.  Labels must be a permutation of ``0..k-1``.
        """
        rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
        if not rows:
            raise ValueError("empty distance CSV")
        header = [c.strip() for c in rows[0]]
        row_labels = header and header[0] == ""
        if row_labels:
            header = header[1:]
        try:
            labels = [int(c) for c in header]
        except ValueError:
            raise ValueError(f"header labels must be integers: {header}") from None
        k = len(labels)
        if sorted(labels) != list(range(k)):
            raise ValueError(f"labels must be a permutation of 0..{k - 1}")
        body = rows[1:]
        if len(body) != k:
            raise ValueError(f"expected {k} body rows, got {len(body)}")
        order = labels
        if row_labels:
            try:
                order = [int(r[0]) for r in body]
            except ValueError:
                raise ValueError("row labels must be integers") from None
            if sorted(order) != list(range(k)):
                raise ValueError("row labels must be a permutation of the header")
            body = [r[1:] for r in body]
        grid = [[Fraction(0)] * k for _ in range(k)]
        for ri, r in zip(order, body):
            if len(r) != k:
                raise ValueError(f"row for label {ri} has {len(r)} entries, expected {k}")
            for ci, cell in zip(labels, r):
                try:
                    grid[ri][ci] = Fraction(cell.strip())
                except (ValueError, ZeroDivisionError):
                    raise ValueError(f"bad entry {cell!r}") from None
        return cls(grid)


def distance_matrix(tree: MetricTree) -> DistanceMatrix:
    """``d^2`` as a matrix."""
    d2 = dissimilarity_vector(tree, 2)
    return DistanceMatrix.from_pairs(tree.n + 1, d2.entries)


def pairwise_from_rooted(singles: Mapping[IndexSet, object],
                         pairs: Mapping[IndexSet, object]) -> DistanceMatrix:
    """Recover all pairwise distances from rooted data.

    *singles* maps ``(i,)`` to ``d_{0,i}`` and *pairs* maps ``(i, j)`` to
    ``d_{0,i,j}``, for ``1 <= i < j <= n``; then
    ``d_{i,j} = 2 d_{0,i,j} - d_{0,i} - d_{0,j}``.
    """
    d1: dict[int, Fraction] = {}
    for key, v in singles.items():
        key = tuple(key) if not isinstance(key, int) else (key,)
        if len(key) != 1 or key[0] < 1:
            raise ValueError(f"bad singleton key {key}")
        d1[key[0]] = Fraction(v)
    n = max(d1, default=0)
    if n < 2 or sorted(d1) != list(range(1, n + 1)):
        raise ValueError(f"need d_0i for every i in 1..n, got {sorted(d1)}")
    d2: dict[tuple[int, int], Fraction] = {}
    for key, v in pairs.items():
        i, j = key
        if i == j:
            raise ValueError(f"pair key ({i},{j}) repeats an index")
        d2[index_set(key)] = Fraction(v)
    out = {(0, i): d1[i] for i in range(1, n + 1)}
    for i, j in itertools.combinations(range(1, n + 1), 2):
        if (i, j) not in d2:
            raise ValueError(f"missing d_0{i}{j}")
        out[(i, j)] = 2 * d2[(i, j)] - d1[i] - d1[j]
    return DistanceMatrix.from_pairs(n + 1, out)
