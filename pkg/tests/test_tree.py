import itertools
from fractions import Fraction
from math import prod

import pytest
from hypothesis import given, settings

from conftest import Q_NEWICK, Q_edges, trees
from tropdissim.newick import NewickError, format_length, parse_newick, to_newick
from tropdissim.tree import (InvalidTreeError, MetricTree, Split, enumerate_topologies,
                             random_tree)
from tropdissim._bounds import BoundsError


def double_factorial(k):
    return prod(range(k, 0, -2))


# -- parsing -----------------------------------------------------------------


def test_parse_quartet(Q):
    assert Q.n == 3
    e = Q_edges(Q)
    assert set(e.values()) == {tuple(sorted(x)) for x in Q.edges}
    assert all(Q.length(x) == 1 for x in e.values())
    assert len(Q.internal_vertices) == 2
    assert Q.is_trivalent()


def test_parse_suppresses_degree_two():
    t = parse_newick("(0:1,(1:2):3,2:1);")
    root = t.neighbors(0)[0]
    assert t.length((1, root)) == 5
    assert len(t.edges) == 3


def test_parse_rooted_binary_root_is_suppressed():
    t = parse_newick("((0:1,1:1):2,(2:1,3:1):3);")
    assert t == parse_newick("(0:1,1:1,(2:1,3:1):5);")


@pytest.mark.parametrize("text, fragment", [
    ("(0:1,1:1,3:1);", "0..n"),
    ("(0:1,1:1,1:1);", "duplicate"),
    ("(0:1,a:1,2:1);", "not a nonnegative integer"),
    ("(0:1,1:-1,2:1);", "negative"),
    ("(0:1,1:1,2:1)", "expected ';'"),
    ("(0:1,1:1 2:1);", "expected ',' or ')'"),
    ("(0:1,1:1,2:1);x", "trailing"),
    ("(0:1,1:,2:1);", "missing branch length"),
    ("(0:1,1:1/0,2:1);", "bad branch length"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(NewickError, match=fragment.replace("(", r"\(").replace(")", r"\)")):
        parse_newick(text)


def test_syntax_error_reports_position():
    with pytest.raises(NewickError) as info:
        parse_newick("(0:1,1:1 2:1);")
    assert info.value.pos == 9


def test_exact_lengths():
    t = parse_newick("(0:0.1,1:5/4,2:1e-2);")
    assert sorted(t.length((i, t.neighbors(i)[0])) for i in range(3)) == \
        [Fraction(1, 100), Fraction(1, 10), Fraction(5, 4)]


def test_whitespace_and_internal_labels_ignored():
    t = parse_newick(" ( (0 : 1 , 1:1 ) 95 : 1 ,\n 2:1, 3:1 ) ; ")
    assert t == parse_newick(Q_NEWICK)


# -- serialization -----------------------------------------------------------


def test_to_newick_canonical(Q):
    assert to_newick(Q) == "(0:1,1:1,(2:1,3:1):1);"
    assert parse_newick(to_newick(Q)) == Q


def test_to_newick_ignores_input_order(Q):
    swapped = parse_newick("(3:1,2:1,(1:1,0:1):1);")
    assert to_newick(swapped) == to_newick(Q)


def test_to_newick_rational_lengths():
    t = parse_newick("(0:1/3,1:0.25,2:7/2);")
    assert to_newick(t) == "(0:1/3,1:0.25,2:3.5);"


@pytest.mark.parametrize("x, s", [
    (Fraction(1), "1"), (Fraction(5, 4), "1.25"), (Fraction(1, 3), "1/3"),
    (Fraction(0), "0"), (Fraction(7, 40), "0.175"), (Fraction(22, 7), "22/7"),
])
def test_format_length(x, s):
    assert format_length(x) == s
    assert Fraction(s) == x


@settings(max_examples=60)
@given(trees(3, 9))
def test_parse_serialize_idempotent(t):
    once = parse_newick(to_newick(t))
    assert once == t
    assert to_newick(parse_newick(to_newick(once))) == to_newick(once)


# -- splits ------------------------------------------------------------------


def test_split_of_edge(Q):
    e = Q_edges(Q)
    assert Q.split_of_edge(e["BA"]) == Split((0, 1), (2, 3))
    assert Q.split_of_edge(e["0B"]) == Split((0,), (1, 2, 3))
    assert Q.split_of_edge(e["2A"]) == Split((0, 1, 3), (2,))


def test_leaves_behind(Q):
    e = Q_edges(Q)
    assert Q.leaves_behind(e["BA"]) == (2, 3)
    assert Q.leaves_behind(e["0B"]) == (1, 2, 3)
    assert Q.leaves_behind(e["1B"]) == (1,)


def test_edge_orientation_does_not_matter(Q):
    u, v = Q_edges(Q)["BA"]
    assert Q.leaves_behind((v, u)) == Q.leaves_behind((u, v))


@settings(max_examples=60)
@given(trees(3, 9))
def test_leaves_behind_is_the_block_without_root(t):
    for e in t.edges:
        behind = t.leaves_behind(e)
        assert 0 not in behind
        split = t.split_of_edge(e)
        assert split.block_b == behind
        assert sorted(split.block_a + behind) == list(t.labels)


# -- validation --------------------------------------------------------------


def test_invalid_trees():
    with pytest.raises(InvalidTreeError):
        MetricTree([(0, 1, 1)], {0: 0, 1: 1})  # n < 2
    with pytest.raises(InvalidTreeError):
        MetricTree([("a", 0, 1), ("a", 1, 1), ("a", 2, 1), (0, 1, 1)], {0: 0, 1: 1, 2: 2})
    with pytest.raises(InvalidTreeError):
        MetricTree([("a", 0, 1), ("a", 1, 1), ("a", 2, -1)], {0: 0, 1: 1, 2: 2})


def test_zero_lengths_allowed():
    t = parse_newick("(0:0,1:1,(2:0,3:1):0);")
    assert t.total_length() == 2
    assert len(t.edges) == 5
    assert len(t.contracted().edges) == 4


# -- topologies --------------------------------------------------------------


def brute_force_topology_count(k):
    """Count maximal sets of k-3 pairwise compatible nontrivial splits."""
    labels = range(k)
    splits = []
    for size in range(2, k - 1):
        for block in itertools.combinations(range(1, k), size):
            s = Split.of(set(labels) - set(block), block)
            if s.is_nontrivial():
                splits.append(s)
    splits = sorted(set(splits))
    return sum(1 for combo in itertools.combinations(splits, k - 3)
               if all(a.compatible(b) for a, b in itertools.combinations(combo, 2)))


@pytest.mark.parametrize("k", [4, 5, 6])
def test_topology_counts_match_brute_force(k):
    tops = enumerate_topologies(k)
    assert len(tops) == brute_force_topology_count(k) == double_factorial(2 * k - 5)
    assert [3, 15, 105][k - 4] == len(tops)


@pytest.mark.parametrize("k", [3, 4, 5, 6, 7])
def test_topologies_distinct_sorted_trivalent(k):
    tops = enumerate_topologies(k)
    assert len({t.splits for t in tops}) == len(tops)
    assert tops == sorted(tops, key=lambda t: t.sort_key())
    for t in tops:
        assert t.is_trivalent_on(k)
        assert all(a.compatible(b) for a, b in itertools.combinations(t.splits, 2))


def test_topology_bounds():
    with pytest.raises(BoundsError):
        enumerate_topologies(2)
    with pytest.raises(BoundsError):
        enumerate_topologies(9)


def test_topology_bound_env_override(monkeypatch):
    monkeypatch.setenv("TROPDISSIM_MAX_N", "9")
    # just the guard; do not enumerate 135135 trees
    from tropdissim._bounds import limit
    assert limit(8) == 9


# -- random trees ------------------------------------------------------------


def test_random_tree_deterministic():
    assert random_tree(4, 7, 4) == random_tree(4, 7, 4)
    assert to_newick(random_tree(6, 3, 8)) == to_newick(random_tree(6, 3, 8))


def test_random_tree_seed_matters():
    outs = {to_newick(random_tree(6, s, 4)) for s in range(10)}
    assert len(outs) > 1


def test_random_three_leaf_star():
    t = random_tree(3, 1, 1)
    assert t.n == 2 and len(t.edges) == 3
    assert all(w.denominator == 1 and 1 <= w <= 16 for _, w in t.items())


@settings(max_examples=60)
@given(trees(3, 10, denom=5))
def test_random_tree_valid_trivalent(t):
    assert t.is_trivalent()
    assert len(t.edges) == 2 * (t.n + 1) - 3
    for _, w in t.items():
        assert 0 < w <= 16 and w.denominator <= 5


def test_random_tree_topologies_cover_all():
    seen = {random_tree(5, s, 1).topology().splits for s in range(400)}
    assert len(seen) == 15


def test_relabel_roundtrip(Q):
    perm = {0: 2, 1: 0, 2: 3, 3: 1}
    inv = {v: k for k, v in perm.items()}
    assert Q.relabeled(perm).relabeled(inv) == Q
