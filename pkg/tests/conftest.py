import pytest
from hypothesis import strategies as st

from tropdissim import parse_newick, random_tree

Q_NEWICK = "((0:1,1:1):1,2:1,3:1);"


@pytest.fixture
def Q():
    """Quartet: internal B joins 0 and 1, internal A joins 2 and 3."""
    return parse_newick(Q_NEWICK)


def Q_edges(tree):
    """Name Q's edges the way the hand computations do."""
    B = tree.neighbors(0)[0]
    A = tree.neighbors(2)[0]
    return {"0B": (0, B), "1B": (1, B), "BA": (B, A), "2A": (2, A), "3A": (3, A)}


def trees(min_leaves=4, max_leaves=8, denom=8):
    return st.builds(random_tree,
                     st.integers(min_leaves, max_leaves),
                     st.integers(0, 2**32 - 1),
                     st.just(denom))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for an acceptance criterion."""
    def record(label: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
