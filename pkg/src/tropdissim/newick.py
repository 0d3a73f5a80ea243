"""Newick reading and canonical writing for :class:`MetricTree`.

Supported grammar::

    tree    := subtree ";"
    subtree := leaf | "(" subtree ("," subtree)* ")" [label] [":" length]
    leaf    := integer [":" length]

Leaf names must be nonnegative integers.  Internal labels (support values and
the like) are read and discarded.  Lengths may be decimals (``1.25``) or
rationals (``5/4``) and are parsed exactly; a missing length means 0.
Single-child groups are accepted and the resulting degree-2 vertex is
suppressed during normalisation.
"""

from __future__ import annotations

from fractions import Fraction

from .tree import InvalidTreeError, MetricTree

_DELIMS = set("(),:;")


class NewickError(ValueError):
    """Malformed Newick text or an invalid tree described by it."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.edges: list[tuple[int, int, Fraction]] = []
        self.labels: dict[int, int] = {}
        self.next_id = 0

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise NewickError(f"expected {ch!r}, found {found!r}", self.pos)
        self.pos += 1

    def token(self) -> tuple[str, int]:
        self.skip_ws()
        start = self.pos
        while (self.pos < len(self.text) and self.text[self.pos] not in _DELIMS
               and not self.text[self.pos].isspace()):
            self.pos += 1
        return self.text[start:self.pos], start

    def new_vertex(self) -> int:
        self.next_id += 1
        return self.next_id - 1

    def length(self) -> Fraction:
        if self.peek() != ":":
            return Fraction(0)
        self.pos += 1
        tok, start = self.token()
        if not tok:
            raise NewickError("missing branch length after ':'", start)
        try:
            value = Fraction(tok)
        except (ValueError, ZeroDivisionError):
            raise NewickError(f"bad branch length {tok!r}", start) from None
        if value < 0:
            raise NewickError(f"negative branch length {tok}", start)
        return value

    def subtree(self) -> tuple[int, Fraction]:
        """Parse one subtree; return its top vertex and the length above it."""
        if self.peek() == "(":
            self.pos += 1
            v = self.new_vertex()
            while True:
                child, ln = self.subtree()
                self.edges.append((v, child, ln))
                ch = self.peek()
                if ch == ",":
                    self.pos += 1
                elif ch == ")":
                    self.pos += 1
                    break
                else:
                    raise NewickError(f"expected ',' or ')', found {ch or 'end of input'!r}", self.pos)
            self.token()  # internal label, ignored
            return v, self.length()

        tok, start = self.token()
        if not tok:
            found = self.peek() or "end of input"
            raise NewickError(f"expected a leaf label, found {found!r}", start)
        if not tok.isdigit():
            raise NewickError(f"leaf label {tok!r} is not a nonnegative integer", start)
        label = int(tok)
        if label in self.labels.values():
            raise NewickError(f"duplicate leaf label {label}", start)
        v = self.new_vertex()
        self.labels[v] = label
        return v, self.length()

    def parse(self) -> MetricTree:
        self.subtree()
        self.expect(";")
        if self.peek():
            raise NewickError("trailing text after ';'", self.pos)
        try:
            return MetricTree(self.edges, self.labels)
        except InvalidTreeError as exc:
            raise NewickError(str(exc)) from None


def parse_newick(text: str) -> MetricTree:
    """Parse Newick *text* into a normalised :class:`MetricTree`."""
    return _Parser(text).parse()


def format_length(x: Fraction) -> str:
    """Exact decimal when the expansion terminates, else ``p/q``."""
    x = Fraction(x)
    q = x.denominator
    twos = fives = 0
    while q % 2 == 0:
        q //= 2
        twos += 1
    while q % 5 == 0:
        q //= 5
        fives += 1
    if q != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(x.numerator)
    scaled = x.numerator * 10 ** digits // x.denominator
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}".rstrip("0").rstrip(".")


def to_newick(tree: MetricTree) -> str:
    """Canonical Newick: rooted at the neighbour of leaf 0, children ordered
    by their smallest leaf label."""
    root = tree.neighbors(0)[0]
    minlab: dict[int, int] = {}

    def smallest(v: int, parent: int | None) -> int:
        if v not in minlab:
            kids = [smallest(w, v) for w in tree.neighbors(v) if w != parent]
            minlab[v] = min(kids + ([v] if v <= tree.n else []))
        return minlab[v]

    def render(v: int, parent: int | None) -> str:
        if v <= tree.n:
            body = str(v)
        else:
            kids = sorted((w for w in tree.neighbors(v) if w != parent),
                          key=lambda w: smallest(w, v))
            body = "(" + ",".join(render(w, v) for w in kids) + ")"
        if parent is None:
            return body
        return f"{body}:{format_length(tree.length((v, parent)))}"

    return render(root, None) + ";"
