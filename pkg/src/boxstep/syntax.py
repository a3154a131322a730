"""Lossless reader and printer for a small Scheme subset.

Expressions are trees of Atom and ListNode.  Every node carries a unique
NodeId so later stages can track which output node came from which input
node.  Whitespace and comments are not thrown away: each list stores one
Space per gap (before the first child, between children, around a dotted
tail, and before the closing paren), so printing reproduces the source
text byte for byte.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction


class ParseError(Exception):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str

    def __repr__(self):
        return self.name


_node_ids = itertools.count(1)


def fresh_id() -> int:
    return next(_node_ids)


# Space segments.  A Space is the stored content of one gap: a sequence of
# whitespace runs, comments, and line breaks, in source order.

@dataclass(frozen=True)
class Run:
    text: str                   # spaces/tabs, no newline


@dataclass(frozen=True)
class LineComment:
    text: str                   # ";..." without the trailing newline


@dataclass(frozen=True)
class BlockComment:
    text: str                   # "#|...|#" verbatim, may span lines


@dataclass(frozen=True)
class Break:
    indent: int                 # newline followed by this many spaces


Segment = Run | LineComment | BlockComment | Break


@dataclass(frozen=True)
class Space:
    segments: tuple[Segment, ...] = ()

    def text(self) -> str:
        # Serialization hits every gap of every tree it prints; the joined
        # text never changes, so compute it once per instance.
        cached = self.__dict__.get("_text")
        if cached is None:
            out = []
            for seg in self.segments:
                if isinstance(seg, Break):
                    out.append("\n" + " " * seg.indent)
                else:
                    out.append(seg.text)
            cached = "".join(out)
            self.__dict__["_text"] = cached
        return cached


_EMPTY_SPACE = Space(())
_PLAIN_SPACE = Space((Run(" "),))


def empty_gap() -> Space:
    return _EMPTY_SPACE


def default_gap() -> Space:
    """The gap synthesized between rewritten siblings: one plain space."""
    return _PLAIN_SPACE


class Atom:
    """A leaf: number, boolean, string, or symbol.

    text is the source spelling, value its parsed host value.  Identity
    (id) distinguishes occurrences; equality of content goes through
    structural_equal.
    """

    __slots__ = ("id", "text", "value", "lead", "trail")

    def __init__(self, text: str, value=None):
        self.id = next(_node_ids)
        self.text = text
        self.value = atom_value(text) if value is None else value

    def __repr__(self):
        return f"Atom({self.text!r})"


class ListNode:
    """A parenthesized list, possibly dotted, possibly the 'x shorthand.

    gaps has len(children) + 1 entries for a proper list (before each
    child and before the close paren) and two more when a dotted tail is
    present (before and after the dot).  A shorthand node prints as
    'datum; it still holds children [quote-atom, datum] so evaluation and
    structural comparison never special-case it.
    """

    __slots__ = ("id", "children", "tail", "shorthand", "gaps", "lead",
                 "trail")

    def __init__(self, children, tail=None, gaps=None, shorthand=False):
        self.id = next(_node_ids)
        self.children = list(children)
        self.tail = tail
        self.shorthand = shorthand
        if gaps is None:
            self.gaps = standard_gaps(len(self.children), tail is not None)
            return
        self.gaps = list(gaps)
        expected = len(self.children) + (2 if tail is not None else 0) + 1
        if len(self.gaps) != expected:
            raise ValueError(f"need {expected} gaps, got {len(self.gaps)}")

    @classmethod
    def adopting(cls, children, tail, gaps, shorthand=False):
        """Construction without the defensive copies: the caller hands
        over ownership of children and shares gaps, which are never
        mutated after construction.  Reduction rebuilds one shell per
        ancestor of the redex every step, so this path stays lean."""
        node = cls.__new__(cls)
        node.id = next(_node_ids)
        node.children = children
        node.tail = tail
        node.shorthand = shorthand
        node.gaps = gaps
        return node

    def __repr__(self):
        return f"ListNode({write(self)!r})"


Expr = Atom | ListNode


def standard_gaps(n_children: int, dotted: bool) -> list[Space]:
    """Default spacing: nothing after '(', one space between items."""
    slots = n_children + (2 if dotted else 0) + 1
    gaps = [empty_gap()]
    for _ in range(max(slots - 2, 0)):
        gaps.append(default_gap())
    if slots > 1:
        gaps.append(empty_gap())
    return gaps


_INTEGER = re.compile(r"[+-]?[0-9]+\Z")
_RATIONAL = re.compile(r"[+-]?[0-9]+/[0-9]+\Z")
_DECIMAL = re.compile(r"[+-]?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)([eE][+-]?[0-9]+)?\Z")


def atom_value(text: str):
    """Classify an atom spelling: integer, rational, decimal, boolean,
    string, anything else a symbol."""
    if _INTEGER.match(text):
        return int(text)
    if _RATIONAL.match(text):
        num, den = text.split("/")
        if int(den) == 0:
            raise ParseError(f"zero denominator: {text}")
        value = Fraction(int(num), int(den))
        return int(value) if value.denominator == 1 else value
    if _DECIMAL.match(text) and any(c in text for c in ".eE"):
        return float(text)
    if text in ("#t", "#true"):
        return True
    if text in ("#f", "#false"):
        return False
    if text.startswith('"'):
        return unescape_string(text)
    if text.startswith("#"):
        raise ParseError(f"unknown # syntax: {text}")
    return Symbol(text)


def unescape_string(text: str) -> str:
    if len(text) < 2 or not text.endswith('"'):
        raise ParseError(f"unterminated string: {text}")
    body = text[1:-1]
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            if i + 1 >= len(body):
                raise ParseError("dangling escape in string")
            nxt = body[i + 1]
            if nxt not in ('"', "\\"):
                raise ParseError(f"unsupported escape \\{nxt}")
            out.append(nxt)
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def value_text(value) -> str:
    """Spelling for a synthesized atom.  Booleans take the long spelling."""
    if value is True:
        return "#true"
    if value is False:
        return "#false"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, Symbol):
        return value.name
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return repr(value)


def make_atom(value) -> Atom:
    return Atom(value_text(value), value)


_DELIMITERS = set("()\"';")
_WHITESPACE = set(" \t\r\n")


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def read_gap(self) -> Space:
        segments = []
        while not self.at_end():
            c = self.peek()
            if c == "\n":
                self.pos += 1
                indent = 0
                while self.peek() == " ":
                    indent += 1
                    self.pos += 1
                segments.append(Break(indent))
            elif c in " \t\r":
                start = self.pos
                while self.peek() in (" ", "\t", "\r"):
                    self.pos += 1
                segments.append(Run(self.text[start:self.pos]))
            elif c == ";":
                start = self.pos
                while not self.at_end() and self.peek() != "\n":
                    self.pos += 1
                segments.append(LineComment(self.text[start:self.pos]))
            elif c == "#" and self.text.startswith("#|", self.pos):
                segments.append(BlockComment(self.read_block_comment()))
            else:
                break
        return Space(tuple(segments))

    def read_block_comment(self) -> str:
        start = self.pos
        depth = 0
        while self.pos < len(self.text):
            if self.text.startswith("#|", self.pos):
                depth += 1
                self.pos += 2
            elif self.text.startswith("|#", self.pos):
                depth -= 1
                self.pos += 2
                if depth == 0:
                    return self.text[start:self.pos]
            else:
                self.pos += 1
        raise ParseError("unterminated block comment")

    def read_expr(self) -> Expr:
        c = self.peek()
        if c == "":
            raise ParseError("unexpected end of input")
        if c == "(":
            return self.read_list()
        if c == "'":
            return self.read_quote()
        if c == ")":
            raise ParseError(f"unexpected ) at {self.pos}")
        if c == '"':
            return self.read_string()
        return self.read_token_atom()

    def read_quote(self) -> ListNode:
        self.pos += 1
        gap = self.read_gap()
        datum = self.read_expr()
        quote = Atom("quote")
        return ListNode([quote, datum],
                        gaps=[empty_gap(), gap, empty_gap()],
                        shorthand=True)

    def read_string(self) -> Atom:
        start = self.pos
        self.pos += 1
        while not self.at_end():
            c = self.text[self.pos]
            if c == "\\":
                if self.pos + 1 >= len(self.text):
                    raise ParseError("dangling escape in string")
                if self.text[self.pos + 1] not in ('"', "\\"):
                    raise ParseError(
                        f"unsupported escape \\{self.text[self.pos + 1]}")
                self.pos += 2
            elif c == '"':
                self.pos += 1
                return Atom(self.text[start:self.pos])
            else:
                self.pos += 1
        raise ParseError("unterminated string")

    def read_token_atom(self) -> Atom:
        start = self.pos
        while not self.at_end():
            c = self.peek()
            if c in _WHITESPACE or c in _DELIMITERS:
                break
            self.pos += 1
        if self.pos == start:
            raise ParseError(f"stray character {self.peek()!r} at {self.pos}")
        return Atom(self.text[start:self.pos])

    def read_list(self) -> ListNode:
        self.pos += 1
        children: list[Expr] = []
        gaps: list[Space] = []
        tail = None
        while True:
            gap = self.read_gap()
            if self.at_end():
                raise ParseError("unclosed list")
            if self.peek() == ")":
                self.pos += 1
                gaps.append(gap)
                return ListNode(children, tail=tail, gaps=gaps)
            if self.dot_ahead():
                if tail is not None or not children:
                    raise ParseError("misplaced dot")
                gaps.append(gap)
                self.pos += 1
                gaps.append(self.read_gap())
                tail = self.read_expr()
                closing = self.read_gap()
                if self.peek() != ")":
                    raise ParseError("expected ) after dotted tail")
                self.pos += 1
                gaps.append(closing)
                return ListNode(children, tail=tail, gaps=gaps)
            if tail is not None:
                raise ParseError("datum after dotted tail")
            gaps.append(gap)
            children.append(self.read_expr())

    def dot_ahead(self) -> bool:
        if self.peek() != ".":
            return False
        after = self.text[self.pos + 1] if self.pos + 1 < len(self.text) else ""
        return after == "" or after in _WHITESPACE or after in _DELIMITERS


def parse(text: str) -> Expr:
    """Read exactly one expression; trailing space/comments allowed."""
    reader = _Reader(text)
    lead = reader.read_gap()
    if reader.at_end():
        raise ParseError("no expression in input")
    expr = reader.read_expr()
    trail = reader.read_gap()
    if not reader.at_end():
        raise ParseError(f"trailing input at {reader.pos}")
    # Space around a top-level form has no gap slot of its own; remember
    # it on the node so write() can reproduce the source byte for byte.
    if lead.segments:
        expr.lead = lead
    if trail.segments:
        expr.trail = trail
    return expr


def parse_all(text: str) -> list[Expr]:
    """Read a whole file: a sequence of expressions."""
    reader = _Reader(text)
    out = []
    while True:
        reader.read_gap()
        if reader.at_end():
            return out
        out.append(reader.read_expr())


def write(expr: Expr) -> str:
    """Serialize, reproducing stored spacing byte for byte."""
    lead = getattr(expr, "lead", None)
    trail = getattr(expr, "trail", None)
    prefix = lead.text() if lead is not None else ""
    suffix = trail.text() if trail is not None else ""
    return prefix + _write(expr) + suffix


def _write(expr: Expr) -> str:
    # One flat pass over the tree: pending mixes nodes to expand with text
    # already settled, so deep nesting costs neither interpreter stack nor
    # re-joining the same characters at every enclosing level.
    out: list[str] = []
    append = out.append
    pending: list = [expr]
    while pending:
        item = pending.pop()
        if type(item) is str:
            append(item)
        elif type(item) is Atom:
            append(item.text)
        elif item.shorthand:
            append("'" + item.gaps[1].text())
            pending.append(item.children[1])
        else:
            append("(")
            parts: list = []
            for gap, child in zip(item.gaps, item.children):
                text = gap.text()
                if text:
                    parts.append(text)
                parts.append(child)
            if item.tail is not None:
                parts.append(item.gaps[len(item.children)].text())
                parts.append(".")
                parts.append(item.gaps[len(item.children) + 1].text())
                parts.append(item.tail)
            text = item.gaps[-1].text()
            if text:
                parts.append(text)
            parts.append(")")
            parts.reverse()
            pending.extend(parts)
    return "".join(out)


def structural_equal(a: Expr, b: Expr) -> bool:
    """Shape and atom values match; NodeIds and spacing are ignored."""
    if isinstance(a, Atom) and isinstance(b, Atom):
        return atom_equal(a.value, b.value)
    if isinstance(a, ListNode) and isinstance(b, ListNode):
        if len(a.children) != len(b.children):
            return False
        if (a.tail is None) != (b.tail is None):
            return False
        for x, y in zip(a.children, b.children):
            if not structural_equal(x, y):
                return False
        if a.tail is not None and not structural_equal(a.tail, b.tail):
            return False
        return True
    return False


def atom_equal(x, y) -> bool:
    """Value equality that keeps #t, 1, 1.0, and "1" all distinct."""
    if isinstance(x, bool) or isinstance(y, bool):
        return x is y
    if isinstance(x, Symbol) or isinstance(y, Symbol):
        return x == y
    if isinstance(x, str) or isinstance(y, str):
        return type(x) is type(y) and x == y
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        return type(x) is type(y) and x == y
    if isinstance(x, float) and isinstance(y, float):
        return x == y
    return False
