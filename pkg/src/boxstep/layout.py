"""Character-cell measurement of expressions in box notation.

Atoms occupy one row of their text.  A list is drawn as a box: two
columns on each side (edge plus padding) and one row above and below the
content.  Content flows in reading order; stored gaps decide horizontal
spacing, and a line break in a gap starts a new row at the break's
stored indent, measured from the box interior.  Quote shorthand is the
exception: it draws as a ' sigil followed by the datum, with no box,
matching how it prints.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (Atom, BlockComment, Break, Expr, LineComment, ListNode,
                     Run, Space)


@dataclass(frozen=True)
class Extent:
    width: int
    height: int


@dataclass(frozen=True)
class Position:
    left: int
    top: int


# Columns and rows a box adds around its content.
EDGE = 2
TOP = 1


@dataclass(frozen=True)
class GlyphRun:
    """Visible non-node cells: comments, the dot of a dotted list, the
    quote sigil."""
    text: str


@dataclass
class Placed:
    item: "Expr | GlyphRun"
    col: int
    row: int


class Traversal:
    """Reading-order cursor over one list's content region."""

    def __init__(self):
        self.col = 0
        self.row = 0
        self.line_height = 0
        self.max_col = 0
        self.indents: list[int] = []

    def _advance(self, width: int) -> None:
        self.col += width
        self.max_col = max(self.max_col, self.col)

    def gap(self, space: Space, out: list[Placed] | None = None) -> None:
        for seg in space.segments:
            if isinstance(seg, Run):
                self._advance(len(seg.text))
            elif isinstance(seg, LineComment):
                if out is not None:
                    out.append(Placed(GlyphRun(seg.text), self.col, self.row))
                self._advance(len(seg.text))
            elif isinstance(seg, BlockComment):
                lines = seg.text.split("\n")
                if out is not None:
                    for i, line in enumerate(lines):
                        out.append(Placed(GlyphRun(line), self.col, self.row + i))
                self._advance(max(len(line) for line in lines))
                self.line_height = max(self.line_height, len(lines))
            else:
                self.row += max(self.line_height, 1)
                self.col = seg.indent
                self.max_col = max(self.max_col, self.col)
                self.line_height = 0
                self.indents.append(seg.indent)

    def glyph(self, text: str, out: list[Placed] | None = None) -> None:
        if out is not None:
            out.append(Placed(GlyphRun(text), self.col, self.row))
        self._advance(len(text))
        self.line_height = max(self.line_height, 1)

    def child(self, e: Expr, out: list[Placed] | None = None) -> None:
        ext = extent(e)
        if out is not None:
            out.append(Placed(e, self.col, self.row))
        self._advance(ext.width)
        self.line_height = max(self.line_height, ext.height)


def _place(node: ListNode) -> tuple[list[Placed], Extent]:
    """Content-local placement of a list's children and visible gap
    glyphs, plus the content bounding box."""
    t = Traversal()
    out: list[Placed] = []

    if node.shorthand:
        t.glyph("'", out)
        t.gap(node.gaps[1], out)
        t.child(node.children[1], out)
        return out, Extent(t.max_col, t.row + max(t.line_height, 1))

    for i, child in enumerate(node.children):
        t.gap(node.gaps[i], out)
        t.child(child, out)
    gap_index = len(node.children)
    if node.tail is not None:
        t.gap(node.gaps[gap_index], out)
        t.glyph(".", out)
        t.gap(node.gaps[gap_index + 1], out)
        t.child(node.tail, out)
        gap_index += 2
    t.gap(node.gaps[gap_index], out)
    return out, Extent(t.max_col, t.row + max(t.line_height, 1))


def extent(e: Expr) -> Extent:
    if isinstance(e, Atom):
        return Extent(len(e.text), 1)
    _, content = _place(e)
    if e.shorthand:
        return content
    return Extent(content.width + 2 * EDGE, content.height + 2 * TOP)


def interior_origin(e: ListNode) -> Position:
    if e.shorthand:
        return Position(0, 0)
    return Position(EDGE, TOP)


def measure_positions(root: Expr) -> dict[int, Position]:
    """Top-left cell of every descendant node, relative to root's (0,0).
    A shorthand node's quote atom maps to the sigil cell."""
    positions: dict[int, Position] = {}

    def walk(node: Expr, left: int, top: int) -> None:
        positions[node.id] = Position(left, top)
        if isinstance(node, Atom):
            return
        items, _ = _place(node)
        inner = interior_origin(node)
        if node.shorthand:
            positions[node.children[0].id] = Position(left, top)
        for placed in items:
            if isinstance(placed.item, GlyphRun):
                continue
            walk(placed.item, left + inner.left + placed.col,
                 top + inner.top + placed.row)

    walk(root, 0, 0)
    return positions


def glyph_placements(root: Expr) -> dict[int, list[tuple[str, int, int]]]:
    """Per list node: its visible gap glyphs (comments, dot, sigil) at
    absolute cell positions."""
    runs: dict[int, list[tuple[str, int, int]]] = {}

    def walk(node: Expr, left: int, top: int) -> None:
        if isinstance(node, Atom):
            return
        items, _ = _place(node)
        inner = interior_origin(node)
        mine: list[tuple[str, int, int]] = []
        for placed in items:
            col = left + inner.left + placed.col
            row = top + inner.top + placed.row
            if isinstance(placed.item, GlyphRun):
                mine.append((placed.item.text, col, row))
            else:
                walk(placed.item, col, row)
        runs[node.id] = mine

    walk(root, 0, 0)
    return runs


def traverse(node: ListNode, visit) -> None:
    """Visit gap, child, gap, child, ..., final gap in reading order,
    with a Traversal whose cursor advances as each item is passed."""
    t = Traversal()
    for i, child in enumerate(node.children):
        visit(node.gaps[i], t)
        t.gap(node.gaps[i])
        visit(child, t)
        t.child(child)
    gap_index = len(node.children)
    if node.tail is not None:
        visit(node.gaps[gap_index], t)
        t.gap(node.gaps[gap_index])
        t.glyph(".")
        visit(node.gaps[gap_index + 1], t)
        t.gap(node.gaps[gap_index + 1])
        visit(node.tail, t)
        t.child(node.tail)
        gap_index += 2
    visit(node.gaps[gap_index], t)
    t.gap(node.gaps[gap_index])
