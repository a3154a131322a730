"""Tweened rendering between two expressions one reduction step apart.

The terminal has no transparency, so a morph is drawn as two layers: the
final tree fading in and the initial tree fading out, each node gliding
along the straight line between its two measured positions.  Up to
progress 0.5 the initial layer is drawn last (on top); past 0.5 the
order flips.  Cells overwrite at equal-or-higher intensity, so the
endpoints come out cell-identical to the static renders.
"""

from __future__ import annotations

from dataclasses import dataclass

from .layout import Extent, Position, extent, glyph_placements, measure_positions
from .render import (CellGrid, GridPainter, UNICODE_STYLE, BoxStyle,
                     draw_expression)
from .syntax import Atom, Expr, ListNode, structural_equal


def lerp(start: float, end: float, at: float) -> float:
    return start + (end - start) * at


class Morph:
    def __init__(self, initial: Expr, final: Expr,
                 origin: dict[Expr, list[Expr]],
                 progeny: dict[Expr, list[Expr]]):
        self.initial = initial
        self.final = final
        self.origin = origin
        self.progeny = progeny
        self.progress = 0.0
        self.initial_positions = measure_positions(initial)
        self.final_positions = measure_positions(final)
        self.initial_extent = extent(initial)
        self.final_extent = extent(final)
        self.maximum_extent = Extent(
            max(self.initial_extent.width, self.final_extent.width),
            max(self.initial_extent.height, self.final_extent.height))
        self.initial_runs = glyph_placements(initial)
        self.final_runs = glyph_placements(final)

    def set_progress(self, value: float) -> None:
        self.progress = min(1.0, max(0.0, value))

    def draw(self, style: BoxStyle = UNICODE_STYLE) -> CellGrid:
        return morph_draw(self, style=style)


@dataclass
class _Layer:
    """One direction of the tween: a tree, its counterpart links into the
    other tree, both position maps, and the layer's fade intensity."""
    links: dict[Expr, list[Expr]]
    src: dict[int, Position]
    tgt: dict[int, Position]
    runs: dict[int, list[tuple[str, int, int]]]
    intensity: float

    @property
    def q(self) -> float:
        # How far along the src -> tgt glide this layer is drawn.
        return 1.0 - self.intensity


def morph_draw(m: Morph, painter: GridPainter | None = None,
               style: BoxStyle = UNICODE_STYLE) -> CellGrid:
    if painter is None:
        grid = CellGrid(m.maximum_extent.width, m.maximum_extent.height)
        painter = GridPainter(grid, style)
    p = m.progress
    initial_layer = _Layer(m.progeny, m.initial_positions, m.final_positions,
                           m.initial_runs, 1.0 - p)
    final_layer = _Layer(m.origin, m.final_positions, m.initial_positions,
                         m.final_runs, p)
    if p <= 0.5:
        draw_tween(m.final, final_layer, painter)
        draw_tween(m.initial, initial_layer, painter)
    else:
        draw_tween(m.initial, initial_layer, painter)
        draw_tween(m.final, final_layer, painter)
    return painter.grid


def draw_tween(expr: Expr, layer: _Layer, painter: GridPainter,
               only_with_relatives: bool = False) -> None:
    """Draw one node of the layer's tree: morphing toward each
    counterpart it has in the other tree, or fading in place when it has
    none."""
    links = layer.links.get(expr)
    if links is None:
        links = [expr]
    usable = [c for c in links if c.id in layer.tgt]
    if not usable:
        if not only_with_relatives:
            here = layer.src[expr.id]
            draw_emerging(expr, here, layer.intensity, painter)
            if isinstance(expr, ListNode):
                _draw_runs(layer.runs[expr.id], 0.0, 0.0, layer.intensity,
                           painter)
        if isinstance(expr, ListNode):
            for child in _child_nodes(expr):
                draw_tween(child, layer, painter, only_with_relatives)
        return
    for counterpart in usable:
        draw_morph(expr, counterpart, layer, painter, only_with_relatives)


def draw_morph(fg: Expr, bg: Expr, layer: _Layer, painter: GridPainter,
               only_with_relatives: bool) -> None:
    q = layer.q
    src = layer.src[fg.id]
    tgt = layer.tgt[bg.id]
    x = lerp(src.left, tgt.left, q)
    y = lerp(src.top, tgt.top, q)

    if structural_equal(fg, bg) and _same_spelling(fg, bg):
        if only_with_relatives and fg is bg:
            return
        with painter.translate(x, y):
            draw_expression(fg, painter)
        return

    if isinstance(fg, ListNode) and isinstance(bg, ListNode):
        e0 = extent(fg)
        e1 = extent(bg)
        if not only_with_relatives:
            # Geometry present at both endpoints glides at full
            # intensity; a box morphing into a quote sigil (or back)
            # instead fades with its layer so neither endpoint shows
            # leftovers.
            own = 1.0 if fg.shorthand == bg.shorthand else layer.intensity
            with painter.with_intensity(own):
                with painter.translate(x, y):
                    if fg.shorthand:
                        painter.draw_text("'")
                    else:
                        painter.draw_box(lerp(e0.width, e1.width, q),
                                         lerp(e0.height, e1.height, q))
            _draw_runs(layer.runs[fg.id], x - src.left, y - src.top,
                       layer.intensity, painter)
        for child in _child_nodes(fg):
            draw_tween(child, layer, painter, only_with_relatives)
        return

    # Tile crossfade: the two sides share an interpolated footprint, the
    # background fading in as the foreground fades out.
    e0 = extent(fg)
    e1 = extent(bg)
    width = lerp(e0.width, e1.width, q)
    height = lerp(e0.height, e1.height, q)
    with painter.with_intensity(q):
        with painter.translate(x, y):
            with painter.with_stretch(width / e1.width, height / e1.height):
                draw_expression(bg, painter)
    with painter.with_intensity(1.0 - q):
        with painter.translate(x, y):
            with painter.with_stretch(width / e0.width, height / e0.height):
                draw_expression(fg, painter)
    if isinstance(fg, ListNode):
        for child in _child_nodes(fg):
            draw_tween(child, layer, painter, only_with_relatives=True)


def draw_emerging(expr: Expr, where: Position, intensity: float,
                  painter: GridPainter) -> None:
    """A node with no counterpart: its own outline (lists) or glyphs
    (atoms), fading in place."""
    with painter.with_intensity(intensity):
        with painter.translate(where.left, where.top):
            if isinstance(expr, Atom):
                painter.draw_text(expr.text)
            elif expr.shorthand:
                painter.draw_text("'")
            else:
                ext = extent(expr)
                painter.draw_box(ext.width, ext.height)


def _draw_runs(runs: list[tuple[str, int, int]], dx: float, dy: float,
               intensity: float, painter: GridPainter) -> None:
    with painter.with_intensity(intensity):
        for text, col, row in runs:
            with painter.translate(col + dx, row + dy):
                painter.draw_text(text)


def _same_spelling(fg: Expr, bg: Expr) -> bool:
    """Structurally equal nodes can still be spelled differently (other
    gaps, quote shorthand); a full-intensity glide is only safe when the
    two draw identically."""
    if isinstance(fg, Atom) or isinstance(bg, Atom):
        return True
    return fg.shorthand == bg.shorthand and extent(fg) == extent(bg)


def _child_nodes(node: ListNode):
    # The quote atom of a shorthand node is shown as the sigil, which is
    # part of the node's own geometry; it is never drawn as text.
    children = node.children[1:] if node.shorthand else node.children
    yield from children
    if node.tail is not None:
        yield node.tail
