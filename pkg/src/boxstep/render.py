"""Terminal cell-grid rendering of expressions in box notation.

The painter contract mirrors a tiny subset of a 2D canvas: translate,
intensity, stretch, boxes, text.  Terminals have no alpha, so intensity
quantizes to four levels and the draw order (see morph) is arranged so
that overwriting at equal-or-higher level looks right.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass

from .layout import GlyphRun, extent, interior_origin, _place
from .syntax import Atom, Expr

INVISIBLE, FAINT, DIM, NORMAL = 0, 1, 2, 3

_LEVEL_CHARS = "ifdn"


def intensity_quantize(i: float) -> int:
    if i < 0.05:
        return INVISIBLE
    if i < 0.35:
        return FAINT
    if i < 0.7:
        return DIM
    return NORMAL


@dataclass(frozen=True)
class BoxStyle:
    top_left: str
    top_right: str
    bottom_left: str
    bottom_right: str
    vertical: str


UNICODE_STYLE = BoxStyle("╭", "╮", "╰", "╯", "│")
ASCII_STYLE = BoxStyle("+", "+", "+", "+", "|")


def style_named(name: str) -> BoxStyle:
    if name == "ascii":
        return ASCII_STYLE
    return UNICODE_STYLE


class CellGrid:
    """Fixed-size glyph grid with one intensity level per cell.  Later
    draws at equal or higher level overwrite; invisible draws nothing;
    out-of-range cells are clipped."""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.glyphs = [[" "] * width for _ in range(height)]
        self.levels = [[INVISIBLE] * width for _ in range(height)]

    def put(self, col: int, row: int, ch: str, level: int) -> None:
        if level == INVISIBLE:
            return
        if 0 <= col < self.width and 0 <= row < self.height:
            if level >= self.levels[row][col]:
                self.glyphs[row][col] = ch
                self.levels[row][col] = level

    def row_text(self, row: int) -> str:
        return "".join(self.glyphs[row])

    def to_text(self) -> str:
        return "\n".join(self.row_text(r) for r in range(self.height))

    def to_attributed(self) -> str:
        rows = []
        for r in range(self.height):
            attrs = "".join(_LEVEL_CHARS[level] for level in self.levels[r])
            rows.append(attrs + "|" + self.row_text(r))
        return "\n".join(rows)

    def crop(self, width: int, height: int) -> "CellGrid":
        out = CellGrid(min(width, self.width), min(height, self.height))
        for r in range(out.height):
            out.glyphs[r] = self.glyphs[r][:out.width]
            out.levels[r] = self.levels[r][:out.width]
        return out

    def blank_outside(self, width: int, height: int) -> bool:
        for r in range(self.height):
            for c in range(self.width):
                if (r >= height or c >= width) and self.glyphs[r][c] != " ":
                    return False
        return True


def _round_cell(x: float) -> int:
    return math.floor(x + 0.5)


class GridPainter:
    """Painter over a CellGrid.  Transform state nests: translate moves
    the origin, with-intensity multiplies, with-stretch multiplies; each
    block restores the previous state exactly."""

    def __init__(self, grid: CellGrid, style: BoxStyle = UNICODE_STYLE):
        self.grid = grid
        self.style = style
        self.ox = 0.0
        self.oy = 0.0
        self.intensity = 1.0
        self.sx = 1.0
        self.sy = 1.0

    @contextmanager
    def translate(self, dx: float, dy: float):
        self.ox += dx
        self.oy += dy
        try:
            yield self
        finally:
            self.ox -= dx
            self.oy -= dy

    @contextmanager
    def with_intensity(self, i: float):
        saved = self.intensity
        self.intensity = saved * i
        try:
            yield self
        finally:
            self.intensity = saved

    @contextmanager
    def with_stretch(self, sx: float, sy: float):
        saved = (self.sx, self.sy)
        self.sx *= sx
        self.sy *= sy
        try:
            yield self
        finally:
            self.sx, self.sy = saved

    def draw_text(self, s: str) -> None:
        level = intensity_quantize(self.intensity)
        if level == INVISIBLE:
            return
        if self.sx != 1.0:
            s = s[:math.ceil(len(s) * self.sx)]
        col = _round_cell(self.ox)
        row = _round_cell(self.oy)
        for k, ch in enumerate(s):
            if ch != " ":
                self.grid.put(col + k, row, ch, level)

    def draw_box(self, width: int, height: int) -> None:
        level = intensity_quantize(self.intensity)
        if level == INVISIBLE:
            return
        w = max(1, _round_cell(width * self.sx))
        h = max(1, _round_cell(height * self.sy))
        col = _round_cell(self.ox)
        row = _round_cell(self.oy)
        st = self.style
        self.grid.put(col, row, st.top_left, level)
        self.grid.put(col + w - 1, row, st.top_right, level)
        self.grid.put(col, row + h - 1, st.bottom_left, level)
        self.grid.put(col + w - 1, row + h - 1, st.bottom_right, level)
        for r in range(row + 1, row + h - 1):
            self.grid.put(col, r, st.vertical, level)
            self.grid.put(col + w - 1, r, st.vertical, level)


def draw_expression(e: Expr, painter: GridPainter) -> None:
    """Static draw of a whole expression at the painter's origin."""
    if isinstance(e, Atom):
        painter.draw_text(e.text)
        return
    ext = extent(e)
    if not e.shorthand:
        painter.draw_box(ext.width, ext.height)
    items, _ = _place(e)
    inner = interior_origin(e)
    for placed in items:
        with painter.translate(inner.left + placed.col, inner.top + placed.row):
            if isinstance(placed.item, GlyphRun):
                painter.draw_text(placed.item.text)
            else:
                draw_expression(placed.item, painter)


def render_static(e: Expr, style: BoxStyle = UNICODE_STYLE) -> CellGrid:
    ext = extent(e)
    grid = CellGrid(ext.width, ext.height)
    draw_expression(e, GridPainter(grid, style))
    return grid
