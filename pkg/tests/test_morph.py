from __future__ import annotations

import math

from boxstep import (ASCII_STYLE, EvaluationContext, Extent, Morph, Position,
                     UNICODE_STYLE, lerp, load_prelude, measure_positions,
                     morph_draw, parse, parse_all, reduce_step, render_static)
from boxstep.morph import _same_spelling, draw_emerging
from boxstep.render import DIM, FAINT, NORMAL, CellGrid, GridPainter


def step_morph(source: str, prelude: str = "") -> Morph:
    ctx = EvaluationContext()
    if prelude:
        load_prelude(ctx, parse_all(prelude))
    e = parse(source)
    step = reduce_step(e, ctx)
    return Morph(e, step.expr, step.origin, step.progeny)


def mean_cell(a: Position, b: Position) -> tuple[int, int]:
    col = math.floor((a.left + b.left) / 2 + 0.5)
    row = math.floor((a.top + b.top) / 2 + 0.5)
    return col, row


# --- the morph object ---

def test_lerp():
    assert lerp(0, 10, 0) == 0
    assert lerp(0, 10, 1) == 10
    assert lerp(0, 10, 0.3) == 3


def test_maximum_extent_takes_each_axis_separately():
    m = Morph(parse("(a b c d)"), parse("(a\n b)"), {}, {})
    assert m.initial_extent == Extent(11, 3)
    assert m.final_extent == Extent(6, 4)
    assert m.maximum_extent == Extent(11, 4)


def test_progress_clamps():
    m = step_morph("(+ 2 3)")
    m.set_progress(-0.5)
    assert m.progress == 0.0
    m.set_progress(1.7)
    assert m.progress == 1.0
    m.set_progress(0.25)
    assert m.progress == 0.25


def test_injected_painter_receives_the_drawing():
    m = step_morph("(+ 2 3)")
    grid = CellGrid(m.maximum_extent.width, m.maximum_extent.height)
    out = morph_draw(m, painter=GridPainter(grid))
    assert out is grid
    assert "5" not in grid.to_text()
    m.set_progress(1.0)
    morph_draw(m, painter=GridPainter(grid))
    assert "5" in grid.to_text()


# --- endpoints ---

def endpoints_match(m: Morph, style) -> None:
    m.set_progress(0.0)
    grid = m.draw(style)
    e0 = m.initial_extent
    assert grid.crop(e0.width, e0.height).to_attributed() == \
        render_static(m.initial, style).to_attributed()
    assert grid.blank_outside(e0.width, e0.height)
    m.set_progress(1.0)
    grid = m.draw(style)
    e1 = m.final_extent
    assert grid.crop(e1.width, e1.height).to_attributed() == \
        render_static(m.final, style).to_attributed()
    assert grid.blank_outside(e1.width, e1.height)


def test_endpoints_are_the_static_renders():
    for source, prelude in [
        ("(+ 2 3)", ""),
        ("(if #false 1 2)", ""),
        ("((lambda (x) x) 5)", ""),
        ("(! 3)", "(define (! n) (if (<= n 1) 1 (* n (! (- n 1)))))"),
    ]:
        endpoints_match(step_morph(source, prelude), UNICODE_STYLE)


def test_endpoints_hold_in_ascii():
    endpoints_match(step_morph("(+ 2 3)"), ASCII_STYLE)


# --- glides and fades ---

def test_substituted_value_glides_toward_the_parameter():
    e = parse("((lambda (x) x) 5)")
    step = reduce_step(e, EvaluationContext())
    m = Morph(e, step.expr, step.origin, step.progeny)
    param = e.children[0].children[1].children[0]
    start = measure_positions(e)[param.id]
    m.set_progress(0.5)
    grid = morph_draw(m)
    col, row = mean_cell(start, Position(0, 0))
    # Both layers glide to the same cell; at 0.5 the initial layer is on
    # top, so the parameter's glyph wins it.
    assert grid.glyphs[row][col] == "x"
    assert grid.levels[row][col] == DIM


def test_dropped_nodes_fade_in_place():
    e = parse("(if #false 1 2)")
    step = reduce_step(e, EvaluationContext())
    m = Morph(e, step.expr, step.origin, step.progeny)
    positions = measure_positions(e)
    consequent = positions[e.children[2].id]
    m.set_progress(0.9)
    grid = morph_draw(m)
    assert grid.glyphs[consequent.top][consequent.left] == "1"
    assert grid.levels[consequent.top][consequent.left] == FAINT


def test_surviving_node_arrives_at_full_intensity():
    e = parse("(if #false 1 2)")
    step = reduce_step(e, EvaluationContext())
    m = Morph(e, step.expr, step.origin, step.progeny)
    alternative = measure_positions(e)[e.children[3].id]
    m.set_progress(0.9)
    grid = morph_draw(m)
    col, row = (lerp(0, alternative.left, 0.1), lerp(0, alternative.top, 0.1))
    col, row = math.floor(col + 0.5), math.floor(row + 0.5)
    assert grid.glyphs[row][col] == "2"
    assert grid.levels[row][col] == NORMAL


def test_unlinked_operand_fades_where_it_was():
    e = parse("((lambda (x) x) 5)")
    step = reduce_step(e, EvaluationContext())
    m = Morph(e, step.expr, step.origin, step.progeny)
    operand = measure_positions(e)[e.children[1].id]
    m.set_progress(0.5)
    grid = morph_draw(m)
    assert grid.glyphs[operand.top][operand.left] == "5"
    assert grid.levels[operand.top][operand.left] == DIM


def test_layer_on_top_flips_past_the_middle():
    m = Morph(parse("a"), parse("b"), {}, {})
    m.set_progress(0.5)
    assert morph_draw(m).to_text() == "a"
    m.set_progress(0.51)
    assert morph_draw(m).to_text() == "b"


# --- emerging pieces ---

def test_emerging_atom_is_its_text():
    grid = CellGrid(4, 2)
    draw_emerging(parse("ab"), Position(1, 1), 0.5, GridPainter(grid))
    assert grid.to_text() == "    \n ab "
    assert grid.levels[1][1] == DIM


def test_emerging_list_is_an_outline():
    grid = CellGrid(5, 3)
    draw_emerging(parse("(a)"), Position(0, 0), 1.0, GridPainter(grid))
    assert grid.to_text() == "╭   ╮\n│   │\n╰   ╯"


def test_emerging_shorthand_is_the_sigil():
    grid = CellGrid(2, 1)
    draw_emerging(parse("'x"), Position(0, 0), 1.0, GridPainter(grid))
    assert grid.to_text() == "' "


# --- spelling guard ---

def test_same_spelling():
    assert _same_spelling(parse("x"), parse("(a b)"))
    assert _same_spelling(parse("(a)"), parse("(b)"))
    assert not _same_spelling(parse("(a)"), parse("(ab)"))
    assert not _same_spelling(parse("'x"), parse("(quote x)"))
