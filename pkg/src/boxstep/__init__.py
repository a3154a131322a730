"""Step-by-step reduction of a small Scheme subset, with provenance
tracking, box-notation rendering, and morphing animation between
consecutive reduction steps."""

from .layout import Extent, Position, extent, measure_positions, traverse
from .morph import Morph, lerp, morph_draw
from .player import Player
from .reducer import (EvalError, EvaluationContext, LoadError, ProvenanceStore,
                      ReductionTrace, StepResult, apply_primitive, deep_copy,
                      erase, load_prelude, node_path, plain_equal, plain_text,
                      reduce_simple, reduce_step, self_evaluating)
from .render import (ASCII_STYLE, UNICODE_STYLE, CellGrid, GridPainter,
                     intensity_quantize, render_static)
from .syntax import (Atom, ListNode, ParseError, Space, Symbol, parse,
                     parse_all, structural_equal, write)

__all__ = [
    "ASCII_STYLE", "Atom", "CellGrid", "EvalError", "EvaluationContext",
    "Extent", "GridPainter", "ListNode", "LoadError", "Morph", "ParseError",
    "Player", "Position", "ProvenanceStore", "ReductionTrace", "Space",
    "StepResult", "Symbol", "UNICODE_STYLE", "apply_primitive", "deep_copy",
    "erase", "extent", "intensity_quantize", "lerp", "load_prelude",
    "measure_positions", "morph_draw", "node_path", "parse", "parse_all",
    "plain_equal", "plain_text", "reduce_simple", "reduce_step",
    "render_static", "self_evaluating", "structural_equal", "traverse",
    "write",
]
