from __future__ import annotations

from fractions import Fraction

import pytest

from boxstep import (Atom, EvalError, EvaluationContext, ListNode, LoadError,
                     ProvenanceStore, ReductionTrace, apply_primitive,
                     deep_copy, erase, load_prelude, parse, parse_all,
                     plain_equal, plain_text, reduce_simple, reduce_step,
                     self_evaluating, structural_equal, write)

from corpus import FACTORIAL_PRELUDE, REDUCTION_TERMS


def context(prelude: str = "") -> EvaluationContext:
    ctx = EvaluationContext()
    if prelude:
        load_prelude(ctx, parse_all(prelude))
    return ctx


def atoms(expr):
    if isinstance(expr, Atom):
        yield expr
        return
    for c in expr.children:
        yield from atoms(c)
    if expr.tail is not None:
        yield from atoms(expr.tail)


def nodes(expr):
    yield expr
    if isinstance(expr, ListNode):
        for c in expr.children:
            yield from nodes(c)
        if expr.tail is not None:
            yield from nodes(expr.tail)


def step_text(source: str, prelude: str = "") -> str:
    result = reduce_step(parse(source), context(prelude))
    return plain_text(erase(result.expr))


# --- evaluation context ---

def test_default_context_primitives():
    ctx = EvaluationContext()
    assert ctx.is_primitive("<=")
    assert ctx.is_primitive("+") and ctx.is_primitive("eqv?")
    assert not ctx.defines("!")
    assert not ctx.defines_macro("anything")
    assert apply_primitive(ctx, "+", [2, 3]) == 5


def test_undefined_symbol_lookup_raises():
    with pytest.raises(EvalError, match="undefined symbol"):
        EvaluationContext().value("zzz")


def test_load_prelude_function_form():
    ctx = context(FACTORIAL_PRELUDE)
    assert ctx.defines("!")
    definition = ctx.value("!")
    assert write(definition) == "(lambda (n) (if (<= n 1) 1 (* n (! (- n 1)))))"


def test_load_prelude_value_form():
    ctx = context("(define x 5)")
    assert ctx.value("x").value == 5


def test_load_prelude_last_definition_wins():
    ctx = context("(define x 1) (define x 2)")
    assert ctx.value("x").value == 2


def test_load_prelude_dotted_headers():
    ctx = context("(define (f a . r) a) (define (g . r) r)")
    assert write(ctx.value("f")) == "(lambda (a . r) a)"
    assert write(ctx.value("g")) == "(lambda r r)"


def test_load_prelude_rejects_non_defines():
    with pytest.raises(LoadError, match=r"\(\+ 1 2\)"):
        context("(+ 1 2)")
    with pytest.raises(LoadError):
        context("(define 5 6)")
    with pytest.raises(LoadError):
        context("(define (f x))")


# --- the oracle reducer ---

def simple_text(source: str, prelude: str = "") -> str:
    ctx = context(prelude)
    return plain_text(reduce_simple(erase(parse(source)), ctx))


def test_oracle_unfolds_factorial():
    assert (simple_text("(! 5)", FACTORIAL_PRELUDE)
            == "(if (<= 5 1) 1 (* 5 (! (- 5 1))))")


def test_oracle_reduces_if_test_first():
    assert (simple_text("(if (<= 5 1) 1 (* 5 (! (- 5 1))))")
            == "(if #false 1 (* 5 (! (- 5 1))))")


def test_oracle_quote_is_a_fixpoint():
    e = erase(parse("(quote (a b))"))
    assert reduce_simple(e, EvaluationContext()) is e


def test_oracle_reduces_operands_left_to_right():
    assert simple_text("(+ (+ 1 2) (+ 3 4))") == "(+ 3 (+ 3 4))"


# --- single steps with provenance ---

def test_if_false_selects_alternative():
    term = parse("(if #f 1 2)")
    alternative = term.children[3]
    result = reduce_step(term, EvaluationContext())
    assert plain_text(erase(result.expr)) == "2"
    assert result.origin[result.expr] == [alternative]
    assert result.progeny[term] == []


def test_factorial_of_one_spreads_the_operand():
    term = parse("(! 1)")
    operand = term.children[1]
    result = reduce_step(term, context(FACTORIAL_PRELUDE))
    assert (plain_text(erase(result.expr))
            == "(if (<= 1 1) 1 (* 1 (! (- 1 1))))")
    ones = [a for a in atoms(result.expr) if a.text == "1"]
    substituted = [a for a in ones
                   if any(p is operand for p in result.origin.get(a, ()))]
    assert len(ones) == 6
    assert len(substituted) == 3


def test_primitive_result_originates_from_the_application():
    term = parse("(+ 2 3)")
    result = reduce_step(term, EvaluationContext())
    assert isinstance(result.expr, Atom) and result.expr.value == 5
    assert result.origin[result.expr] == [term]


def test_fixpoint_returns_the_input():
    term = parse("(quote (a b))")
    result = reduce_step(term, EvaluationContext())
    assert result.expr is term
    assert result.origin == {} and result.progeny == {}


def test_substitution_erases_to_the_oracle_result():
    assert (step_text("((lambda (n) (if (<= n 1) 1 n)) 5)")
            == "(if (<= 5 1) 1 5)")


def test_substitution_respects_shadowing():
    assert (step_text("((lambda (x) ((lambda (x) x) x)) 1)")
            == "((lambda (x) x) 1)")


def test_substitution_keeps_quote_bodies_untouched():
    assert (step_text("((lambda (x) (quote (x y))) 1)")
            == "(quote (x y))")


def test_substitution_preserves_stored_gaps():
    result = reduce_step(parse("((lambda (y) (f   y)) 1)"),
                         EvaluationContext())
    assert write(result.expr) == "(f   1)"


def test_substituted_values_are_quoted_unless_self_evaluating():
    assert step_text("((lambda (x) x) 5)") == "5"
    assert step_text("((lambda (x) x) (lambda (y) y))") == "(lambda (y) y)"
    assert step_text("((lambda (x) x) 'a)") == "(quote (quote a))"


def test_rest_parameter_collects_remaining_operands():
    assert (step_text("((lambda (x . rest) rest) 1 2 3)")
            == "(quote (2 3))")
    assert step_text("((lambda args args) 1 2)") == "(quote (1 2))"


def test_missing_operand_errors_only_when_referenced():
    # Binding walks the two lists together, so a missing operand is only
    # noticed when the body actually asks for it.
    assert step_text("((lambda (x y) x) 1)") == "1"
    with pytest.raises(EvalError, match="missing operand"):
        reduce_step(parse("((lambda (x y) y) 1)"), EvaluationContext())


def test_macro_operators_are_rejected():
    class MacroContext(EvaluationContext):
        def defines_macro(self, name):
            return name == "when"

    with pytest.raises(EvalError, match="Macros not supported"):
        reduce_step(parse("(when #t 1)"), MacroContext())


def test_defined_symbol_resolves_in_value_position():
    assert step_text("(+ two 1)", "(define two 2)") == "(+ 2 1)"


def test_undefined_symbols_stay_put():
    term = parse("zzz")
    result = reduce_step(term, EvaluationContext())
    assert result.expr is term


def test_non_number_operand_is_an_error():
    with pytest.raises(EvalError, match="not a number"):
        reduce_step(parse("(+ x 1)"), EvaluationContext())


def test_improper_operand_list_is_an_error():
    with pytest.raises(EvalError, match="bad operand list"):
        reduce_step(parse("(+ 1 . 2)"), EvaluationContext())


# --- self evaluation ---

def test_self_evaluating_values():
    assert self_evaluating(parse("5"))
    assert self_evaluating(parse("#true"))
    assert self_evaluating(parse('"s"'))
    assert self_evaluating(parse("(lambda (x) x)"))
    assert not self_evaluating(parse("foo"))
    assert not self_evaluating(parse("(quote a)"))
    assert not self_evaluating(parse("(+ 1 2)"))


# --- provenance store ---

def test_mark_origin_links_both_ways():
    a, b = Atom("a"), Atom("b")
    store = ProvenanceStore()
    store.mark_origin(a, b)
    assert store.origin[a] == [b]
    assert store.progeny[b] == [a]


def test_mark_origin_overwrites_and_prunes():
    a, b, c = Atom("a"), Atom("b"), Atom("c")
    store = ProvenanceStore()
    store.mark_origin(a, b)
    store.mark_origin(a, c)
    assert store.origin[a] == [c]
    assert store.progeny[b] == []
    assert store.progeny[c] == [a]


def test_add_origin_prepends_without_duplicates():
    a, b, c = Atom("a"), Atom("b"), Atom("c")
    store = ProvenanceStore()
    store.add_origin(a, b)
    store.add_origin(a, c)
    store.add_origin(a, c)
    assert store.origin[a] == [c, b]
    assert store.progeny[b] == [a] and store.progeny[c] == [a]


def test_dissolve_empties_default_progeny_only():
    a, b, kept = Atom("a"), Atom("b"), Atom("k")
    store = ProvenanceStore()
    store.mark_origin(kept, a)
    store.dissolve(a)
    store.dissolve(a)
    assert store.progeny[a] == [kept]
    store.dissolve(b)
    assert store.progeny[b] == []


def test_dissolve_walks_list_structure():
    tree = parse("(a (b) . c)")
    store = ProvenanceStore()
    store.dissolve(tree)
    assert all(store.progeny[n] == [] for n in nodes(tree))


def test_eradicate_with_always_clears_copies():
    source = parse("(a b)")
    store = ProvenanceStore()
    copy = deep_copy(source, store)
    store.eradicate(copy, always=True)
    assert all(store.origin[n] == [] for n in nodes(copy))
    assert all(store.progeny.get(n, []) == [] for n in nodes(source))


# --- copying ---

def test_deep_copy_marks_sources():
    source = parse("(a (b))")
    store = ProvenanceStore()
    copy = deep_copy(source, store)
    assert structural_equal(copy, source)
    assert write(copy) == write(source)
    for fresh, original in zip(nodes(copy), nodes(source)):
        assert fresh is not original
        assert store.origin[fresh] == [original]


def test_deep_copy_preserves_spelling():
    for s in ["( a  b )", "'(1 . 2)", "(a ;c\n b)"]:
        assert write(deep_copy(parse(s), ProvenanceStore())) == s


# --- primitive application ---

def test_apply_primitive_values():
    ctx = EvaluationContext()
    assert apply_primitive(ctx, "<=", [5, 1]) is False
    assert apply_primitive(ctx, "*", [5, 4]) == 20
    assert apply_primitive(ctx, "/", [1, 3]) == Fraction(1, 3)
    assert apply_primitive(ctx, "/", [6, 3]) == 2
    assert apply_primitive(ctx, "<", [1, 2, 3]) is True
    assert apply_primitive(ctx, "=", [1, 1, 2]) is False


def test_apply_primitive_division_by_zero():
    with pytest.raises(EvalError):
        apply_primitive(EvaluationContext(), "/", [1, 0])


def test_primitive_booleans_take_long_spellings():
    result = reduce_step(parse("(<= 5 1)"), EvaluationContext())
    assert result.expr.text == "#false"


# --- traces ---

def test_factorial_trace_reaches_fixpoint():
    trace = ReductionTrace(parse("(! 5)"), context(FACTORIAL_PRELUDE))
    trace.run()
    assert trace.complete and not trace.truncated
    assert plain_text(erase(trace.snapshots[-1].expr)) == "120"


def test_atom_is_an_immediate_fixpoint():
    trace = ReductionTrace(parse("7"), EvaluationContext())
    trace.run()
    assert trace.complete and trace.last_index == 0
    assert len(trace.snapshots) == 1


def test_budget_counts_the_confirming_step():
    trace = ReductionTrace(parse("(+ 1 2)"), EvaluationContext(), max_steps=1)
    trace.run()
    assert trace.truncated and trace.last_index == 1
    trace = ReductionTrace(parse("(+ 1 2)"), EvaluationContext(), max_steps=2)
    trace.run()
    assert trace.complete and trace.last_index == 1


def test_divergent_term_truncates():
    term = "((lambda (x) (f x)) (g 1))"
    prelude = "(define (f x) (f (f x))) (define (g x) (g (g x)))"
    trace = ReductionTrace(parse(term), context(prelude), max_steps=50)
    trace.run()
    assert trace.truncated and not trace.complete
    assert trace.last_index == 50


def test_growing_self_application_stays_safe():
    term = "((lambda (x) (x (x x))) (lambda (x) (x (x x))))"
    trace = ReductionTrace(parse(term), EvaluationContext(), max_steps=300)
    trace.run()
    assert trace.truncated
    assert len(trace.snapshots) == 301


def test_self_reproducing_term_is_a_fixpoint():
    # The rewrite reproduces the term exactly, so it does not count as
    # progress and the trace stops right away.
    term = "((lambda (x) (x x)) (lambda (x) (x x)))"
    trace = ReductionTrace(parse(term), EvaluationContext(), max_steps=10)
    trace.run()
    assert trace.complete and trace.last_index == 0


def test_errors_carry_the_step_index():
    trace = ReductionTrace(parse("(/ 1 (- 1 1))"), EvaluationContext())
    with pytest.raises(EvalError) as info:
        trace.run()
    assert info.value.step == 2


def test_trace_extends_lazily():
    trace = ReductionTrace(parse("(! 5)"), context(FACTORIAL_PRELUDE))
    assert len(trace.snapshots) == 1
    assert trace.ensure(3) == 3
    assert len(trace.snapshots) == 4
    assert not trace.complete


# --- step invariants over the corpus ---

def all_ids(expr):
    return {n.id for n in nodes(expr)}


def test_fresh_nodes_never_reuse_prior_ids():
    for source, prelude in REDUCTION_TERMS:
        trace = ReductionTrace(parse(source), context(prelude), max_steps=300)
        trace.run()
        seen = all_ids(trace.snapshots[0].expr)
        for snap in trace.snapshots[1:]:
            current = all_ids(snap.expr)
            new = current - seen
            assert new.isdisjoint(seen)
            seen |= current


def test_untouched_gaps_survive_a_shell_rebuild():
    result = reduce_step(parse("(+  1   (+ 1 1))"), EvaluationContext())
    assert write(result.expr) == "(+  1   2)"
