"""Single-step reduction with provenance tracking.

Two reducers live here on purpose.  reduce_simple is the oracle: it works
on erased cons trees (plain values and Pair cells, no identity) and is a
direct transcription of the obvious recursive definition.  reduce_step
works on syntax nodes and additionally records, for every node of the
result, which nodes of the input it came from (origin) and, for every
node of the input, what it became (progeny).  The two must always agree:
erasing reduce_step's result gives reduce_simple's answer.

Both reduce exactly one redex per call, leftmost operand first, and
return their input (up to structure) at a fixpoint.
"""

from __future__ import annotations

import gc
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce as fold

from .syntax import (Atom, Expr, ListNode, Symbol, atom_equal, empty_gap,
                     make_atom, structural_equal, write)


class EvalError(Exception):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class LoadError(Exception):
    pass


# --- erased (plain) expressions: values, Pair cells, and NIL ---

class _Nil:
    def __repr__(self):
        return "()"


NIL = _Nil()


class Pair:
    __slots__ = ("car", "cdr")

    def __init__(self, car, cdr):
        self.car = car
        self.cdr = cdr

    def __repr__(self):
        return plain_text(self)


def plist(*items, tail=NIL):
    out = tail
    for item in reversed(items):
        out = Pair(item, out)
    return out


def proper_elements(p):
    """The elements of a proper list, or None if p is not one."""
    out = []
    while isinstance(p, Pair):
        out.append(p.car)
        p = p.cdr
    return out if p is NIL else None


def plain_text(p) -> str:
    from .syntax import value_text
    if isinstance(p, Pair):
        parts = []
        while isinstance(p, Pair):
            parts.append(plain_text(p.car))
            p = p.cdr
        if p is NIL:
            return "(" + " ".join(parts) + ")"
        return "(" + " ".join(parts) + " . " + plain_text(p) + ")"
    if p is NIL:
        return "()"
    return value_text(p)


def plain_equal(a, b) -> bool:
    if isinstance(a, Pair) and isinstance(b, Pair):
        return plain_equal(a.car, b.car) and plain_equal(a.cdr, b.cdr)
    if a is NIL or b is NIL:
        return a is b
    if isinstance(a, Pair) or isinstance(b, Pair):
        return False
    return atom_equal(a, b)


def erase(expr: Expr):
    """Drop identity and spacing: node tree to plain cons tree."""
    if isinstance(expr, Atom):
        return expr.value
    out = erase(expr.tail) if expr.tail is not None else NIL
    for child in reversed(expr.children):
        out = Pair(erase(child), out)
    return out


_IF = Symbol("if")
_LAMBDA = Symbol("lambda")
_QUOTE = Symbol("quote")


# --- evaluation context ---

class EvaluationContext:
    """Primitive procedures plus user definitions loaded from a prelude."""

    def __init__(self):
        self.primitives = dict(_PRIMITIVES)
        self.definitions: dict[str, Expr] = {}

    def is_primitive(self, name: str) -> bool:
        return name in self.primitives

    def defines(self, name: str) -> bool:
        return name in self.definitions

    def defines_macro(self, name: str) -> bool:
        return False

    def value(self, name: str) -> Expr:
        if name not in self.definitions:
            raise EvalError(f"undefined symbol: {name}")
        return self.definitions[name]


def load_prelude(context: EvaluationContext, forms: list[Expr]) -> None:
    """Install (define name expr) and (define (name . params) body) forms.

    Later definitions of the same name win.  Anything that is not one of
    the two define shapes is rejected.
    """
    for form in forms:
        if not (isinstance(form, ListNode) and form.tail is None
                and len(form.children) == 3
                and _symbol_name(form.children[0]) == "define"):
            raise LoadError(f"not a definition: {write(form)}")
        _, header, body = form.children
        if isinstance(header, Atom):
            name = _symbol_name(header)
            if name is None:
                raise LoadError(f"bad definition name: {write(form)}")
            context.definitions[name] = body
            continue
        if not (isinstance(header, ListNode) and header.children):
            raise LoadError(f"bad definition header: {write(form)}")
        name = _symbol_name(header.children[0])
        if name is None:
            raise LoadError(f"bad definition name: {write(form)}")
        context.definitions[name] = _header_lambda(header, body)


def _symbol_name(expr) -> str | None:
    if isinstance(expr, Atom) and isinstance(expr.value, Symbol):
        return expr.value.name
    return None


def _header_lambda(header: ListNode, body: Expr) -> ListNode:
    # (define (f a . r) body) installs (lambda (a . r) body);
    # (define (f . r) body) installs (lambda r body).
    if len(header.children) == 1 and header.tail is not None:
        params = header.tail
    else:
        params = ListNode(header.children[1:], tail=header.tail,
                          gaps=[empty_gap()] + header.gaps[2:])
    return ListNode([Atom("lambda"), params, body])


# --- primitives ---

def _check_numbers(name, args):
    for a in args:
        if isinstance(a, bool) or not isinstance(a, (int, float, Fraction)):
            raise EvalError(f"{name}: not a number: {plain_text(a)}")


def _exact(value):
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    return value


def _prim_add(args):
    _check_numbers("+", args)
    return _exact(sum(args))


def _prim_sub(args):
    _check_numbers("-", args)
    if not args:
        raise EvalError("-: needs at least one operand")
    if len(args) == 1:
        return _exact(-args[0])
    return _exact(fold(lambda a, b: a - b, args))


def _prim_mul(args):
    _check_numbers("*", args)
    return _exact(fold(lambda a, b: a * b, args, 1))


def _div2(a, b):
    if b == 0:
        raise EvalError("division by zero")
    if isinstance(a, float) or isinstance(b, float):
        return a / b
    return Fraction(a) / Fraction(b)


def _prim_div(args):
    _check_numbers("/", args)
    if not args:
        raise EvalError("/: needs at least one operand")
    if len(args) == 1:
        return _exact(_div2(1, args[0]))
    return _exact(fold(_div2, args))


def _chain(name, ok):
    def prim(args):
        _check_numbers(name, args)
        return all(ok(a, b) for a, b in zip(args, args[1:]))
    return prim


def _prim_eqv(args):
    if len(args) != 2:
        raise EvalError("eqv?: needs exactly two operands")
    a, b = args
    if isinstance(a, Pair) or isinstance(b, Pair) or a is NIL or b is NIL:
        return a is b
    return atom_equal(a, b)


_PRIMITIVES = {
    "+": _prim_add,
    "-": _prim_sub,
    "*": _prim_mul,
    "/": _prim_div,
    "<": _chain("<", lambda a, b: a < b),
    "<=": _chain("<=", lambda a, b: a <= b),
    ">": _chain(">", lambda a, b: a > b),
    ">=": _chain(">=", lambda a, b: a >= b),
    "=": _chain("=", lambda a, b: a == b),
    "eq?": _prim_eqv,
    "eqv?": _prim_eqv,
}


def apply_primitive(context: EvaluationContext, name: str, args: list):
    """Apply a primitive to already-projected plain operand values."""
    fn = context.primitives[name]
    try:
        return fn(args)
    except EvalError:
        raise
    except (ArithmeticError, TypeError) as err:
        raise EvalError(f"{name}: {err}") from err


# --- the oracle: single-step reduction over plain cons trees ---

def _plain_if(e):
    items = proper_elements(e) if isinstance(e, Pair) else None
    if items is not None and len(items) == 4 and items[0] == _IF:
        return items[1:]
    return None


def _plain_lambda(e) -> bool:
    items = proper_elements(e) if isinstance(e, Pair) else None
    return items is not None and len(items) == 3 and items[0] == _LAMBDA


def _plain_quote(e) -> bool:
    items = proper_elements(e) if isinstance(e, Pair) else None
    return items is not None and len(items) == 2 and items[0] == _QUOTE


def self_evaluating_plain(e) -> bool:
    if isinstance(e, Pair):
        return _plain_lambda(e)
    if e is NIL or isinstance(e, Symbol):
        return False
    return True


def reduce_simple(expression, context: EvaluationContext):
    branches = _plain_if(expression)
    if branches is not None:
        test, then, alt = branches
        if test is False:
            return alt
        test2 = reduce_simple(test, context)
        if plain_equal(test, test2):
            return then
        return plist(_IF, test2, then, alt)
    if _plain_lambda(expression) or _plain_quote(expression):
        return expression
    if isinstance(expression, Pair):
        operator, operands = expression.car, expression.cdr
        if isinstance(operator, Symbol) and context.defines_macro(operator.name):
            raise EvalError("Macros not supported (yet)")
        operands2 = _reduce_operands_simple(operands, context)
        if not plain_equal(operands, operands2):
            return Pair(operator, operands2)
        if isinstance(operator, Symbol):
            if context.is_primitive(operator.name):
                args = proper_elements(operands)
                if args is None:
                    raise EvalError(f"{operator.name}: bad operand list")
                return apply_primitive(context, operator.name, args)
            if context.defines(operator.name):
                unfolded = Pair(erase(context.value(operator.name)), operands)
                return reduce_simple(unfolded, context)
            return expression
        if _plain_lambda(operator):
            args, body = operator.cdr.car, operator.cdr.cdr.car
            return _substitute_simple(args, operands, body)
        if isinstance(operator, Pair):
            return Pair(reduce_simple(operator, context), operands)
        return expression
    if isinstance(expression, Symbol) and context.defines(expression.name):
        return erase(context.value(expression.name))
    return expression


def _reduce_operands_simple(operands, context):
    if isinstance(operands, Pair):
        first2 = reduce_simple(operands.car, context)
        if plain_equal(operands.car, first2):
            return Pair(operands.car, _reduce_operands_simple(operands.cdr, context))
        return Pair(first2, operands.cdr)
    if operands is NIL:
        return NIL
    return reduce_simple(operands, context)


def _substitute_simple(variables, values, expression):
    if _plain_quote(expression):
        return expression
    if _plain_lambda(expression):
        args = expression.cdr.car
        body = expression.cdr.cdr.car
        variables2, values2 = _unshadowed_simple(variables, values, args)
        return plist(_LAMBDA, args, _substitute_simple(variables2, values2, body))
    if isinstance(expression, Pair):
        return Pair(_substitute_simple(variables, values, expression.car),
                    _substitute_simple(variables, values, expression.cdr))
    if isinstance(expression, Symbol):
        return _counterpart_simple(expression, variables, values)
    return expression


def _shadow_names(args) -> set[str]:
    names = set()
    while isinstance(args, Pair):
        if isinstance(args.car, Symbol):
            names.add(args.car.name)
        args = args.cdr
    if isinstance(args, Symbol):
        names.add(args.name)
    return names


def _unshadowed_simple(variables, values, args):
    names = _shadow_names(args)
    kept_vars, kept_vals = [], []
    while isinstance(variables, Pair):
        var, variables = variables.car, variables.cdr
        has_val = isinstance(values, Pair)
        val = values.car if has_val else None
        values = values.cdr if has_val else NIL
        if isinstance(var, Symbol) and var.name in names:
            continue
        kept_vars.append(var)
        if has_val:
            kept_vals.append(val)
    if isinstance(variables, Symbol) and variables.name not in names:
        return plist(*kept_vars, tail=variables), plist(*kept_vals, tail=values)
    return plist(*kept_vars), plist(*kept_vals)


def _counterpart_simple(variable, variables, values):
    while True:
        if isinstance(variables, Symbol):
            if variables == variable:
                return plist(_QUOTE, values)
            return variable
        if not isinstance(variables, Pair):
            return variable
        if variables.car == variable:
            if not isinstance(values, Pair):
                raise EvalError(f"missing operand for {variable}")
            result = values.car
            if self_evaluating_plain(result):
                return result
            return plist(_QUOTE, result)
        variables = variables.cdr
        values = values.cdr if isinstance(values, Pair) else NIL


# --- provenance ---

class ProvenanceStore:
    """origin maps a node to the nodes it came from; progeny is the
    reverse direction.  A node with no entry defaults to its own
    singleton, meaning unchanged.  Both directions are kept symmetric:
    x in progeny[y] exactly when y in origin[x] for stored entries.
    """

    def __init__(self):
        self.origin: dict[Expr, list[Expr]] = {}
        self.progeny: dict[Expr, list[Expr]] = {}

    def origin_of(self, node: Expr) -> list[Expr]:
        got = self.origin.get(node)
        return list(got) if got is not None else [node]

    def progeny_of(self, node: Expr) -> list[Expr]:
        got = self.progeny.get(node)
        return list(got) if got is not None else [node]

    def mark_origin(self, newborn: Expr, parent: Expr) -> None:
        """origin[newborn] := [parent] and the symmetric entry, pruning
        whatever links the overwrite invalidates."""
        for old in self.origin.get(newborn, ()):
            if old is not parent and old in self.progeny:
                self.progeny[old] = [x for x in self.progeny[old]
                                     if x is not newborn]
        for old in self.progeny.get(parent, ()):
            if old is not newborn and old in self.origin:
                self.origin[old] = [x for x in self.origin[old]
                                    if x is not parent]
        self.origin[newborn] = [parent]
        self.progeny[parent] = [newborn]

    def add_origin(self, newborn: Expr, parent: Expr) -> None:
        """Prepend parent to origin[newborn] unless already present.  The
        implicit default self-entry counts as empty."""
        backward = self.origin.setdefault(newborn, [])
        if any(x is parent for x in backward):
            return
        backward.insert(0, parent)
        forward = self.progeny.setdefault(parent, [])
        if not any(x is newborn for x in forward):
            forward.insert(0, newborn)

    def dissolve(self, item: Expr) -> None:
        """Mark still-default nodes of a discarded subtree as going
        nowhere, so they fade out instead of tracking themselves."""
        if item not in self.progeny:
            self.progeny[item] = []
        if isinstance(item, ListNode):
            for child in item.children:
                self.dissolve(child)
            if item.tail is not None:
                self.dissolve(item.tail)

    def eradicate(self, item: Expr, always: bool = False) -> None:
        """The origin-side mirror of dissolve; always=True also severs
        links a copy inherited from its source."""
        stored = self.origin.get(item)
        if always or stored is None:
            for parent in stored or ():
                if parent in self.progeny:
                    self.progeny[parent] = [x for x in self.progeny[parent]
                                            if x is not item]
            self.origin[item] = []
        if isinstance(item, ListNode):
            for child in item.children:
                self.eradicate(child, always)
            if item.tail is not None:
                self.eradicate(item.tail, always)

    def transfer_heritage(self, fixed: list[Expr], rest: Expr | None,
                          operands: list[Expr]) -> None:
        """Substituted occurrences were linked to their parameter atoms;
        repoint them at the operands that actually supplied the values."""
        for i, arg in enumerate(fixed):
            children = self.progeny.pop(arg, None)
            if not children or i >= len(operands):
                continue
            val = operands[i]
            self.progeny[val] = list(children)
            for child in children:
                stored = self.origin.get(child)
                if stored:
                    stored[0] = val
                else:
                    self.origin[child] = [val]
        if rest is not None:
            children = self.progeny.pop(rest, None)
            remaining = operands[len(fixed):]
            for child in children or ():
                self.origin[child] = list(remaining)
                for val in remaining:
                    forward = self.progeny.setdefault(val, [])
                    if not any(x is child for x in forward):
                        forward.insert(0, child)

    def merge(self, other: "ProvenanceStore") -> None:
        self.origin.update(other.origin)
        self.progeny.update(other.progeny)


def deep_copy(expr: Expr, store: ProvenanceStore) -> Expr:
    """Structure-identical copy, fresh ids, each copy linked to its
    source node."""
    if isinstance(expr, Atom):
        result = Atom(expr.text, expr.value)
    else:
        result = ListNode([deep_copy(c, store) for c in expr.children],
                          tail=(deep_copy(expr.tail, store)
                                if expr.tail is not None else None),
                          gaps=expr.gaps, shorthand=expr.shorthand)
    store.mark_origin(result, expr)
    return result


def instantiate(expr: Expr) -> Expr:
    """Pristine deep copy: fresh ids, no provenance entries.  Used to pull
    a context definition into a step without aliasing the stored tree."""
    if isinstance(expr, Atom):
        return Atom(expr.text, expr.value)
    return ListNode([instantiate(c) for c in expr.children],
                    tail=(instantiate(expr.tail)
                          if expr.tail is not None else None),
                    gaps=expr.gaps, shorthand=expr.shorthand)


def copy_shallow(expr: Expr) -> Expr:
    if isinstance(expr, Atom):
        return Atom(expr.text, expr.value)
    return ListNode.adopting(list(expr.children), expr.tail, expr.gaps,
                             expr.shorthand)


# --- node-level single step ---

def _is_if(e) -> bool:
    return (isinstance(e, ListNode) and e.tail is None
            and len(e.children) == 4
            and _symbol_name(e.children[0]) == "if")


def is_lambda(e) -> bool:
    return (isinstance(e, ListNode) and e.tail is None
            and len(e.children) == 3
            and _symbol_name(e.children[0]) == "lambda")


def is_quote(e) -> bool:
    return (isinstance(e, ListNode) and e.tail is None
            and len(e.children) == 2
            and _symbol_name(e.children[0]) == "quote")


def self_evaluating(e: Expr) -> bool:
    """Numbers, booleans, strings, and lambda forms stand for themselves;
    symbols and other lists do not."""
    if isinstance(e, Atom):
        return not isinstance(e.value, Symbol)
    return is_lambda(e)


@dataclass
class Binding:
    fixed: list[Expr]
    rest: Expr | None
    values: list[Expr]


def _make_binding(params: Expr, operands: list[Expr]) -> Binding:
    if isinstance(params, Atom):
        return Binding([], params, operands)
    return Binding(list(params.children), params.tail, operands)


def _shadowed(binding: Binding, args: Expr) -> Binding:
    if isinstance(args, Atom):
        names = {n} if (n := _symbol_name(args)) else set()
    elif isinstance(args, ListNode):
        names = {n for c in args.children if (n := _symbol_name(c))}
        if args.tail is not None and (n := _symbol_name(args.tail)):
            names.add(n)
    else:
        names = set()
    fixed, values = [], []
    for i, var in enumerate(binding.fixed):
        if _symbol_name(var) in names:
            continue
        fixed.append(var)
        if i < len(binding.values):
            values.append(binding.values[i])
    leftover = binding.values[len(binding.fixed):]
    if binding.rest is not None and _symbol_name(binding.rest) not in names:
        return Binding(fixed, binding.rest, values + leftover)
    return Binding(fixed, None, values)


def _quote_wrap(expr: Expr) -> ListNode:
    return ListNode([Atom("quote"), expr],
                    gaps=[empty_gap(), empty_gap(), empty_gap()],
                    shorthand=True)


def substitute(binding: Binding, expression: Expr, store: ProvenanceStore,
               mark_shells: bool = True) -> Expr:
    """Replace parameter occurrences in expression with quoted copies of
    the bound values.  Rebuilt shells link back to their sources when the
    sources are real input nodes (mark_shells)."""
    if is_quote(expression):
        return expression
    if is_lambda(expression):
        lam, args, body = expression.children
        inner = _shadowed(binding, args)
        body2 = substitute(inner, body, store, mark_shells)
        return ListNode([lam, args, body2], gaps=expression.gaps)
    if isinstance(expression, ListNode):
        children2 = [substitute(binding, c, store, mark_shells)
                     for c in expression.children]
        tail2 = (substitute(binding, expression.tail, store, mark_shells)
                 if expression.tail is not None else None)
        result = ListNode(children2, tail=tail2, gaps=expression.gaps,
                          shorthand=expression.shorthand)
        if mark_shells:
            store.mark_origin(result, expression)
        return result
    return counterpart(expression, binding, store)


def counterpart(variable: Expr, binding: Binding,
                store: ProvenanceStore) -> Expr:
    """The replacement for one atom: a quoted copy of the matching bound
    value, the quoted remaining values for a rest parameter, or the atom
    itself when no parameter matches."""
    name = _symbol_name(variable)
    if name is None:
        return variable
    for i, param in enumerate(binding.fixed):
        if _symbol_name(param) != name:
            continue
        if i >= len(binding.values):
            raise EvalError(f"missing operand for {name}")
        copied = deep_copy(binding.values[i], store)
        result = copied if self_evaluating(copied) else _quote_wrap(copied)
        store.eradicate(result, always=True)
        store.add_origin(result, param)
        return result
    if binding.rest is not None and _symbol_name(binding.rest) == name:
        remaining = binding.values[len(binding.fixed):]
        inner = ListNode([deep_copy(v, store) for v in remaining])
        result = _quote_wrap(inner)
        store.add_origin(result, binding.rest)
        return result
    return variable


@dataclass
class StepResult:
    expr: Expr
    origin: dict[Expr, list[Expr]] = field(default_factory=dict)
    progeny: dict[Expr, list[Expr]] = field(default_factory=dict)


def reduce_step(expression: Expr, context: EvaluationContext | None = None) -> StepResult:
    """One reduction of a syntax tree, with provenance.  At a fixpoint the
    input itself comes back with empty maps."""
    if context is None:
        context = EvaluationContext()
    result, store = _reduce(expression, context)
    if result is expression:
        return StepResult(expression)
    return StepResult(result, store.origin, store.progeny)


_TEST, _OPERAND, _TAIL, _OPERATOR = "test", "operand", "tail", "operator"


class _Frame:
    """Probe position inside one list node on the descent path."""

    __slots__ = ("node", "phase", "index")

    def __init__(self, node: ListNode, phase: str):
        self.node = node
        self.phase = phase
        self.index = 0


def _reduce(e: Expr, ctx: EvaluationContext) -> tuple[Expr, ProvenanceStore]:
    """Returns the reduct and the provenance it created, or the input
    itself when nothing makes progress.  The descent is an explicit stack,
    not recursion: redex depth grows with the step count on divergent
    terms and must not be bounded by the interpreter stack."""
    frames: list[_Frame] = []
    kind, payload = _enter_node(e, ctx, frames)
    while True:
        if kind == "descend":
            kind, payload = _enter_node(payload, ctx, frames)
        elif kind == "rewrite":
            result, store = payload
            return _rebuild(frames, result, store)
        elif frames:
            kind, payload = _next_probe(frames, ctx)
        else:
            return e, ProvenanceStore()


def _enter_node(node: Expr, ctx: EvaluationContext, frames: list[_Frame]):
    """Classify a node on the way down: descend into its first probe
    child, attempt a rewrite at it, or report it unchanged.  One fused
    head inspection instead of _is_if/is_lambda/is_quote keeps the cost
    per descent level flat; this runs once per level per step."""
    if isinstance(node, ListNode):
        children = node.children
        if not children:
            return "unchanged", None
        name = _symbol_name(children[0])
        if name is not None:
            if node.tail is None:
                if name == "if" and len(children) == 4:
                    test = children[1]
                    if isinstance(test, Atom) and test.value is False:
                        return _attempt(node, _select_alternative, ctx)
                    frames.append(_Frame(node, _TEST))
                    return "descend", test
                if ((name == "lambda" and len(children) == 3)
                        or (name == "quote" and len(children) == 2)):
                    return "unchanged", None
            if ctx.defines_macro(name):
                raise EvalError("Macros not supported (yet)")
        frame = _Frame(node, _OPERAND)
        frames.append(frame)
        if len(children) > 1:
            frame.index = 1
            return "descend", children[1]
        return _next_probe(frames, ctx)
    name = _symbol_name(node)
    if name is not None and ctx.defines(name):
        return _attempt(node, _instantiate_value, ctx)
    return "unchanged", None


def _next_probe(frames: list[_Frame], ctx: EvaluationContext):
    """The innermost frame's last probe came back unchanged (or it has
    not probed yet): move on to its next child, or to the node itself.
    frame.index is the child position probed so far, 0 before the first
    probe; the operator at position 0 is never an operand probe."""
    frame = frames[-1]
    node = frame.node
    if frame.phase == _OPERAND:
        position = frame.index + 1
        if position < len(node.children):
            frame.index = position
            return "descend", node.children[position]
        if node.tail is not None:
            frame.phase = _TAIL
            return "descend", node.tail
        return _resolve(frames, ctx)
    if frame.phase == _TEST:
        frames.pop()
        return _attempt(node, _select_consequent, ctx)
    if frame.phase == _TAIL:
        return _resolve(frames, ctx)
    frames.pop()
    return "unchanged", None


def _resolve(frames: list[_Frame], ctx: EvaluationContext):
    """All operands of a combination are irreducible: apply the operator,
    or descend into it when it is itself a combination."""
    frame = frames.pop()
    node = frame.node
    operator = node.children[0]
    op_name = _symbol_name(operator)
    if op_name is not None:
        if ctx.is_primitive(op_name):
            return _attempt(node, _apply_primitive_form, ctx)
        if ctx.defines(op_name):
            return _attempt(node, _unfold_definition, ctx)
        return "unchanged", None
    if is_lambda(operator):
        return _attempt(node, _beta_reduce, ctx)
    if isinstance(operator, ListNode):
        frame.phase = _OPERATOR
        frames.append(frame)
        return "descend", operator
    return "unchanged", None


def _attempt(node: Expr, rewrite, ctx: EvaluationContext):
    """Run one local rewrite into a scratch store.  A structurally equal
    result is no progress: it is discarded together with its links, so
    abandoned attempts leave nothing behind."""
    store = ProvenanceStore()
    result = rewrite(node, ctx, store)
    if structural_equal(result, node):
        return "unchanged", None
    return "rewrite", (result, store)


def _rebuild(frames: list[_Frame], result: Expr,
             store: ProvenanceStore) -> tuple[Expr, ProvenanceStore]:
    """Wrap a progressed rewrite back up the descent path, one fresh
    shell per frame, linking each shell to the node it replaces."""
    origin, progeny = store.origin, store.progeny
    for frame in reversed(frames):
        node = frame.node
        if frame.phase == _TEST:
            if_atom, test, then, alt = node.children
            shell = ListNode([if_atom, result, then, alt], gaps=node.gaps)
            store.mark_origin(shell, node)
            store.mark_origin(result, test)
        elif frame.phase == _OPERATOR:
            shell = ListNode([result] + node.children[1:], tail=node.tail,
                             gaps=node.gaps)
            store.mark_origin(shell, node)
            store.mark_origin(result, node.children[0])
        else:
            operator = node.children[0]
            children2 = list(node.children)
            operator2 = copy_shallow(operator)
            children2[0] = operator2
            if frame.phase == _TAIL:
                tail2 = result
            else:
                children2[frame.index] = result
                tail2 = node.tail
            shell = ListNode.adopting(children2, tail2, node.gaps,
                                      node.shorthand)
            # The shell and operator copy are fresh and the replaced
            # nodes sit above the redex, untouched by the rewrite, so
            # mark_origin degenerates to four plain writes here.
            origin[operator2] = [operator]
            progeny[operator] = [operator2]
            origin[shell] = [node]
            progeny[node] = [shell]
        result = shell
    return result, store


def _select_alternative(e: ListNode, ctx: EvaluationContext,
                        store: ProvenanceStore) -> Expr:
    alt = e.children[3]
    store.dissolve(e)
    result = deep_copy(alt, store)
    store.mark_origin(result, alt)
    return result


def _select_consequent(e: ListNode, ctx: EvaluationContext,
                       store: ProvenanceStore) -> Expr:
    then = e.children[2]
    store.dissolve(e)
    result = deep_copy(then, store)
    store.mark_origin(result, then)
    return result


def _instantiate_value(e: Atom, ctx: EvaluationContext,
                       store: ProvenanceStore) -> Expr:
    result = instantiate(ctx.value(_symbol_name(e)))
    store.dissolve(e)
    store.mark_origin(result, e)
    return result


def _apply_primitive_form(e: ListNode, ctx: EvaluationContext,
                          store: ProvenanceStore) -> Expr:
    op_name = _symbol_name(e.children[0])
    if e.tail is not None:
        raise EvalError(f"{op_name}: bad operand list")
    args = [erase(x) for x in e.children[1:]]
    value = apply_primitive(ctx, op_name, args)
    result = make_atom(value)
    store.mark_origin(result, e)
    return result


def _unfold_definition(e: ListNode, ctx: EvaluationContext,
                       store: ProvenanceStore) -> Expr:
    operator = e.children[0]
    operands = e.children[1:]
    definition = instantiate(ctx.value(_symbol_name(operator)))
    if is_lambda(definition):
        _, params, body = definition.children
        binding = _make_binding(params, operands)
        result = substitute(binding, body, store, mark_shells=False)
        store.transfer_heritage(binding.fixed, binding.rest, operands)
        store.dissolve(e)
        store.mark_origin(result, operator)
        return result
    result = ListNode([definition] + operands, tail=e.tail,
                      gaps=e.gaps)
    store.mark_origin(definition, operator)
    store.mark_origin(result, e)
    return result


def _beta_reduce(e: ListNode, ctx: EvaluationContext,
                 store: ProvenanceStore) -> Expr:
    operator = e.children[0]
    store.dissolve(e)
    _, params, body = operator.children
    binding = _make_binding(params, e.children[1:])
    return substitute(binding, body, store, mark_shells=True)


# --- traces ---

@dataclass
class Snapshot:
    expr: Expr
    origin: dict[Expr, list[Expr]]
    progeny: dict[Expr, list[Expr]]


class ReductionTrace:
    """Lazily extended list of snapshots.  Snapshot k's maps link its
    nodes with snapshot k-1's; snapshot 0 has empty maps."""

    def __init__(self, expr: Expr, context: EvaluationContext | None = None,
                 max_steps: int = 1000):
        self.context = context if context is not None else EvaluationContext()
        self.max_steps = max_steps
        self.snapshots = [Snapshot(expr, {}, {})]
        self.complete = False
        self.truncated = False

    @property
    def last_index(self) -> int:
        return len(self.snapshots) - 1

    def ensure(self, index: int) -> int:
        """Extend the trace toward index; returns the index actually
        available (smaller at a fixpoint or the step budget)."""
        while index > self.last_index and not self.complete and not self.truncated:
            self._extend()
        return min(index, self.last_index)

    def run(self) -> None:
        # Trees, maps, and snapshots are acyclic, so the cyclic collector
        # can only add full-heap pauses while the trace grows; park it.
        enabled = gc.isenabled()
        gc.disable()
        try:
            while not self.complete and not self.truncated:
                self._extend()
        finally:
            if enabled:
                gc.enable()

    def _extend(self) -> None:
        if self.last_index >= self.max_steps:
            self.truncated = True
            return
        current = self.snapshots[-1].expr
        try:
            step = reduce_step(current, self.context)
        except EvalError as err:
            err.step = len(self.snapshots)
            raise
        if step.expr is current:
            self.complete = True
            return
        self.snapshots.append(Snapshot(step.expr, step.origin, step.progeny))


def node_path(root: Expr, target: Expr) -> list[int] | None:
    """Child-index path from root to target, spaces not counted; the
    dotted tail sits after the last child.  None when target is not in
    the tree."""
    if root is target:
        return []
    if isinstance(root, ListNode):
        for i, child in enumerate(root.children):
            sub = node_path(child, target)
            if sub is not None:
                return [i] + sub
        if root.tail is not None:
            sub = node_path(root.tail, target)
            if sub is not None:
                return [len(root.children)] + sub
    return None
