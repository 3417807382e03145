"""Fusing a PT expression into one update and simplifying its expressions.

Rules are applied innermost-first until nothing changes. Every rule maps a
well-typed node to a denotationally equal node that is smaller, or replaces a
literal by its canonical value at the literal's ground type.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from .errors import DiagramError
from .pt import PTExpr, Update, fuse
from .symbolic import BinOp, Call, Conv, If, Lit, SBool, SymExpr, UnOp, WireVar, compile_sym, node_count, walk
from .terms import BOOL, Ground, Var

Rule = Callable[[SymExpr], "SymExpr | None"]


@dataclass(frozen=True)
class RewriteRule:
    name: str
    apply: Rule

    def __call__(self, e: SymExpr):
        return self.apply(e)


RULES: list[RewriteRule] = []


def rule(fn: Rule) -> Rule:
    RULES.append(RewriteRule(fn.__name__, fn))
    return fn


def _ground(e: SymExpr) -> str | None:
    return e.ty.name if isinstance(e.ty, Ground) else None


def _numeric_lit(e: SymExpr) -> bool:
    return isinstance(e, Lit) and not isinstance(e.value, bool)


def _is_lit(e: SymExpr, value) -> bool:
    return isinstance(e, Lit) and not isinstance(e.value, bool) and e.value == value \
        if not isinstance(value, bool) else isinstance(e, Lit) and e.value is value


def _nzero(t) -> bool:
    """Do numerals 1, 2, ... differ from 0 at type ``t``?"""
    return isinstance(t, Ground) and t.name in ("real", "int", "bool") or \
        isinstance(t, Var) and "numeral_nzero" in t.classes


def _true(ty=BOOL) -> Lit:
    return Lit(True, ty=ty)


def _false(ty=BOOL) -> Lit:
    return Lit(False, ty=ty)


@rule
def bool_literal(e):
    # numerals at bool are True, 0 at bool is False
    if isinstance(e, Lit) and _ground(e) == "bool" and not isinstance(e.value, bool):
        return Lit(e.value != 0, e.param, e.ty)
    return None


@rule
def numeral_nzero(e):
    # n ≠ 0 is True for numerals n ≥ 1 whenever the type has numeral_nzero
    if isinstance(e, BinOp) and e.op in ("≠", "=") and _numeric_lit(e.left) and _numeric_lit(e.right):
        a, b = e.left.value, e.right.value
        if a == b:
            return Lit(e.op == "=", ty=e.ty)
        if (a == 0 or b == 0) and a >= 0 and b >= 0 and float(a).is_integer() and float(b).is_integer() \
                and _nzero(e.left.ty):
            return Lit(e.op == "≠", ty=e.ty)
    return None


@rule
def bool_ne_zero(e):
    # b ≠ 0 is b, b = 0 is ¬b, for b : bool
    if isinstance(e, BinOp) and e.op in ("≠", "=") and _ground(e.left) == "bool":
        lit = e.right
        if isinstance(lit, Lit) and lit.value is False or _is_lit(lit, 0):
            return e.left if e.op == "≠" else UnOp("¬", e.left, e.ty)
        if isinstance(lit, Lit) and lit.value is True:
            return e.left if e.op == "=" else UnOp("¬", e.left, e.ty)
    return None


@rule
def sbool_fold(e):
    if not isinstance(e, SBool):
        return None
    a = e.arg
    if _ground(a) == "bool" and _ground(e) == "bool":
        return a
    if isinstance(a, Lit) and (_nzero(a.ty) or a.value == 0 or isinstance(a.value, bool)):
        one = a.value != 0
        if _ground(e) == "bool":
            return Lit(bool(one), ty=e.ty)
        return Lit(1 if one else 0, ty=e.ty)
    return None


@rule
def conv_identity(e):
    if isinstance(e, Conv) and e.arg.ty is not None and e.arg.ty == e.ty:
        return e.arg
    return None


@rule
def generic_at_bool(e):
    # s_and/s_or/s_not at bool are the connectives
    if isinstance(e, Call) and _ground(e) == "bool" and all(_ground(a) == "bool" for a in e.args):
        if e.fn == "s_and":
            return BinOp("∧", e.args[0], e.args[1], e.ty)
        if e.fn == "s_or":
            return BinOp("∨", e.args[0], e.args[1], e.ty)
        if e.fn == "s_not":
            return UnOp("¬", e.args[0], e.ty)
    return None


@rule
def ground_fold(e):
    # every child a literal and every type ground: evaluate
    kids = e.children()
    if not kids or not all(isinstance(k, Lit) for k in kids):
        return None
    if _ground(e) is None or any(_ground(k) is None for k in kids):
        return None
    try:
        value = compile_sym(e)({}, {})
    except (DiagramError, ArithmeticError, ValueError):
        return None
    if isinstance(value, float) and value != value:
        return None
    if isinstance(value, complex):
        return None
    return Lit(value, ty=e.ty)


@rule
def connectives(e):
    if isinstance(e, BinOp) and e.op in ("∧", "∨"):
        a, b = e.left, e.right
        unit, zero = (True, False) if e.op == "∧" else (False, True)
        if isinstance(a, Lit) and a.value is unit:
            return b
        if isinstance(a, Lit) and a.value is zero:
            return a
        if isinstance(b, Lit) and b.value is unit:
            return a
    if isinstance(e, UnOp) and e.op == "¬" and isinstance(e.arg, UnOp) and e.arg.op == "¬":
        return e.arg.arg
    return None


@rule
def if_fold(e):
    if not isinstance(e, If):
        return None
    c = e.cond
    if isinstance(c, Lit) and isinstance(c.value, bool):
        return e.then if c.value else e.orelse
    if _ground(e) == "bool" and isinstance(e.then, Lit) and isinstance(e.orelse, Lit):
        if e.then.value is True and e.orelse.value is False:
            return c
    return None


@rule
def arith_identity(e):
    # 1·x = x·1 = x, x + 0 = 0 + x = x - 0 = x at real and int
    if not isinstance(e, BinOp) or _ground(e) not in ("real", "int"):
        return None
    a, b = e.left, e.right
    if e.op == "·":
        if _is_lit(a, 1) and b.ty == e.ty:
            return b
        if _is_lit(b, 1) and a.ty == e.ty:
            return a
    if e.op == "+":
        if _is_lit(a, 0) and b.ty == e.ty:
            return b
        if _is_lit(b, 0) and a.ty == e.ty:
            return a
    if e.op == "-" and _is_lit(b, 0) and a.ty == e.ty:
        return a
    return None


def _identical(a: SymExpr, b: SymExpr) -> bool:
    # dataclass equality conflates False with 0 and 1.0 with 1
    if a != b:
        return False
    return [type(n.value) for n in walk(a) if isinstance(n, Lit)] == \
        [type(n.value) for n in walk(b) if isinstance(n, Lit)]


def _rewrite_node(e: SymExpr, rules) -> SymExpr:
    for r in rules:
        out = r(e)
        if out is not None and not _identical(out, e):
            return out
    return e


def fold_constants(e: SymExpr, types=None, rules=None) -> SymExpr:
    """Simplify a typed expression bottom-up to a fixpoint.

    ``types`` optionally maps wire names to types for wires the expression
    leaves untyped.
    """
    rules = RULES if rules is None else rules
    if types:
        e = _type_wires(e, types)
    while True:
        new = _pass(e, rules)
        if _identical(new, e):
            return e
        e = new


def _pass(e: SymExpr, rules) -> SymExpr:
    kids = e.children()
    if kids:
        new_kids = tuple(_pass(k, rules) for k in kids)
        if not all(_identical(a, b) for a, b in zip(new_kids, kids)):
            e = e.rebuild(new_kids)
    while True:
        new = _rewrite_node(e, rules)
        if new is e:
            return e
        e = new


def _type_wires(e: SymExpr, types) -> SymExpr:
    if isinstance(e, WireVar) and e.ty is None and e.name in types:
        return replace(e, ty=types[e.name])
    kids = e.children()
    return e.rebuild(tuple(_type_wires(k, types) for k in kids)) if kids else e


def normalize(pt: PTExpr, rules=None) -> Update:
    """One update denotationally equal to ``pt``, with simplified outputs."""
    u = fuse(pt)
    outs = tuple(fold_constants(o, rules=rules) for o in u.outputs)
    return Update(u.inputs, outs, u.in_types, u.origin, u.in_labels, u.out_labels)


def measure(e: SymExpr) -> tuple[int, int]:
    """(node count, unresolved count) where unresolved counts foldable-looking nodes."""
    unresolved = 0
    for n in walk(e):
        if isinstance(n, (SBool, Conv, Call, If)):
            unresolved += 1
        elif isinstance(n, Lit) and _ground(n) == "bool" and not isinstance(n.value, bool):
            unresolved += 1
    return node_count(e), unresolved
