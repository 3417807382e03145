"""Symbolic scalar expressions over wire variables, with overloaded evaluation.

Every node carries an optional ``ty``. Before inference it is an annotation the
node's type must unify with; after elaboration it is the node's resolved type.
Evaluation dispatches on the resolved ground types, which is how ``conv``,
``s_bool`` and the generic ``s_*`` operators pick their overload.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, replace
from typing import Callable, Mapping

from .errors import UnboundWire, UndefinedOp
from .terms import BOOL, INT, REAL, Ground, TypeTerm

ARITH = {"+": "plus", "-": "minus", "·": "power", "^": "power"}
COMPARE = {"=", "≠", "<", "≤", ">", "≥"}
ORDERED = {"<", "≤", ">", "≥"}
LOGIC = {"∧", "∨"}
GENERIC_FNS = {"s_and": 2, "s_or": 2, "s_not": 1, "s_exp": 1, "s_sin": 1}


class SymExpr:
    __slots__ = ()
    ty: TypeTerm | None

    def children(self) -> tuple["SymExpr", ...]:
        return ()

    def rebuild(self, children) -> "SymExpr":
        return self

    def with_type(self, ty) -> "SymExpr":
        return replace(self, ty=ty)

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Lit(SymExpr):
    value: bool | int | float
    param: str | None = None  # value parameter whose type this literal shares
    ty: TypeTerm | None = None


@dataclass(frozen=True)
class WireVar(SymExpr):
    name: str
    ty: TypeTerm | None = None


@dataclass(frozen=True)
class Param(SymExpr):
    name: str
    ty: TypeTerm | None = None


@dataclass(frozen=True)
class BinOp(SymExpr):
    op: str
    left: SymExpr
    right: SymExpr
    ty: TypeTerm | None = None

    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        return replace(self, left=children[0], right=children[1])


@dataclass(frozen=True)
class UnOp(SymExpr):
    op: str  # "-" or "¬"
    arg: SymExpr
    ty: TypeTerm | None = None

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return replace(self, arg=children[0])


@dataclass(frozen=True)
class Conv(SymExpr):
    arg: SymExpr
    target: Ground | None = None
    ty: TypeTerm | None = None

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return replace(self, arg=children[0])


@dataclass(frozen=True)
class SBool(SymExpr):
    arg: SymExpr
    ty: TypeTerm | None = None

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return replace(self, arg=children[0])


@dataclass(frozen=True)
class Call(SymExpr):
    fn: str
    args: tuple
    ty: TypeTerm | None = None

    def __post_init__(self):
        if GENERIC_FNS.get(self.fn) != len(self.args):
            raise ValueError(f"bad generic call {self.fn}/{len(self.args)}")

    def children(self):
        return self.args

    def rebuild(self, children):
        return replace(self, args=tuple(children))


@dataclass(frozen=True)
class If(SymExpr):
    cond: SymExpr
    then: SymExpr
    orelse: SymExpr
    ty: TypeTerm | None = None

    def children(self):
        return (self.cond, self.then, self.orelse)

    def rebuild(self, children):
        return replace(self, cond=children[0], then=children[1], orelse=children[2])


# construction shorthands used by the block library and tests
def add(a, b):
    return BinOp("+", a, b)


def mul(a, b):
    return BinOp("·", a, b)


def ne(a, b):
    return BinOp("≠", a, b)


def conj(a, b):
    return BinOp("∧", a, b)


def walk(e: SymExpr):
    yield e
    for c in e.children():
        yield from walk(c)


def node_count(e: SymExpr) -> int:
    return sum(1 for _ in walk(e))


def free_wires(e: SymExpr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, WireVar)}


def substitute(e: SymExpr, mapping: Mapping[str, SymExpr]) -> SymExpr:
    """Replace wire variables by expressions, simultaneously."""
    if isinstance(e, WireVar):
        return mapping.get(e.name, e)
    kids = e.children()
    if not kids:
        return e
    return e.rebuild(tuple(substitute(k, mapping) for k in kids))


def map_types(e: SymExpr, fn: Callable[[TypeTerm | None], TypeTerm | None]) -> SymExpr:
    kids = e.children()
    if kids:
        e = e.rebuild(tuple(map_types(k, fn) for k in kids))
    return replace(e, ty=fn(e.ty))


# ---------------------------------------------------------------- printing

_PREC = {"∨": 1, "∧": 2, "=": 4, "≠": 4, "<": 4, "≤": 4, ">": 4, "≥": 4, "+": 5, "-": 5, "·": 6, "^": 8}
_ASSOC = {"∨", "∧", "+", "·"}


def show_value(v) -> str:
    if isinstance(v, bool):
        return "True" if v else "False"
    if isinstance(v, float) and v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _prec(e: SymExpr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, UnOp):
        return 3 if e.op == "¬" else 7
    if isinstance(e, If):
        return 0
    if isinstance(e, Lit) and not isinstance(e.value, bool) and e.value < 0:
        return 7
    return 10


def show(e: SymExpr) -> str:
    if isinstance(e, Lit):
        return show_value(e.value)
    if isinstance(e, (WireVar, Param)):
        return e.name
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left = show(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = show(e.right)
        rp = _prec(e.right)
        if rp < p or (rp == p and e.op not in _ASSOC):
            right = f"({right})"
        if e.op in ("·", "^"):
            return f"{left}{e.op}{right}"
        return f"{left} {e.op} {right}"
    if isinstance(e, UnOp):
        inner = show(e.arg)
        if _prec(e.arg) < _prec(e):
            inner = f"({inner})"
        return f"{e.op}{inner}"
    if isinstance(e, Conv):
        if e.target is None:
            return f"conv({show(e.arg)})"
        return f"(conv({show(e.arg)}):{e.target})"
    if isinstance(e, SBool):
        return f"s_bool({show(e.arg)})"
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(show(a) for a in e.args)})"
    if isinstance(e, If):
        return f"if {show(e.cond)} then {show(e.then)} else {show(e.orelse)}"
    raise TypeError(f"not a symbolic expression: {e!r}")


# -------------------------------------------------------------- evaluation

def type_of_value(v) -> Ground:
    if isinstance(v, bool):
        return BOOL
    if isinstance(v, int):
        return INT
    return REAL


def coerce(v, ty: str):
    """Value of a literal or converted scalar at ground type ``ty``."""
    if ty == "bool":
        return bool(v != 0)
    if ty == "real":
        return float(v)
    if ty == "int":
        if isinstance(v, float) and not v.is_integer():
            raise UndefinedOp(f"non-integral literal {v!r} at int")
        return int(v)
    raise UndefinedOp(f"no literal {v!r} at {ty}")


def convert(v, src: str, dst: str):
    if src == dst:
        return v
    if dst == "bool":
        return v != 0
    if dst == "real":
        return float(v)
    if dst == "int":
        return int(v)  # truncation toward zero
    raise UndefinedOp(f"conv {src} -> {dst}")


_ARITH_FNS = {"+": operator.add, "-": operator.sub, "·": operator.mul, "^": operator.pow}
_CMP_FNS = {"=": operator.eq, "≠": operator.ne, "<": operator.lt, "≤": operator.le,
            ">": operator.gt, "≥": operator.ge}


def _ground(e: SymExpr, fallback=None) -> str:
    t = e.ty
    if isinstance(t, Ground):
        return t.name
    if fallback is not None:
        return fallback
    raise UndefinedOp(f"expression {show(e)} is not ground-typed ({t})")


def compile_sym(e: SymExpr, type_of: Mapping[str, Ground] | None = None):
    """Compile ``e`` into ``f(env, params) -> value``.

    Untyped nodes fall back to ``type_of`` for wires and to the runtime type of
    the computed values elsewhere.
    """
    type_of = type_of or {}

    def dyn(node, val_ty):
        return node.ty.name if isinstance(node.ty, Ground) else val_ty

    if isinstance(e, Lit):
        if isinstance(e.ty, Ground):
            val = coerce(e.value, e.ty.name)
        elif e.ty is None:
            val = e.value
        else:
            raise UndefinedOp(f"literal {show(e)} at non-ground type")
        return lambda env, params: val
    if isinstance(e, WireVar):
        name = e.name

        def wire(env, params):
            try:
                return env[name]
            except KeyError:
                raise UnboundWire(f"wire {name} is not bound") from None
        return wire
    if isinstance(e, Param):
        name = e.name

        def param(env, params):
            try:
                return params[name]
            except KeyError:
                raise UnboundWire(f"parameter {name} is not bound") from None
        return param
    if isinstance(e, BinOp):
        lf, rf = compile_sym(e.left, type_of), compile_sym(e.right, type_of)
        op = e.op
        if op == "∧":
            return lambda env, params: bool(lf(env, params)) and bool(rf(env, params))
        if op == "∨":
            return lambda env, params: bool(lf(env, params)) or bool(rf(env, params))
        if op in _CMP_FNS:
            fn = _CMP_FNS[op]
            return lambda env, params: fn(lf(env, params), rf(env, params))
        fn = _ARITH_FNS[op]
        static = e.ty.name if isinstance(e.ty, Ground) else None
        if static == "bool":
            def undefined(env, params):
                raise UndefinedOp(f"{op} is not defined at bool")
            return undefined
        if static is not None:
            return lambda env, params: fn(lf(env, params), rf(env, params))

        def arith(env, params):
            a, b = lf(env, params), rf(env, params)
            if isinstance(a, bool) or isinstance(b, bool):
                raise UndefinedOp(f"{op} is not defined at bool")
            return fn(a, b)
        return arith
    if isinstance(e, UnOp):
        af = compile_sym(e.arg, type_of)
        if e.op == "¬":
            return lambda env, params: not af(env, params)

        def neg(env, params):
            a = af(env, params)
            if isinstance(a, bool) or (isinstance(e.ty, Ground) and e.ty.name == "bool"):
                raise UndefinedOp("unary minus is not defined at bool")
            return -a
        return neg
    if isinstance(e, Conv):
        af = compile_sym(e.arg, type_of)
        target = e.target.name if e.target is not None else None

        def conv(env, params):
            a = af(env, params)
            src = _arg_type(e.arg, a, type_of)
            dst = dyn(e, target or src)
            return convert(a, src, dst)
        return conv
    if isinstance(e, SBool):
        af = compile_sym(e.arg, type_of)

        def sbool(env, params):
            a = af(env, params)
            dst = dyn(e, _arg_type(e.arg, a, type_of))
            return coerce(1 if a != 0 else 0, dst)
        return sbool
    if isinstance(e, Call):
        fs = [compile_sym(a, type_of) for a in e.args]
        fn = e.fn

        def call(env, params):
            vals = [f(env, params) for f in fs]
            ty = dyn(e, _arg_type(e.args[0], vals[0], type_of))
            if fn in ("s_exp", "s_sin"):
                if ty != "real":
                    raise UndefinedOp(f"{fn} is only defined at real")
                return (math.exp if fn == "s_exp" else math.sin)(vals[0])
            truth = [v != 0 for v in vals]
            if fn == "s_and":
                r = truth[0] and truth[1]
            elif fn == "s_or":
                r = truth[0] or truth[1]
            else:
                r = not truth[0]
            return coerce(1 if r else 0, ty)
        return call
    if isinstance(e, If):
        cf, tf, ef = (compile_sym(c, type_of) for c in e.children())
        return lambda env, params: tf(env, params) if cf(env, params) else ef(env, params)
    raise TypeError(f"not a symbolic expression: {e!r}")


def _arg_type(node: SymExpr, value, type_of) -> str:
    if isinstance(node.ty, Ground):
        return node.ty.name
    if isinstance(node, WireVar) and node.name in type_of:
        return type_of[node.name].name
    return type_of_value(value).name


def eval_sym(e: SymExpr, env: Mapping, type_of: Mapping[str, Ground] | None = None,
             params: Mapping | None = None):
    """Evaluate ``e`` under the valuation ``env`` with overload resolution by type."""
    return compile_sym(e, type_of)(env, params or {})
