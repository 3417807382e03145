"""Predicate-transformer expressions restricted to update transformers.

An update ``[x, s ↝ s, s + x·dt]`` maps an input tuple to output expressions.
Interfaces are flat tuples of scalars: parallel composition concatenates them,
so the explicit split/concat wrappers around tuple-valued wires are implicit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import AlgebraicLoop
from .symbolic import SymExpr, WireVar, compile_sym, free_wires, show, substitute


class PTExpr:
    __slots__ = ()

    def __str__(self):
        return show_pt(self)


@dataclass(frozen=True)
class Update(PTExpr):
    inputs: tuple
    outputs: tuple
    in_types: tuple | None = None  # optional per-input annotation
    origin: str | None = None  # block id, for diagnostics
    in_labels: tuple | None = None  # port label per input position
    out_labels: tuple | None = None

    def __post_init__(self):
        if len(set(self.inputs)) != len(self.inputs):
            raise ValueError(f"duplicate update inputs {self.inputs}")
        unbound = set().union(*(free_wires(e) for e in self.outputs)) - set(self.inputs)
        if unbound:
            raise ValueError(f"update outputs reference undeclared inputs {sorted(unbound)}")


@dataclass(frozen=True)
class Id(PTExpr):
    width: int = 1


@dataclass(frozen=True)
class Serial(PTExpr):
    left: PTExpr
    right: PTExpr


@dataclass(frozen=True)
class Parallel(PTExpr):
    left: PTExpr
    right: PTExpr


@dataclass(frozen=True)
class Feedback(PTExpr):
    body: PTExpr


@dataclass(frozen=True)
class Named(PTExpr):
    name: str
    params: tuple = ()
    body: PTExpr = field(default_factory=Id)


def const(e: SymExpr, origin: str | None = None) -> Update:
    return Update((), (e,), origin=origin)


def arity(pt: PTExpr) -> tuple[int, int]:
    """(number of inputs, number of outputs)."""
    if isinstance(pt, Update):
        return len(pt.inputs), len(pt.outputs)
    if isinstance(pt, Id):
        return pt.width, pt.width
    if isinstance(pt, Serial):
        return arity(pt.left)[0], arity(pt.right)[1]
    if isinstance(pt, Parallel):
        (a, b), (c, d) = arity(pt.left), arity(pt.right)
        return a + c, b + d
    if isinstance(pt, Feedback):
        a, b = arity(pt.body)
        return a - 1, b - 1
    if isinstance(pt, Named):
        return arity(pt.body)
    raise TypeError(f"not a PT expression: {pt!r}")


def in_labels(pt: PTExpr) -> list:
    if isinstance(pt, Update):
        return list(pt.in_labels or [None] * len(pt.inputs))
    if isinstance(pt, Id):
        return [None] * pt.width
    if isinstance(pt, Serial):
        return in_labels(pt.left)
    if isinstance(pt, Parallel):
        return in_labels(pt.left) + in_labels(pt.right)
    if isinstance(pt, Feedback):
        return in_labels(pt.body)[1:]
    if isinstance(pt, Named):
        return in_labels(pt.body)
    raise TypeError(f"not a PT expression: {pt!r}")


# ------------------------------------------------------------ combinators

def compose_serial(a: PTExpr, b: PTExpr, check: bool = True) -> Serial:
    """``a ∘ b``: the outputs of ``a`` feed the inputs of ``b``."""
    pt = Serial(a, b)
    if check:
        from .inference import infer
        infer(pt)
    return pt


def compose_parallel(a: PTExpr, b: PTExpr) -> Parallel:
    return Parallel(a, b)


def compose_feedback(body: PTExpr, check: bool = True) -> Feedback:
    """Close the loop from the first output back to the first input.

    The fed-back output may not depend instantaneously on the fed-back input.
    """
    n_in, n_out = arity(body)
    if n_in < 1 or n_out < 1:
        raise ValueError("feedback needs at least one input and one output")
    flat = fuse(body)
    if flat.inputs[0] in free_wires(flat.outputs[0]):
        raise AlgebraicLoop(f"fed-back output {show(flat.outputs[0])} depends on {flat.inputs[0]}",
                            getattr(body, "origin", None))
    pt = Feedback(body)
    if check:
        from .inference import infer
        infer(pt)
    return pt


# ------------------------------------------------------------------ fusion

_fresh_names = itertools.count()


def _rename_apart(u: Update, taken: set) -> Update:
    if not taken.intersection(u.inputs):
        return u
    mapping = {}
    names = []
    for n in u.inputs:
        m = n
        while m in taken or m in names:
            m = f"{n}_{next(_fresh_names)}"
        names.append(m)
        if m != n:
            mapping[n] = WireVar(m)
    outs = tuple(_retyped_subst(e, mapping, u) for e in u.outputs)
    return Update(tuple(names), outs, u.in_types, u.origin, u.in_labels, u.out_labels)


def _retyped_subst(e, mapping, u):
    # renamed wires keep the type the original wire node carried
    def go(x):
        if isinstance(x, WireVar) and x.name in mapping:
            return WireVar(mapping[x.name].name, x.ty)
        kids = x.children()
        return x.rebuild(tuple(go(k) for k in kids)) if kids else x
    return go(e)


def fuse(pt: PTExpr) -> Update:
    """Collapse a composite expression into one update by substitution."""
    if isinstance(pt, Update):
        return pt
    if isinstance(pt, Id):
        names = tuple(f"_i{next(_fresh_names)}" for _ in range(pt.width))
        return Update(names, tuple(WireVar(n) for n in names))
    if isinstance(pt, Named):
        return fuse(pt.body)
    if isinstance(pt, Serial):
        a, b = fuse(pt.left), fuse(pt.right)
        if len(a.outputs) != len(b.inputs):
            raise ValueError(f"serial interface mismatch: {len(a.outputs)} outputs into {len(b.inputs)} inputs")
        mapping = dict(zip(b.inputs, a.outputs))
        return Update(a.inputs, tuple(substitute(e, mapping) for e in b.outputs),
                      a.in_types, None, a.in_labels, b.out_labels)
    if isinstance(pt, Parallel):
        a = fuse(pt.left)
        b = _rename_apart(fuse(pt.right), set(a.inputs))
        types = None
        if a.in_types is not None or b.in_types is not None:
            types = (a.in_types or (None,) * len(a.inputs)) + (b.in_types or (None,) * len(b.inputs))
        return Update(a.inputs + b.inputs, a.outputs + b.outputs, types)
    if isinstance(pt, Feedback):
        body = fuse(pt.body)
        fed, first = body.inputs[0], body.outputs[0]
        if fed in free_wires(first):
            raise AlgebraicLoop(f"fed-back output {show(first)} depends on {fed}")
        rest = tuple(substitute(e, {fed: first}) for e in body.outputs[1:])
        types = body.in_types[1:] if body.in_types is not None else None
        return Update(body.inputs[1:], rest, types)
    raise TypeError(f"not a PT expression: {pt!r}")


# -------------------------------------------------------------- semantics

def compile_pt(pt: PTExpr, type_of: Mapping | None = None):
    """Compile ``pt`` into ``f(values, params) -> tuple of outputs`` (positional)."""
    if isinstance(pt, Update):
        names = pt.inputs
        if all(isinstance(e, WireVar) and e.name in names for e in pt.outputs):
            # pure routing: select by position
            idx = [names.index(e.name) for e in pt.outputs]
            return lambda values, params: tuple([values[i] for i in idx])
        fns = [compile_sym(e, type_of) for e in pt.outputs]

        def run(values, params):
            env = dict(zip(names, values))
            return tuple(f(env, params) for f in fns)
        return run
    if isinstance(pt, Id):
        return lambda values, params: tuple(values)
    if isinstance(pt, Named):
        return compile_pt(pt.body, type_of)
    if isinstance(pt, Serial):
        lf, rf = compile_pt(pt.left, type_of), compile_pt(pt.right, type_of)
        return lambda values, params: rf(lf(values, params), params)
    if isinstance(pt, Parallel):
        lf, rf = compile_pt(pt.left, type_of), compile_pt(pt.right, type_of)
        k = arity(pt.left)[0]
        return lambda values, params: lf(values[:k], params) + rf(values[k:], params)
    if isinstance(pt, Feedback):
        flat = fuse(pt.body)
        fed = flat.inputs[0]
        if fed in free_wires(flat.outputs[0]):
            raise AlgebraicLoop(f"fed-back output depends on {fed}")
        head = compile_sym(flat.outputs[0], type_of)
        rest = [compile_sym(e, type_of) for e in flat.outputs[1:]]
        names = flat.inputs[1:]

        def loop(values, params):
            env = dict(zip(names, values))
            env[fed] = head(env, params)
            return tuple(f(env, params) for f in rest)
        return loop
    raise TypeError(f"not a PT expression: {pt!r}")


def input_names(pt: PTExpr) -> tuple:
    if isinstance(pt, Update):
        return pt.inputs
    if isinstance(pt, Named):
        return input_names(pt.body)
    return fuse(pt).inputs


def denote(pt: PTExpr, v: Mapping | Sequence, params: Mapping | None = None,
           type_of: Mapping | None = None) -> tuple:
    """Run the update function of ``pt`` on one valuation.

    ``v`` is either positional or a mapping keyed by the top-level input names.
    """
    if isinstance(v, Mapping):
        v = [v[n] for n in input_names(pt)]
    n_in = arity(pt)[0]
    if len(v) != n_in:
        raise ValueError(f"expected {n_in} input values, got {len(v)}")
    return compile_pt(pt, type_of)(tuple(v), params or {})


# ---------------------------------------------------------------- printing

def show_update(u: Update) -> str:
    ins = ", ".join(u.inputs) if u.inputs else "()"
    outs = ", ".join(show(e) for e in u.outputs) if u.outputs else "()"
    return f"[{ins} ↝ {outs}]"


def show_pt(pt: PTExpr) -> str:
    if isinstance(pt, Update):
        return show_update(pt)
    if isinstance(pt, Id):
        return "Id"
    if isinstance(pt, Named):
        return f"{pt.name}({', '.join(pt.params)})" if pt.params else pt.name

    def sub(x):
        s = show_pt(x)
        return s if isinstance(x, (Update, Id, Named, Feedback)) else f"({s})"
    if isinstance(pt, Serial):
        return f"{sub(pt.left)} ∘ {sub(pt.right)}"
    if isinstance(pt, Parallel):
        return f"{sub(pt.left)} ‖ {sub(pt.right)}"
    if isinstance(pt, Feedback):
        return f"fb({show_pt(pt.body)})"
    raise TypeError(f"not a PT expression: {pt!r}")


def normalize_text(s: str) -> str:
    """Whitespace-insensitive form used for golden comparisons."""
    return "".join(s.split())
