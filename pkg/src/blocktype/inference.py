"""Type inference for PT expressions: elaboration, free type parameters, instantiation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import BlockTypeError, ClassViolation, UnificationError
from .pt import Feedback, Id, Named, Parallel, PTExpr, Serial, Update, arity, in_labels
from .symbolic import (
    ARITH, COMPARE, LOGIC, ORDERED, BinOp, Call, Conv, If, Lit, Param,
    SBool, SymExpr, UnOp, WireVar, walk,
)
from .terms import (
    BOOL, INSTANCES, PT, Ground, InstanceTable, Subst, TypeTerm, Var, fresh, ftv,
    require, tuple_type, unify_into,
)


@dataclass
class Elaboration:
    """A PT expression whose every node carries its resolved type."""

    pt: PTExpr
    type: PT
    subst: Subst
    params: dict = field(default_factory=dict)  # value parameter -> type

    @property
    def param_types(self) -> list:
        return list(self.params.items())


def _block_of(label: str | None) -> str | None:
    if label is None:
        return None
    return label.rsplit(".", 1)[0]


class _Inferencer:
    def __init__(self, table):
        self.s = Subst()
        self.table = table
        self.params: dict[str, TypeTerm] = {}

    def unify(self, a, b, where=None):
        try:
            unify_into(self.s, a, b, self.table)
        except UnificationError as exc:
            raise BlockTypeError(exc, where, [b for b in [_block_of(where)] if b]) from None

    def require(self, t, classes, where=None):
        try:
            require(self.s, t, classes, self.table)
        except UnificationError as exc:
            raise BlockTypeError(exc, where, [b for b in [_block_of(where)] if b]) from None

    def param(self, name: str) -> TypeTerm:
        if name not in self.params:
            self.params[name] = fresh()
        return self.params[name]

    # -- expressions -------------------------------------------------------

    def expr(self, e: SymExpr, env: dict, where) -> SymExpr:
        t = fresh()
        if e.ty is not None:
            self.unify(t, e.ty, where)
        if isinstance(e, Lit):
            if e.param is not None:
                self.unify(t, self.param(e.param), where)
            if isinstance(e.value, bool):
                self.unify(t, BOOL, where)
            elif e.value == 0:
                self.require(t, {"zero"}, where)
            else:
                self.require(t, {"numeral"} | ({"uminus"} if e.value < 0 else set()), where)
            return replace(e, ty=t)
        if isinstance(e, WireVar):
            if e.name not in env:
                raise BlockTypeError(UnificationError(f"unbound wire {e.name}"), where)
            self.unify(t, env[e.name], where)
            return replace(e, ty=t)
        if isinstance(e, Param):
            self.unify(t, self.param(e.name), where)
            return replace(e, ty=t)
        kids = [self.expr(k, env, where) for k in e.children()]
        if isinstance(e, BinOp):
            a, b = kids
            if e.op in ARITH:
                self.unify(a.ty, b.ty, where)
                self.unify(t, a.ty, where)
                self.require(t, {ARITH[e.op]}, where)
            elif e.op in COMPARE:
                self.unify(a.ty, b.ty, where)
                if e.op in ORDERED:
                    self.require(a.ty, {"ord"}, where)
                self.unify(t, BOOL, where)
            elif e.op in LOGIC:
                self.unify(a.ty, BOOL, where)
                self.unify(b.ty, BOOL, where)
                self.unify(t, BOOL, where)
            else:
                raise ValueError(f"unknown operator {e.op}")
        elif isinstance(e, UnOp):
            (a,) = kids
            if e.op == "¬":
                self.unify(a.ty, BOOL, where)
                self.unify(t, BOOL, where)
            else:
                self.unify(t, a.ty, where)
                self.require(t, {"uminus"}, where)
        elif isinstance(e, Conv):
            if e.target is not None:
                self.unify(t, e.target, where)
        elif isinstance(e, SBool):
            self.require(kids[0].ty, {"zero"}, where)
            self.require(t, {"zero", "numeral"}, where)
        elif isinstance(e, Call):
            for k in kids:
                self.unify(t, k.ty, where)
            self.require(t, {"simulink"}, where)
        elif isinstance(e, If):
            c, a, b = kids
            self.unify(c.ty, BOOL, where)
            self.unify(a.ty, b.ty, where)
            self.unify(t, a.ty, where)
        else:
            raise TypeError(f"not a symbolic expression: {e!r}")
        return replace(e.rebuild(tuple(kids)), ty=t)

    # -- transformers ------------------------------------------------------

    def pt(self, p: PTExpr, given: list | None = None):
        """Return (typed expression, input types, output types).

        ``given`` are the already-known types flowing into ``p``; threading them
        in lets a clash surface at the annotated port that causes it.
        """
        if isinstance(p, Update):
            where = p.origin
            if given is not None and len(given) != len(p.inputs):
                raise BlockTypeError(UnificationError(f"{len(given)} signals into {len(p.inputs)} inputs"), where)
            ins = []
            for i, name in enumerate(p.inputs):
                t = given[i] if given is not None else fresh()
                ann = p.in_types[i] if p.in_types is not None else None
                if ann is not None:
                    label = p.in_labels[i] if p.in_labels else where
                    self.unify(t, ann, label)
                ins.append(t)
            env = dict(zip(p.inputs, ins))
            outs = tuple(self.expr(e, env, where) for e in p.outputs)
            return replace(p, outputs=outs, in_types=tuple(ins)), ins, [e.ty for e in outs]
        if isinstance(p, Id):
            ts = list(given) if given is not None else [fresh() for _ in range(p.width)]
            return p, ts, list(ts)
        if isinstance(p, Serial):
            left, ai, ao = self.pt(p.left, given)
            n_right = arity(p.right)[0]
            if len(ao) != n_right:
                raise BlockTypeError(
                    UnificationError(f"{len(ao)} signals into {n_right} inputs"),
                    getattr(p.right, "origin", None))
            right, bi, bo = self.pt(p.right, ao)
            return Serial(left, right), ai, bo
        if isinstance(p, Parallel):
            k = arity(p.left)[0]
            left, ai, ao = self.pt(p.left, None if given is None else given[:k])
            right, bi, bo = self.pt(p.right, None if given is None else given[k:])
            return Parallel(left, right), ai + bi, ao + bo
        if isinstance(p, Feedback):
            body, bi, bo = self.pt(p.body, None if given is None else [fresh()] + list(given))
            if not bi or not bo:
                raise ValueError("feedback needs at least one input and one output")
            self.unify(bo[0], bi[0], in_labels(p.body)[0])
            return Feedback(body), bi[1:], bo[1:]
        if isinstance(p, Named):
            for name in p.params:
                self.param(name)
            body, bi, bo = self.pt(p.body, given)
            return replace(p, body=body), bi, bo
        raise TypeError(f"not a PT expression: {p!r}")


def map_pt_types(p: PTExpr, fn) -> PTExpr:
    """Apply ``fn`` to every type stored in ``p``."""
    from .symbolic import map_types
    if isinstance(p, Update):
        ins = tuple(fn(t) if t is not None else None for t in p.in_types) if p.in_types else p.in_types
        return replace(p, in_types=ins, outputs=tuple(map_types(e, lambda t: fn(t) if t is not None else None)
                                                      for e in p.outputs))
    if isinstance(p, Id):
        return p
    if isinstance(p, (Serial, Parallel)):
        return type(p)(map_pt_types(p.left, fn), map_pt_types(p.right, fn))
    if isinstance(p, Feedback):
        return Feedback(map_pt_types(p.body, fn))
    if isinstance(p, Named):
        return replace(p, body=map_pt_types(p.body, fn))
    raise TypeError(f"not a PT expression: {p!r}")


def elaborate(pt: PTExpr, table=INSTANCES) -> Elaboration:
    """Infer the principal type of ``pt`` and annotate every node with its type."""
    inf = _Inferencer(InstanceTable(table))
    typed, ins, outs = inf.pt(pt)
    s = inf.s.normalized()
    typed = map_pt_types(typed, s.apply)
    ty = PT(tuple_type(s.apply(t) for t in ins), tuple_type(s.apply(t) for t in outs))
    params = {k: s.apply(v) for k, v in inf.params.items()}
    return Elaboration(typed, ty, s, params)


def infer(pt: PTExpr, table=INSTANCES) -> tuple[PT, Subst]:
    el = elaborate(pt, table)
    return el.type, el.subst


def pt_types(p: PTExpr):
    """Every type stored in a (typed) PT expression, in traversal order."""
    if isinstance(p, Update):
        for t in p.in_types or ():
            if t is not None:
                yield t
        for e in p.outputs:
            for n in walk(e):
                if n.ty is not None:
                    yield n.ty
    elif isinstance(p, (Serial, Parallel)):
        yield from pt_types(p.left)
        yield from pt_types(p.right)
    elif isinstance(p, Feedback):
        yield from pt_types(p.body)
    elif isinstance(p, Named):
        yield from pt_types(p.body)


def port_types(p: PTExpr) -> dict:
    """Port label -> type, read off the labelled updates of a typed expression."""
    out = {}
    if isinstance(p, Update):
        if p.in_labels and p.in_types:
            for lab, t in zip(p.in_labels, p.in_types):
                if lab is not None:
                    out[lab] = t
        if p.out_labels:
            for lab, e in zip(p.out_labels, p.outputs):
                if lab is not None:
                    out[lab] = e.ty
    elif isinstance(p, (Serial, Parallel)):
        out.update(port_types(p.left))
        out.update(port_types(p.right))
    elif isinstance(p, (Feedback, Named)):
        out.update(port_types(p.body))
    return out


def free_type_params(definition, inferred: TypeTerm | None = None) -> list[Var]:
    """Type variables used inside ``definition`` that its signature does not mention.

    ``definition`` is a PT expression or an :class:`Elaboration`. Parameters of
    the definition count as part of its signature.
    """
    el = definition if isinstance(definition, Elaboration) else elaborate(definition)
    visible = set(ftv(inferred if inferred is not None else el.type))
    for t in el.params.values():
        visible |= set(ftv(t))
    hidden: dict[int, Var] = {}
    for t in pt_types(el.pt):
        for v in t.vars():
            if v.id not in visible:
                hidden.setdefault(v.id, v)
    return list(hidden.values())


def specialize(el: Elaboration, mapping: dict, table=INSTANCES) -> Elaboration:
    """Instantiate variables by id (``mapping``: var id -> Ground), checking classes."""
    table = InstanceTable(table)
    s = Subst()
    for v in _all_vars(el):
        if v.id in mapping:
            g = mapping[v.id]
            missing = table.admits(g.name, v.classes)
            if missing:
                raise ClassViolation(g, missing, var=v)
            s[v.id] = g
    return Elaboration(map_pt_types(el.pt, s.apply), s.apply(el.type), s,
                       {k: s.apply(t) for k, t in el.params.items()})


def _all_vars(el: Elaboration) -> list[Var]:
    seen: dict[int, Var] = {}
    for t in [el.type, *el.params.values(), *pt_types(el.pt)]:
        for v in t.vars():
            seen.setdefault(v.id, v)
    return list(seen.values())


def instantiate_all(el: Elaboration, target: Ground, table=INSTANCES) -> Elaboration:
    """Replace every remaining type variable by ``target``."""
    return specialize(el, {v.id: target for v in _all_vars(el)}, table)


def is_ground(el: Elaboration) -> bool:
    return not _all_vars(el)


__all__ = [
    "Elaboration", "elaborate", "infer", "free_type_params", "specialize", "instantiate_all",
    "is_ground", "port_types", "pt_types", "map_pt_types",
]
