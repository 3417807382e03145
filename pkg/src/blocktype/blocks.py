"""The block library: each basic block kind as an update transformer, per translation mode."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .diagram import Block, BlockKind, port_counts
from .errors import UnsupportedKind
from .pt import Update
from .symbolic import BinOp, Call, Conv, If, Lit, Param, SBool, SymExpr, UnOp, WireVar
from .terms import REAL, Ground, fresh

INPUT_NAMES = ("x", "y", "z", "u", "v", "w")
DT = "dt"


@dataclass(frozen=True)
class Mode:
    """Translation options: value parameters for constants, generic typing, final instantiation."""

    const_params: bool = False
    generic: bool = False
    target_type: Ground | None = None

    @property
    def parameterize_constants(self) -> bool:
        return self.const_params or self.generic


DEFAULT = Mode()


def input_names(n: int) -> list[str]:
    if n <= len(INPUT_NAMES):
        return list(INPUT_NAMES[:n])
    return [f"x{i + 1}" for i in range(n)]


def _scalar_names(base: str, n: int) -> list[str]:
    return [base] if n == 1 else [f"{base}{i + 1}" for i in range(n)]


def literal(value, ty=None, param: str | None = None) -> SymExpr:
    if not isinstance(value, bool) and value < 0:
        return UnOp("-", Lit(-value, param, ty), ty)
    return Lit(value, param, ty)


def constant_expr(block: Block, mode: Mode, param: str | None = None) -> SymExpr:
    value = block.params["value"]
    declared = block.params.get("out_type")
    if mode.generic:
        v = fresh({"simulink"})
        if declared == "bool":
            return SBool(literal(value, v, param), v)
        return literal(value, v, param)
    if declared is not None:
        return literal(value, Ground(declared))
    if isinstance(value, float):
        return literal(value, REAL)
    return literal(value, None, param)


def integrator(dt: SymExpr | None = None, width: int = 1, elem_type=None) -> Update:
    """``[x, s ↝ s, s + x·dt]``, elementwise over ``width`` signals."""
    dt = dt if dt is not None else Param(DT)
    xs, ss = _scalar_names("x", width), _scalar_names("s", width)
    outs = [WireVar(s) for s in ss] + [BinOp("+", WireVar(s), BinOp("·", WireVar(x), dt)) for x, s in zip(xs, ss)]
    types = None if elem_type is None else (elem_type,) * (2 * width)
    return Update(tuple(xs + ss), tuple(outs), types)


def unit_delay(width: int = 1, elem_type=None) -> Update:
    """``[x, s ↝ s, x]``."""
    xs, ss = _scalar_names("x", width), _scalar_names("s", width)
    outs = [WireVar(s) for s in ss] + [WireVar(x) for x in xs]
    types = None if elem_type is None else (elem_type,) * (2 * width)
    return Update(tuple(xs + ss), tuple(outs), types)


def _nary(op: str, names, generic_fn: str | None = None) -> SymExpr:
    vs = [WireVar(n) for n in names]
    if generic_fn:
        return reduce(lambda a, b: Call(generic_fn, (a, b)), vs)
    return reduce(lambda a, b: BinOp(op, a, b), vs)


def _lift(name: str) -> SymExpr:
    # x ≠ 0, with the literal typed like x
    return BinOp("≠", WireVar(name), Lit(0))


def lower_block(block: Block, mode: Mode = DEFAULT, widths=None, param: str | None = None) -> Update:
    """The update transformer of a basic block.

    ``widths`` gives the signal count of each in-port (default all 1); only
    Mux, Demux, Integrator and UnitDelay accept wider ports. ``param`` names
    the value parameter attached to a Constant under ``--const``/``--generic``.
    """
    k = block.kind
    n_in, n_out = port_counts(block)
    widths = list(widths) if widths is not None else [1] * n_in
    gen = mode.generic
    if k in (BlockKind.SCOPE, BlockKind.OUTPORT, BlockKind.INPORT, BlockKind.SUBSYSTEM):
        raise UnsupportedKind(f"{k} blocks are not transformers", block.id)

    in_lab = tuple(f"{block.id}.in{i}" for i in range(n_in) for _ in range(widths[i]))
    ins: tuple = ()
    types = None

    if k is BlockKind.CONSTANT:
        outs = (constant_expr(block, mode, param),)
    elif k in (BlockKind.ADD, BlockKind.SUB, BlockKind.MUL):
        ins = tuple(input_names(n_in))
        op = {BlockKind.ADD: "+", BlockKind.SUB: "-", BlockKind.MUL: "·"}[k]
        outs = (_nary(op, ins),)
        if gen:
            types = (fresh({"simulink"}),) * n_in
    elif k is BlockKind.GAIN:
        ins = ("x",)
        gain = block.params.get("gain", 1)
        if gen:
            v = fresh({"simulink"})
            types = (v,)
            factor = literal(gain, v)
        else:
            factor = literal(gain, REAL if isinstance(gain, float) else None)
        outs = (BinOp("·", factor, WireVar("x")),)
    elif k is BlockKind.RELATIONAL:
        ins = ("x", "y")
        cmp = BinOp(block.params.get("op", "="), WireVar("x"), WireVar("y"))
        if gen:
            types = (fresh({"simulink"}),) * 2
            r = fresh({"simulink"})
            outs = (If(cmp, Lit(1, ty=r), Lit(0, ty=r), r),)
        else:
            outs = (cmp,)
    elif k in (BlockKind.AND, BlockKind.OR):
        ins = tuple(input_names(n_in))
        if gen:
            types = (fresh({"simulink"}),) * n_in
            outs = (_nary("", ins, "s_and" if k is BlockKind.AND else "s_or"),)
        else:
            types = tuple(fresh({"numeral_nzero"}) for _ in ins)
            op = "∧" if k is BlockKind.AND else "∨"
            outs = (reduce(lambda a, b: BinOp(op, a, b), [_lift(n) for n in ins]),)
    elif k is BlockKind.NOT:
        ins = ("x",)
        if gen:
            types = (fresh({"simulink"}),)
            outs = (Call("s_not", (WireVar("x"),)),)
        else:
            types = (fresh({"numeral_nzero"}),)
            outs = (UnOp("¬", _lift("x")),)
    elif k is BlockKind.CONVERT:
        ins = ("x",)
        if gen:
            types = (fresh({"simulink"}),)
            outs = (Conv(WireVar("x"), None, fresh({"simulink"})),)
        else:
            target = block.params.get("target")
            outs = (Conv(WireVar("x"), Ground(target) if target else None),)
    elif k is BlockKind.INTEGRATOR:
        elem = fresh({"simulink"}) if gen else REAL
        u = integrator(width=widths[0], elem_type=elem)
        ins, outs, types = u.inputs, u.outputs, u.in_types
    elif k is BlockKind.UNIT_DELAY:
        # the shared element type ties the state to the delayed input
        u = unit_delay(width=widths[0], elem_type=fresh({"simulink"} if gen else ()))
        ins, outs, types = u.inputs, u.outputs, u.in_types
    elif k in (BlockKind.MUX, BlockKind.DEMUX):
        ins = tuple(f"x{i + 1}" for i in range(sum(widths)))
        outs = tuple(WireVar(n) for n in ins)
        if gen:
            types = tuple(fresh({"simulink"}) for _ in ins)
    else:
        raise UnsupportedKind(f"no lowering for {k}", block.id)

    if k in (BlockKind.INTEGRATOR, BlockKind.UNIT_DELAY):
        # state inputs and the echoed state carry the port labels of the block's output
        w = widths[0]
        in_lab = in_lab + (f"{block.id}.out0",) * w
        out_lab = (f"{block.id}.out0",) * w + (None,) * w
    elif k is BlockKind.DEMUX:
        out_lab = tuple(f"{block.id}.out{j}" for j in range(n_out) for _ in range(len(outs) // n_out))
    else:
        out_lab = tuple(f"{block.id}.out{j}" for j in range(len(outs))) if len(outs) == n_out \
            else (f"{block.id}.out0",) * len(outs)
    return Update(ins, outs, types, block.id, in_lab, out_lab)
