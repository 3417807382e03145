"""Random small diagrams and an independent per-block typing oracle for property tests."""

from __future__ import annotations

import itertools
import random

from blocktype.diagram import STATEFUL, Block, BlockKind, Diagram, Wire, port_counts

GROUNDS = ("bool", "real", "int")

SOURCE_KINDS = (BlockKind.CONSTANT, BlockKind.INPORT)
INNER_KINDS = (
    BlockKind.ADD, BlockKind.SUB, BlockKind.MUL, BlockKind.GAIN, BlockKind.RELATIONAL,
    BlockKind.AND, BlockKind.OR, BlockKind.NOT, BlockKind.CONVERT, BlockKind.INTEGRATOR,
    BlockKind.UNIT_DELAY,
)
CONST_VALUES = (0, 1, 2, 3, -1, 0.5, 1.5, -2.5)


def _params(rng: random.Random, kind: BlockKind, types) -> dict:
    def maybe_type():
        return rng.choice((None,) + types)

    if kind is BlockKind.CONSTANT:
        p = {"value": rng.choice(CONST_VALUES)}
        t = maybe_type()
        if t and (t == "real" or not isinstance(p["value"], float)):
            p["out_type"] = t
        return p
    if kind is BlockKind.INPORT:
        t = maybe_type()
        return {"out_type": t} if t else {}
    if kind is BlockKind.GAIN:
        return {"gain": rng.choice((2, 3, 0.5, -1))}
    if kind is BlockKind.RELATIONAL:
        return {"op": rng.choice(("=", "≠", "<", "≤", ">", "≥"))}
    if kind in (BlockKind.AND, BlockKind.OR, BlockKind.ADD, BlockKind.MUL):
        return {"inputs": rng.choice((2, 2, 3))}
    if kind is BlockKind.CONVERT:
        t = maybe_type()
        return {"target": t} if t else {}
    return {}


def random_diagram(rng: random.Random, max_blocks: int = 8, types=GROUNDS, name: str = "R") -> Diagram:
    """A well-formed diagram of at most ``max_blocks`` blocks ending in one Outport.

    Stateless blocks read only from earlier blocks or from stateful blocks, so
    every cycle passes through an Integrator or UnitDelay.
    """
    n_inner = rng.randint(1, max_blocks - 1)
    kinds = [rng.choice(SOURCE_KINDS)]
    for _ in range(n_inner - 1):
        kinds.append(rng.choice(INNER_KINDS + SOURCE_KINDS))
    blocks = [Block(f"b{i}", k, _params(rng, k, types)) for i, k in enumerate(kinds)]
    stateful = [b.id for b in blocks if b.kind in STATEFUL]
    wires = []
    for i, b in enumerate(blocks):
        pool = sorted({blk.id for blk in blocks[:i]} | set(stateful))
        for j in range(port_counts(b)[0]):
            wires.append(Wire((rng.choice(pool), 0), (b.id, j)))
    out = Block("out", BlockKind.OUTPORT)
    wires.append(Wire((blocks[-1].id, 0), ("out", 0)))
    return Diagram(name, tuple(blocks) + (out,), tuple(wires))


# ------------------------------------------------------------- typing oracle
#
# Ground types each kind admits, written out from the block table rather than
# derived from the unifier: plus is real/int only; minus, power, ord, zero,
# numeral and numeral_nzero hold at all three grounds.

def _lit_ok(value, ty: str) -> bool:
    if isinstance(value, float) and not float(value).is_integer():
        return ty == "real"
    return True


def block_accepts(b: Block, ins: list[str], outs: list[str]) -> bool:
    k, p = b.kind, b.params
    if k is BlockKind.CONSTANT:
        declared = p.get("out_type")
        if declared:
            return outs[0] == declared and _lit_ok(p["value"], declared)
        if isinstance(p["value"], float):
            return outs[0] == "real"
        return True
    if k is BlockKind.INPORT:
        return p.get("out_type") in (None, outs[0])
    if k in (BlockKind.OUTPORT, BlockKind.SCOPE):
        return True
    if k is BlockKind.ADD:
        return len(set(ins + outs)) == 1 and outs[0] in ("real", "int")
    if k in (BlockKind.SUB, BlockKind.MUL):
        return len(set(ins + outs)) == 1
    if k is BlockKind.GAIN:
        return ins[0] == outs[0] and _lit_ok(p.get("gain", 1), outs[0])
    if k is BlockKind.RELATIONAL:
        return ins[0] == ins[1] and outs[0] == "bool"
    if k in (BlockKind.AND, BlockKind.OR, BlockKind.NOT):
        return outs[0] == "bool"
    if k is BlockKind.CONVERT:
        return p.get("target") in (None, outs[0])
    if k is BlockKind.INTEGRATOR:
        return ins[0] == "real" and outs[0] == "real"
    if k is BlockKind.UNIT_DELAY:
        return ins[0] == outs[0]
    raise ValueError(f"no oracle entry for {k}")


def wire_sources(d: Diagram) -> list[tuple]:
    """Distinct driven out-ports, in block order."""
    used = {w.source for w in d.wires}
    return [(b.id, j) for b in d.blocks for j in range(port_counts(b)[1]) if (b.id, j) in used]


def oracle_assignments(d: Diagram, grounds=GROUNDS) -> set[tuple]:
    """Every assignment of ground types to the driven out-ports that every block accepts."""
    srcs = wire_sources(d)
    drivers = d.drivers()
    result = set()
    for combo in itertools.product(grounds, repeat=len(srcs)):
        ty = dict(zip(srcs, combo))
        ok = True
        for b in d.blocks:
            n_in, n_out = port_counts(b)
            ins = [ty[drivers[(b.id, i)]] for i in range(n_in)]
            outs = [ty.get((b.id, j)) for j in range(n_out)]
            if any(o is None for o in outs):
                # undriven outputs are free: accept if some ground works
                if not any(block_accepts(b, ins, [g if o is None else o for o in outs]) for g in grounds):
                    ok = False
                    break
                continue
            if not block_accepts(b, ins, outs):
                ok = False
                break
        if ok:
            result.add(combo)
    return result


def random_value(rng: random.Random, ty: str):
    if ty == "bool":
        return rng.random() < 0.5
    if ty == "int":
        return rng.randint(-5, 5)
    return rng.choice((0.0, 1.0, -1.0)) if rng.random() < 0.1 else rng.uniform(-10, 10)


def flat_types(t) -> list:
    """The scalar factors of a tuple type."""
    from blocktype.terms import UNIT, Prod
    if t == UNIT:
        return []
    return list(t.items) if isinstance(t, Prod) else [t]


def outcome(fn, *args):
    """Result tuple, or the name of the evaluation error raised."""
    from blocktype.errors import UndefinedOp
    try:
        return fn(*args)
    except (UndefinedOp, ZeroDivisionError, OverflowError) as exc:
        return type(exc).__name__


def same_values(a, b, tol: float = 1e-12) -> bool:
    import math
    if isinstance(a, str) or isinstance(b, str):
        return a == b
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if isinstance(x, bool) or isinstance(y, bool):
            if isinstance(x, bool) != isinstance(y, bool) or x != y:
                return False
        elif isinstance(x, float) and isinstance(y, float) and math.isnan(x) and math.isnan(y):
            continue
        elif not math.isclose(x, y, rel_tol=tol, abs_tol=tol):
            return False
    return True


def refines(original, simplified, tol: float = 1e-12) -> bool:
    """``simplified`` agrees with ``original`` wherever ``original`` is defined.

    Fusion drops unused signals, so an operation undefined at its type may
    vanish along with the dead code that held it.
    """
    if isinstance(original, str):
        return True
    return same_values(original, simplified, tol)


def random_mux_network(rng: random.Random, n_blocks: int = 8, name: str = "M") -> Diagram:
    """Constants combined by Mux and split by Demux, with an optional delayed loop."""
    blocks = [Block("c0", BlockKind.CONSTANT, {"value": 1})]
    outs = [("c0", 0)]
    for i in range(1, n_blocks):
        kind = rng.choice((BlockKind.CONSTANT, BlockKind.MUX, BlockKind.MUX, BlockKind.DEMUX, BlockKind.UNIT_DELAY))
        bid = f"m{i}"
        if kind is BlockKind.CONSTANT:
            b = Block(bid, kind, {"value": i})
        elif kind is BlockKind.MUX:
            b = Block(bid, kind, {"inputs": rng.choice((2, 3))})
        elif kind is BlockKind.DEMUX:
            b = Block(bid, kind, {"outputs": rng.choice((1, 2))})
        else:
            b = Block(bid, kind)
        blocks.append(b)
        outs.extend((bid, j) for j in range(port_counts(b)[1]))
    stateful = [(b.id, 0) for b in blocks if b.kind in STATEFUL]
    wires = []
    for i, b in enumerate(blocks):
        pool = sorted({o for o in outs if int(o[0][1:]) < i} | set(stateful))
        for j in range(port_counts(b)[0]):
            wires.append(Wire(rng.choice(pool), (b.id, j)))
    out = Block("out", BlockKind.OUTPORT)
    wires.append(Wire(outs[-1], ("out", 0)))
    return Diagram(name, tuple(blocks) + (out,), tuple(wires))


def arity_outcome(diagram: Diagram, order=None):
    from blocktype.arity import compute_arity
    from blocktype.errors import DiagramError
    try:
        return compute_arity(diagram, order=order)
    except DiagramError as exc:
        return exc.code
