"""Signal counts carried by each port, found by bounded fixpoint iteration."""

from __future__ import annotations

from .diagram import Block, BlockKind, Diagram, flatten, port_counts
from .errors import ArityMismatch, NonConvergence

ArityMap = dict  # "blk.in0" / "blk.out0" -> positive int

# blocks whose single output carries as many signals as their single input
PASS_THROUGH = {BlockKind.INTEGRATOR, BlockKind.UNIT_DELAY}
SINKS = {BlockKind.OUTPORT, BlockKind.SCOPE}


def in_key(block_id: str, i: int) -> str:
    return f"{block_id}.in{i}"


def out_key(block_id: str, i: int) -> str:
    return f"{block_id}.out{i}"


def initial_arities(diagram: Diagram) -> ArityMap:
    ar: ArityMap = {}
    for b in diagram.blocks:
        n_in, n_out = port_counts(b)
        ar.update({in_key(b.id, i): 1 for i in range(n_in)})
        ar.update({out_key(b.id, i): 1 for i in range(n_out)})
    return ar


def _outputs_for(block: Block, ins: list[int]) -> list[int]:
    k = block.kind
    if k is BlockKind.MUX:
        return [sum(ins)]
    if k is BlockKind.DEMUX:
        n_out = port_counts(block)[1]
        return [max(1, ins[0] // n_out)] * n_out
    if k in PASS_THROUGH:
        return [ins[0]]
    if k in SINKS:
        return []
    for i, a in enumerate(ins):
        if a > 1:
            raise ArityMismatch(f"{k} accepts scalar signals only, got {a} signals", in_key(block.id, i))
    return [1] * port_counts(block)[1]


def _update(block: Block, ar: ArityMap) -> bool:
    n_in, n_out = port_counts(block)
    outs = _outputs_for(block, [ar[in_key(block.id, i)] for i in range(n_in)])
    changed = False
    for i, a in enumerate(outs):
        key = out_key(block.id, i)
        if ar[key] != a:
            ar[key] = a
            changed = True
    return changed


def update_arity(block: Block, arities: ArityMap) -> tuple[ArityMap, bool]:
    """Recompute the out-port arities of ``block`` from its in-port arities."""
    ar = dict(arities)
    changed = _update(block, ar)
    return ar, changed


def _check_demux(diagram: Diagram, ar: ArityMap) -> None:
    for b in diagram.blocks:
        if b.kind is BlockKind.DEMUX:
            n, k = ar[in_key(b.id, 0)], port_counts(b)[1]
            if n % k:
                raise ArityMismatch(f"cannot split {n} signals evenly over {k} outputs", in_key(b.id, 0))


def compute_arity(diagram: Diagram, bound: int | None = None, order=None) -> ArityMap:
    """Sweep ``update_arity`` over all blocks until nothing changes.

    At most ``bound`` sweeps are made (default: the number of basic blocks, counted before flattening).
    ``order`` optionally permutes the blocks visited in each sweep.
    """
    flat = flatten(diagram)
    blocks = list(order) if order is not None else list(flat.blocks)
    bound = max(1, diagram.basic_block_count() if bound is None else bound)
    ar = initial_arities(flat)
    fanout: dict[str, list[str]] = {}
    for w in flat.wires:
        fanout.setdefault(out_key(*w.source), []).append(in_key(*w.sink))

    for _ in range(bound):
        before = dict(ar)
        changed = False
        for b in blocks:
            if _update(b, ar):
                changed = True
            for i in range(port_counts(b)[1]):
                src = out_key(b.id, i)
                for dst in fanout.get(src, ()):
                    if ar[dst] != ar[src]:
                        ar[dst] = ar[src]
                        changed = True
        if not changed:
            _check_demux(flat, ar)
            return ar
    moving = sorted(k for k in ar if ar[k] != before[k])
    raise NonConvergence(f"arities still growing after {bound} sweeps: {', '.join(moving)}", moving, bound)
