"""Diagram to PT translation.

The flattened diagram becomes one named transformer whose inputs are the
Inport signals followed by the current states, and whose outputs are the tapped
signals (Outport and Scope inputs) followed by the next states. Blocks are
composed stage by stage in evaluation order; each stage routes the live wires
through ``Id`` in parallel with the block's own update.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arity import compute_arity, in_key, out_key
from .blocks import DT, DEFAULT, Mode, lower_block
from .diagram import STATEFUL, BlockKind, Diagram, flatten, port_counts, topo_order
from .pt import Id, Named, Parallel, PTExpr, Serial, Update
from .symbolic import WireVar
from .terms import Ground, fresh

CONST_PARAM_NAMES = ("x", "y", "z", "u", "v", "w")


@dataclass
class Translation:
    name: str
    pt: Named
    inputs: list  # (top-level scalar name, Inport block id)
    states: list  # (state scalar name, stateful block id)
    taps: list  # tap names, positional with the first outputs of ``pt``
    params: list  # value parameters, constants first then dt
    arities: dict
    flat: Diagram
    wire_names: dict = field(default_factory=dict)  # out-port key -> scalar names

    @property
    def n_taps(self) -> int:
        return len(self.taps)


def _param_names(n: int) -> list[str]:
    return list(CONST_PARAM_NAMES[:n]) + [f"c{i + 1}" for i in range(len(CONST_PARAM_NAMES), n)]


def _inport_type(block, mode: Mode):
    declared = block.params.get("out_type")
    if mode.generic:
        return fresh({"simulink"})
    return Ground(declared) if declared else None


def _route(live: list[str], picked: list[str]) -> Update:
    return Update(tuple(live), tuple(WireVar(n) for n in live + picked))


def translate(diagram: Diagram, mode: Mode = DEFAULT, arities: dict | None = None) -> Translation:
    flat = flatten(diagram)
    arities = arities if arities is not None else compute_arity(flat)
    order = topo_order(flat)
    drivers = flat.drivers()

    taken: set[str] = set()

    def claim(name: str) -> str:
        base, i = name, 1
        while name in taken:
            i += 1
            name = f"{base}{i}" if base == "s" else f"{base}_{i}"
        taken.add(name)
        return name

    wires: dict[str, list[str]] = {}
    inputs, states = [], []
    for b in flat.blocks:
        if b.kind is BlockKind.INPORT:
            n = claim(b.id)
            wires[out_key(b.id, 0)] = [n]
            inputs.append((n, b.id))
    for b in flat.blocks:
        if b.kind in STATEFUL:
            names = [claim("s") for _ in range(arities[out_key(b.id, 0)])]
            wires[out_key(b.id, 0)] = names
            states.extend((n, b.id) for n in names)

    constants = [b for b in flat.blocks if b.kind is BlockKind.CONSTANT
                 and (mode.generic or (mode.const_params and b.params.get("out_type") is None))]
    const_param = dict(zip((b.id for b in constants), _param_names(len(constants))))

    def sources(b) -> list[str]:
        out = []
        for i in range(port_counts(b)[0]):
            src = drivers[(b.id, i)]
            out.extend(wires[out_key(*src)])
        return out

    def widths(b) -> list[int]:
        return [arities[in_key(b.id, i)] for i in range(port_counts(b)[0])]

    live = [n for n, _ in inputs] + [n for n, _ in states]
    first_labels = tuple([f"{bid}.out0" for _, bid in inputs] + [None] * len(states))
    first_types = tuple([_inport_type(flat.block(bid), mode) for _, bid in inputs] + [None] * len(states))
    stages: list[PTExpr] = []
    uses_dt = False

    def stage(block_pt: PTExpr, picked: list[str], produced: list[str]):
        nonlocal live
        stages.append(Serial(_route(live, picked), Parallel(Id(len(live)), block_pt)) if live
                      else Serial(_route([], picked), block_pt))
        live = live + produced

    sinks = (BlockKind.INPORT, BlockKind.OUTPORT, BlockKind.SCOPE)
    for b in order:
        if b.kind in STATEFUL or b.kind in sinks:
            continue
        u = lower_block(b, mode, widths(b), const_param.get(b.id))
        n_out = port_counts(b)[1]
        per_port = len(u.outputs) // n_out
        produced = []
        for j in range(n_out):
            names = [claim(f"{b.id}.out{j}" + (f"_{i}" if per_port > 1 else "")) for i in range(per_port)]
            wires[out_key(b.id, j)] = names
            produced.extend(names)
        stage(u, sources(b), produced)

    next_names = []
    for b in flat.blocks:
        if b.kind not in STATEFUL:
            continue
        w = arities[out_key(b.id, 0)]
        u = lower_block(b, mode, widths(b))
        uses_dt = uses_dt or b.kind is BlockKind.INTEGRATOR
        keep = [claim(f"{b.id}.next" + (f"_{i}" if w > 1 else "")) for i in range(w)]
        echo = [f"_e{i}" for i in range(w)]
        drop = Update(tuple(echo + keep), tuple(WireVar(n) for n in keep))
        state_names = wires[out_key(b.id, 0)]
        stage(Serial(u, drop), sources(b) + state_names, keep)
        next_names.extend(keep)

    taps, tap_wires = [], []
    for b in flat.blocks:
        if b.kind not in (BlockKind.OUTPORT, BlockKind.SCOPE):
            continue
        n_in = port_counts(b)[0]
        for i in range(n_in):
            names = wires[out_key(*drivers[(b.id, i)])]
            for j, n in enumerate(names):
                tag = b.id if n_in == 1 else f"{b.id}.in{i}"
                taps.append(tag if len(names) == 1 else f"{tag}[{j}]")
                tap_wires.append(n)

    final = Update(tuple(live), tuple(WireVar(n) for n in tap_wires + next_names))
    if stages:
        first = stages[0]
        route = first.left
        stages_pt = Serial(Serial(Update(route.inputs, route.outputs, first_types, None, first_labels), first.right),
                           _chain(stages[1:], final))
    else:
        stages_pt = Update(final.inputs, final.outputs, first_types, None, first_labels)
    params = list(const_param.values()) + ([DT] if uses_dt else [])
    named = Named(flat.name or "diagram", tuple(params), stages_pt)
    return Translation(flat.name, named, inputs, states, taps, params, arities, flat, wires)


def _chain(stages: list[PTExpr], final: Update) -> PTExpr:
    body: PTExpr = final
    for s in reversed(stages):
        body = Serial(s, body)
    return body
