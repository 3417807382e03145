"""Hierarchical block diagrams: blocks, ports, wires, structural validation and flattening."""

from __future__ import annotations

import graphlib
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import UnboundSubsystemPort


class BlockKind(str, Enum):
    CONSTANT = "Constant"
    ADD = "Add"
    SUB = "Sub"
    MUL = "Mul"
    GAIN = "Gain"
    RELATIONAL = "Relational"
    AND = "And"
    OR = "Or"
    NOT = "Not"
    CONVERT = "Convert"
    INTEGRATOR = "Integrator"
    UNIT_DELAY = "UnitDelay"
    MUX = "Mux"
    DEMUX = "Demux"
    INPORT = "Inport"
    OUTPORT = "Outport"
    SCOPE = "Scope"
    SUBSYSTEM = "Subsystem"

    def __str__(self):
        return self.value


STATEFUL = {BlockKind.INTEGRATOR, BlockKind.UNIT_DELAY}
RELATIONAL_OPS = ("=", "≠", "<", "≤", ">", "≥")


@dataclass(frozen=True)
class Port:
    owner: str
    direction: str  # "in" | "out"
    index: int
    arity: int = 1

    @property
    def key(self) -> str:
        return f"{self.owner}.{self.direction}{self.index}"


@dataclass(frozen=True)
class Wire:
    source: tuple  # (block id, out-port index)
    sink: tuple  # (block id, in-port index)

    def __str__(self):
        return f"{self.source[0]}.out{self.source[1]} -> {self.sink[0]}.in{self.sink[1]}"


@dataclass(frozen=True)
class Block:
    id: str
    kind: BlockKind
    params: dict = field(default_factory=dict)
    diagram: "Diagram | None" = None  # child of a Subsystem

    @property
    def n_in(self) -> int:
        return port_counts(self)[0]

    @property
    def n_out(self) -> int:
        return port_counts(self)[1]

    def ports(self) -> list[Port]:
        n_in, n_out = port_counts(self)
        return [Port(self.id, "in", i) for i in range(n_in)] + [Port(self.id, "out", i) for i in range(n_out)]


@dataclass(frozen=True)
class Diagram:
    name: str
    blocks: tuple = ()
    wires: tuple = ()

    def block(self, block_id: str) -> Block:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise KeyError(block_id)

    def index(self) -> dict[str, Block]:
        return {b.id: b for b in self.blocks}

    def drivers(self) -> dict[tuple, tuple]:
        """(sink block, in index) -> (source block, out index)."""
        return {w.sink: w.source for w in self.wires}

    def basic_block_count(self) -> int:
        n = 0
        for b in self.blocks:
            n += b.diagram.basic_block_count() if b.kind is BlockKind.SUBSYSTEM and b.diagram else 1
        return n


def subsystem_ports(child: Diagram, kind: BlockKind) -> list[Block]:
    """Child Inport/Outport blocks ordered by their ``port`` parameter, then by position."""
    ports = [b for b in child.blocks if b.kind is kind]
    return sorted(ports, key=lambda b: (b.params.get("port", ports.index(b)), ports.index(b)))


def port_counts(block: Block) -> tuple[int, int]:
    k, p = block.kind, block.params
    if k is BlockKind.CONSTANT or k is BlockKind.INPORT:
        return 0, 1
    if k in (BlockKind.ADD, BlockKind.MUL, BlockKind.AND, BlockKind.OR, BlockKind.MUX):
        return int(p.get("inputs", 2)), 1
    if k in (BlockKind.SUB, BlockKind.RELATIONAL):
        return 2, 1
    if k in (BlockKind.GAIN, BlockKind.NOT, BlockKind.CONVERT, BlockKind.INTEGRATOR, BlockKind.UNIT_DELAY):
        return 1, 1
    if k is BlockKind.DEMUX:
        return 1, int(p.get("outputs", 2))
    if k is BlockKind.OUTPORT:
        return 1, 0
    if k is BlockKind.SCOPE:
        return int(p.get("inputs", 1)), 0
    if k is BlockKind.SUBSYSTEM:
        if block.diagram is None:
            return 0, 0
        return (len(subsystem_ports(block.diagram, BlockKind.INPORT)),
                len(subsystem_ports(block.diagram, BlockKind.OUTPORT)))
    raise ValueError(f"unknown block kind {k!r}")


_MIN_INPUTS = {BlockKind.ADD: 2, BlockKind.MUL: 2, BlockKind.AND: 1, BlockKind.OR: 1,
               BlockKind.MUX: 1, BlockKind.SCOPE: 1}


@dataclass(frozen=True)
class StructuralError:
    code: str  # DanglingWire | DuplicatePort | StatelessCycle | BadPortCount | BadLiteral
    message: str
    where: str

    def __str__(self):
        return f"{self.code}: {self.message} ({self.where})"


def validate(diagram: Diagram, _path: str = "") -> list[StructuralError]:
    errors: list[StructuralError] = []
    seen: dict[str, Block] = {}
    for b in diagram.blocks:
        where = _path + b.id
        if b.id in seen:
            errors.append(StructuralError("DuplicatePort", f"block id {b.id!r} is used twice", where))
        seen[b.id] = b
        n_in, n_out = port_counts(b)
        lo = _MIN_INPUTS.get(b.kind)
        if lo is not None and n_in < lo:
            errors.append(StructuralError("BadPortCount", f"{b.kind} needs at least {lo} inputs, has {n_in}", where))
        if b.kind is BlockKind.CONSTANT and b.params.get("out_type") in ("int", "bool") \
                and not float(b.params.get("value", 0)).is_integer():
            errors.append(StructuralError("BadLiteral", f"value {b.params['value']!r} is not a whole number", where))
        if b.kind is BlockKind.DEMUX and n_out < 1:
            errors.append(StructuralError("BadPortCount", "Demux needs at least one output", where))
        if b.kind is BlockKind.SUBSYSTEM:
            if b.diagram is None:
                errors.append(StructuralError("BadPortCount", "subsystem without a child diagram", where))
            else:
                errors.extend(validate(b.diagram, where + "/"))

    fed: dict[tuple, list[Wire]] = {}
    for w in diagram.wires:
        src, dst = seen.get(w.source[0]), seen.get(w.sink[0])
        if src is None or not 0 <= w.source[1] < port_counts(src)[1]:
            errors.append(StructuralError("DanglingWire", f"no output port {w.source[0]}.out{w.source[1]}",
                                          _path + str(w)))
            continue
        if dst is None or not 0 <= w.sink[1] < port_counts(dst)[0]:
            errors.append(StructuralError("DanglingWire", f"no input port {w.sink[0]}.in{w.sink[1]}",
                                          _path + str(w)))
            continue
        fed.setdefault(w.sink, []).append(w)
    for (bid, idx), ws in fed.items():
        if len(ws) > 1:
            errors.append(StructuralError("DuplicatePort", f"input {bid}.in{idx} has {len(ws)} drivers",
                                          f"{_path}{bid}.in{idx}"))
    for b in diagram.blocks:
        for i in range(port_counts(b)[0]):
            if (b.id, i) not in fed:
                errors.append(StructuralError("BadPortCount", f"input {b.id}.in{i} is not connected",
                                              f"{_path}{b.id}.in{i}"))

    if not errors and not _path:
        try:
            topo_order(flatten(diagram))
        except graphlib.CycleError as exc:
            cycle = exc.args[1]
            errors.append(StructuralError("StatelessCycle", "cycle without Integrator or UnitDelay: "
                                          + " -> ".join(cycle), cycle[0]))
        except UnboundSubsystemPort as exc:
            errors.append(StructuralError("BadPortCount", exc.message, exc.location or ""))
    return errors


def topo_order(diagram: Diagram) -> list[Block]:
    """Evaluation order over the stateless dependency graph, ties broken by block position.

    Outputs of stateful blocks depend only on their state, so wires leaving them
    impose no ordering. Raises ``graphlib.CycleError`` on a stateless cycle.
    """
    index = diagram.index()
    position = {b.id: i for i, b in enumerate(diagram.blocks)}
    ts = graphlib.TopologicalSorter()
    for b in diagram.blocks:
        ts.add(b.id)
    for w in diagram.wires:
        if index[w.source[0]].kind not in STATEFUL:
            ts.add(w.sink[0], w.source[0])
    ts.prepare()
    order = []
    while ts.is_active():
        ready = sorted(ts.get_ready(), key=position.__getitem__)
        for bid in ready:
            order.append(index[bid])
            ts.done(bid)
    return order


def _prefixed(d: Diagram, prefix: str) -> Diagram:
    blocks = tuple(replace(b, id=prefix + b.id) for b in d.blocks)
    wires = tuple(Wire((prefix + w.source[0], w.source[1]), (prefix + w.sink[0], w.sink[1])) for w in d.wires)
    return Diagram(d.name, blocks, wires)


def flatten(diagram: Diagram) -> Diagram:
    """Inline every subsystem; child block ids gain a ``<subsystem>/`` prefix."""
    if not any(b.kind is BlockKind.SUBSYSTEM for b in diagram.blocks):
        return diagram
    blocks: list[Block] = []
    wires: list[Wire] = list(diagram.wires)
    for b in diagram.blocks:
        if b.kind is not BlockKind.SUBSYSTEM:
            blocks.append(b)
            continue
        child = _prefixed(flatten(b.diagram), b.id + "/")
        ins = subsystem_ports(child, BlockKind.INPORT)
        outs = subsystem_ports(child, BlockKind.OUTPORT)
        in_ids = {p.id: k for k, p in enumerate(ins)}
        out_ids = {p.id: k for k, p in enumerate(outs)}
        parent_src = {w.sink[1]: w.source for w in wires if w.sink[0] == b.id}
        child_drv = {w.sink: w.source for w in child.wires}

        def resolve(src, b=b, in_ids=in_ids, parent_src=parent_src):
            if src[0] in in_ids:
                k = in_ids[src[0]]
                if k not in parent_src:
                    raise UnboundSubsystemPort(f"subsystem input {k} has no driver", f"{b.id}.in{k}")
                return parent_src[k]
            return src

        out_src = {}
        for p in outs:
            if (p.id, 0) not in child_drv:
                raise UnboundSubsystemPort(f"subsystem output {out_ids[p.id]} has no driver", p.id)
            out_src[out_ids[p.id]] = resolve(child_drv[(p.id, 0)])
        kept = [w for w in wires if w.sink[0] != b.id]
        wires = [Wire(out_src[w.source[1]], w.sink) if w.source[0] == b.id else w for w in kept]
        for w in child.wires:
            if w.sink[0] in out_ids:
                continue
            wires.append(Wire(resolve(w.source), w.sink))
        for k in range(len(ins)):
            if k not in parent_src and any(w.source[0] == ins[k].id for w in child.wires):
                raise UnboundSubsystemPort(f"subsystem input {k} has no driver", f"{b.id}.in{k}")
        blocks.extend(x for x in child.blocks if x.id not in in_ids and x.id not in out_ids)
    return Diagram(diagram.name, tuple(blocks), tuple(wires))
