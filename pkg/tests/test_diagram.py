import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blocktype.check import check
from blocktype.diagram import (
    STATEFUL, Block, BlockKind, Diagram, Wire, flatten, port_counts, topo_order, validate,
)
from blocktype.errors import DiagramError, UndefinedOp
from blocktype.simulate import SimConfig, run

from gen import random_diagram

K = BlockKind


def w(src: str, dst: str) -> Wire:
    a, b = src.split(".out"), dst.split(".in")
    return Wire((a[0], int(a[1])), (b[0], int(b[1])))


def _codes(d):
    return sorted(e.code for e in validate(d))


class TestValidate:
    def test_clean(self, corpus):
        assert validate(corpus("integrated_sum")) == []

    def test_dangling_wire(self):
        d = Diagram("D", (Block("c", K.CONSTANT, {"value": 1}), Block("o", K.OUTPORT)),
                    (w("c.out0", "o.in0"), w("c.out3", "o.in0")))
        assert "DanglingWire" in _codes(d)

    def test_duplicate_block_id(self):
        d = Diagram("D", (Block("c", K.CONSTANT, {"value": 1}), Block("c", K.CONSTANT, {"value": 2})))
        assert _codes(d) == ["DuplicatePort"]

    def test_input_driven_twice(self):
        d = Diagram("D", (Block("a", K.CONSTANT, {"value": 1}), Block("b", K.CONSTANT, {"value": 2}),
                          Block("o", K.OUTPORT)), (w("a.out0", "o.in0"), w("b.out0", "o.in0")))
        assert _codes(d) == ["DuplicatePort"]

    def test_unconnected_input(self):
        d = Diagram("D", (Block("g", K.GAIN), Block("o", K.OUTPORT)), (w("g.out0", "o.in0"),))
        errs = validate(d)
        assert [e.code for e in errs] == ["BadPortCount"]
        assert errs[0].where == "g.in0"

    def test_add_needs_two_inputs(self):
        d = Diagram("D", (Block("a", K.ADD, {"inputs": 1}),))
        assert "BadPortCount" in _codes(d)

    def test_stateless_cycle(self):
        d = Diagram("D", (Block("g", K.GAIN), Block("n", K.GAIN)), (w("g.out0", "n.in0"), w("n.out0", "g.in0")))
        assert _codes(d) == ["StatelessCycle"]

    def test_cycle_through_delay_is_fine(self):
        d = Diagram("D", (Block("g", K.GAIN), Block("z", K.UNIT_DELAY)), (w("g.out0", "z.in0"), w("z.out0", "g.in0")))
        assert validate(d) == []

    def test_fractional_int_constant(self):
        d = Diagram("D", (Block("c", K.CONSTANT, {"value": 0.5, "out_type": "int"}),))
        assert _codes(d) == ["BadLiteral"]

    def test_nested_errors_carry_path(self):
        child = Diagram("C", (Block("g", K.GAIN), Block("out", K.OUTPORT)), (w("g.out0", "out.in0"),))
        d = Diagram("D", (Block("S", K.SUBSYSTEM, diagram=child),))
        assert any(e.where == "S/g.in0" for e in validate(d))

    def test_unbound_subsystem_input(self):
        child = Diagram("C", (Block("in", K.INPORT), Block("out", K.OUTPORT)), (w("in.out0", "out.in0"),))
        d = Diagram("D", (Block("S", K.SUBSYSTEM, diagram=child), Block("o", K.OUTPORT)), (w("S.out0", "o.in0"),))
        errs = validate(d)
        assert errs and errs[0].code == "BadPortCount"


class TestStructure:
    def test_port_counts(self):
        assert port_counts(Block("m", K.MUX, {"inputs": 3})) == (3, 1)
        assert port_counts(Block("d", K.DEMUX, {"outputs": 4})) == (1, 4)
        assert port_counts(Block("s", K.SCOPE)) == (1, 0)

    def test_ports(self):
        keys = [p.key for p in Block("r", K.RELATIONAL).ports()]
        assert keys == ["r.in0", "r.in1", "r.out0"]

    def test_topo_order_ignores_stateful_edges(self, corpus):
        order = [b.id for b in topo_order(corpus("integrated_sum"))]
        assert order.index("ConstA") < order.index("Add") < order.index("Integrator")

    def test_flatten_prefixes_child_ids(self, corpus):
        flat = flatten(corpus("subsystem_gain"))
        ids = {b.id for b in flat.blocks}
        assert "Sub/Gain" in ids
        assert not any(b.kind is K.SUBSYSTEM for b in flat.blocks)
        assert validate(flat) == []

    def test_flatten_is_identity_without_subsystems(self, corpus):
        d = corpus("constant_sum")
        assert flatten(d) is d

    def test_basic_block_count_counts_children(self, corpus):
        assert corpus("subsystem_gain").basic_block_count() == 6


def _wrap_block(d: Diagram, victim: str) -> Diagram:
    """Move one block into a subsystem of its own, wiring Inports/Outports around it."""
    b = d.block(victim)
    n_in, n_out = port_counts(b)
    child_blocks = [Block(f"i{k}", K.INPORT, {"port": k}) for k in range(n_in)]
    child_blocks.append(b)
    child_blocks += [Block(f"o{k}", K.OUTPORT, {"port": k}) for k in range(n_out)]
    child_wires = [Wire((f"i{k}", 0), (b.id, k)) for k in range(n_in)]
    child_wires += [Wire((b.id, k), (f"o{k}", 0)) for k in range(n_out)]
    child = Diagram("W", tuple(child_blocks), tuple(child_wires))
    sub = Block("W", K.SUBSYSTEM, diagram=child)
    blocks = tuple(sub if x.id == victim else x for x in d.blocks)
    wires = tuple(Wire(("W", x.source[1]) if x.source[0] == victim else x.source,
                       ("W", x.sink[1]) if x.sink[0] == victim else x.sink) for x in d.wires)
    return Diagram(d.name, blocks, wires)


def _out_column(result, cfg):
    try:
        return run(result, cfg).column("out")
    except UndefinedOp as exc:
        return str(exc)


class TestFlattenSemantics:
    @given(st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_wrapping_a_block_preserves_the_trace(self, seed):
        rng = random.Random(seed)
        d = random_diagram(rng, 7, ("real",))
        candidates = [b.id for b in d.blocks
                      if b.kind not in STATEFUL and b.kind not in (K.INPORT, K.OUTPORT) and port_counts(b)[0]]
        if not candidates:
            return
        wrapped = _wrap_block(d, rng.choice(candidates))
        assert validate(wrapped) == []
        try:
            plain = check(d)
        except DiagramError as exc:
            with pytest.raises(type(exc)):
                check(wrapped)
            return
        cfg = SimConfig(dt=0.1, horizon=1.0)
        assert _out_column(plain, cfg) == _out_column(check(wrapped), cfg)
