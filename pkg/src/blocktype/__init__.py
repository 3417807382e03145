"""Type inference, translation and simulation for hierarchical block diagrams."""

from .blocks import Mode, lower_block
from .check import CheckResult, Definition, check
from .diagram import Block, BlockKind, Diagram, Port, Wire, flatten, validate
from .errors import DiagramError
from .parser import DiagramDocument, load, parse, serialize
from .simulate import SimConfig, Trace, run
from .translate import translate

__all__ = [
    "Block", "BlockKind", "CheckResult", "Definition", "Diagram", "DiagramDocument", "DiagramError",
    "Mode", "Port", "SimConfig", "Trace", "Wire", "check", "flatten", "load", "lower_block", "parse",
    "run", "serialize", "translate", "validate",
]
