"""Reading and writing the ``.bdt.json`` diagram format."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

from .diagram import RELATIONAL_OPS, Block, BlockKind, Diagram, Wire
from .errors import ParseError

FORMAT_VERSION = 1
EXTENSION = ".bdt.json"
TYPE_NAMES = ("bool", "real", "int")

_OP_ALIASES = {"==": "=", "!=": "≠", "~=": "≠", "<=": "≤", ">=": "≥"}
_PORT_RE = re.compile(r"^(.+)\.(in|out)(\d+)$", re.S)
_COUNT_PARAMS = ("inputs", "outputs", "port")


@dataclass(frozen=True)
class DiagramDocument:
    root: Diagram
    format_version: int = FORMAT_VERSION


class _Locator:
    """Best-effort line/column for semantic errors, found by searching the source text."""

    def __init__(self, text: str):
        self.text = text

    def at(self, offset: int) -> tuple[int, int]:
        offset = max(0, min(offset, len(self.text)))
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def find(self, *needles) -> tuple[int, int]:
        start = 0
        for n in needles:
            if n is None:
                continue
            pos = self.text.find(n, start)
            if pos < 0:
                break
            start = pos
        return self.at(start)

    def error(self, kind: str, message: str, *needles) -> ParseError:
        line, col = self.find(*needles)
        return ParseError(message, line, col, kind)


def _jstr(v) -> str:
    return json.dumps(v, ensure_ascii=False)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def parse(text: bytes | str) -> DiagramDocument:
    """Parse a document; any failure is reported as a located :class:`ParseError`."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            loc = _Locator(bytes(text)[:exc.start].decode("utf-8", "replace"))
            line, col = loc.at(len(loc.text))
            raise ParseError(f"invalid UTF-8: {exc.reason}", line, col) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except RecursionError:
        raise ParseError("document nested too deeply", 1, 1) from None
    loc = _Locator(text)
    if not isinstance(data, dict):
        raise loc.error("SyntaxError", "top level must be a JSON object")
    version = data.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION or isinstance(version, bool):
        raise loc.error("SyntaxError", f"unsupported format version {version!r}", '"version"')
    try:
        root = _diagram(data, loc, "", depth=0)
    except RecursionError:
        raise ParseError("subsystems nested too deeply", 1, 1) from None
    return DiagramDocument(root, FORMAT_VERSION)


def _diagram(data: dict, loc: _Locator, default_name: str, depth: int) -> Diagram:
    name = data.get("name", default_name)
    if not isinstance(name, str):
        raise loc.error("SyntaxError", "diagram name must be a string", '"name"')
    blocks_raw = data.get("blocks", [])
    wires_raw = data.get("wires", [])
    if not isinstance(blocks_raw, list):
        raise loc.error("SyntaxError", "'blocks' must be a list", '"blocks"')
    if not isinstance(wires_raw, list):
        raise loc.error("SyntaxError", "'wires' must be a list", '"wires"')
    blocks = tuple(_block(b, loc, depth) for b in blocks_raw)
    ids = {b.id for b in blocks}
    wires = tuple(_wire(w, loc, ids) for w in wires_raw)
    return Diagram(name, blocks, wires)


def _block(raw, loc: _Locator, depth: int) -> Block:
    if not isinstance(raw, dict):
        raise loc.error("SyntaxError", "block entries must be objects", '"blocks"')
    bid, kind_name = raw.get("id"), raw.get("kind")
    if not isinstance(bid, str) or not bid:
        raise loc.error("SyntaxError", "block id must be a non-empty string", '"blocks"')
    anchor = '"id"', _jstr(bid)
    if not isinstance(kind_name, str):
        raise loc.error("SyntaxError", f"block {bid!r} has no kind", *anchor)
    try:
        kind = BlockKind(kind_name)
    except ValueError:
        raise loc.error("UnknownBlockKind", f"unknown block kind {kind_name!r}", *anchor, _jstr(kind_name)) from None
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise loc.error("SyntaxError", f"params of {bid!r} must be an object", *anchor, '"params"')
    params = _check_params(kind, dict(params), loc, anchor)
    child = None
    if kind is BlockKind.SUBSYSTEM:
        sub = raw.get("diagram")
        if not isinstance(sub, dict):
            raise loc.error("SyntaxError", f"subsystem {bid!r} needs a 'diagram' object", *anchor)
        child = _diagram(sub, loc, bid, depth + 1)
    elif "diagram" in raw:
        raise loc.error("SyntaxError", f"only subsystems carry a child diagram ({bid!r})", *anchor, '"diagram"')
    return Block(bid, kind, params, child)


def _check_params(kind: BlockKind, params: dict, loc: _Locator, anchor) -> dict:
    def bad(kind_, msg, key):
        return loc.error(kind_, msg, *anchor, _jstr(key))

    for key in ("out_type", "target"):
        if key in params and params[key] is not None:
            if params[key] not in TYPE_NAMES:
                raise bad("BadTypeName", f"unknown type name {params[key]!r}", key)
    if kind is BlockKind.CONSTANT:
        if "value" not in params:
            raise loc.error("BadLiteral", "constant without a value", *anchor)
        if not _is_number(params["value"]):
            raise bad("BadLiteral", f"constant value {params['value']!r} is not a number", "value")
        if params.get("out_type") in ("int", "bool") and not float(params["value"]).is_integer():
            raise bad("BadLiteral", f"value {params['value']!r} is not a whole number for {params['out_type']}",
                      "value")
    if kind is BlockKind.GAIN:
        if not _is_number(params.get("gain", 1)):
            raise bad("BadLiteral", f"gain {params['gain']!r} is not a number", "gain")
    if kind is BlockKind.RELATIONAL:
        op = params.get("op", "=")
        op = _OP_ALIASES.get(op, op) if isinstance(op, str) else op
        if op not in RELATIONAL_OPS:
            raise bad("BadLiteral", f"unknown relational operator {params.get('op')!r}", "op")
        params["op"] = op
    for key in _COUNT_PARAMS:
        if key in params:
            v = params[key]
            if not isinstance(v, int) or isinstance(v, bool) or v < 0 or v > 10_000:
                raise bad("BadLiteral", f"{key} must be a small non-negative integer", key)
    return params


def _port_ref(ref, direction: str, loc: _Locator, ids: set) -> tuple:
    if not isinstance(ref, str):
        raise loc.error("SyntaxError", f"port reference must be a string, got {ref!r}", '"wires"')
    m = _PORT_RE.match(ref)
    if not m or m.group(2) != direction:
        raise loc.error("SyntaxError", f"expected '<block>.{direction}<n>', got {ref!r}", '"wires"', _jstr(ref))
    if m.group(1) not in ids:
        raise loc.error("SyntaxError", f"wire references unknown block {m.group(1)!r}", '"wires"', _jstr(ref))
    return m.group(1), int(m.group(3))


def _wire(raw, loc: _Locator, ids: set) -> Wire:
    if not isinstance(raw, dict) or "from" not in raw or "to" not in raw:
        raise loc.error("SyntaxError", "wires need 'from' and 'to'", '"wires"')
    return Wire(_port_ref(raw["from"], "out", loc, ids), _port_ref(raw["to"], "in", loc, ids))


# ------------------------------------------------------------------ output

def _dump_diagram(d: Diagram) -> dict:
    blocks = []
    for b in d.blocks:
        obj = {"id": b.id, "kind": b.kind.value, "params": dict(b.params)}
        if b.diagram is not None:
            obj["diagram"] = _dump_diagram(b.diagram)
        blocks.append(obj)
    wires = [{"from": f"{w.source[0]}.out{w.source[1]}", "to": f"{w.sink[0]}.in{w.sink[1]}"} for w in d.wires]
    return {"name": d.name, "blocks": blocks, "wires": wires}


def serialize(doc: DiagramDocument | Diagram) -> bytes:
    if isinstance(doc, Diagram):
        doc = DiagramDocument(doc)
    body = {"version": doc.format_version, **_dump_diagram(doc.root)}
    return (json.dumps(body, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def load(path) -> Diagram:
    with open(path, "rb") as fh:
        return parse(fh.read()).root


def dump(diagram: Diagram, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(diagram))
