"""The checking pipeline: validate, flatten, arity, translate, infer, simplify."""

from __future__ import annotations

from dataclasses import dataclass, field

from .arity import compute_arity
from .blocks import DEFAULT, DT, Mode
from .diagram import Diagram, flatten, validate
from .errors import StructuralViolation
from .inference import Elaboration, elaborate, free_type_params, instantiate_all
from .pt import Update, show_update
from .simplify import normalize
from .terms import Namer, format_type
from .translate import Translation, translate


@dataclass
class Definition:
    name: str
    params: list  # (name, type)
    elaboration: Elaboration
    simplified: Update
    warnings: list = field(default_factory=list)

    def signature(self) -> str:
        namer = Namer()
        ps = ", ".join(f"{n}:{format_type(t, namer)}" for n, t in self.params)
        return f"{self.name}({ps}) :: {format_type(self.elaboration.type, namer)}"

    @property
    def type_text(self) -> str:
        return format_type(self.elaboration.type)

    def equation(self) -> str:
        ps = ", ".join(n for n, _ in self.params)
        return f"{self.name}({ps}) = {show_update(self.simplified)}"

    def to_json(self) -> dict:
        namer = Namer()
        params = [{"name": n, "type": format_type(t, namer)} for n, t in self.params]
        return {
            "name": self.name,
            "params": params,
            "type": format_type(self.elaboration.type, namer),
            "signature": self.signature(),
            "simplified": show_update(self.simplified),
            "warnings": list(self.warnings),
        }


@dataclass
class CheckResult:
    name: str
    mode: Mode
    translation: Translation
    definitions: list

    @property
    def main(self) -> Definition:
        return self.definitions[0]

    @property
    def final(self) -> Definition:
        """The definition to simulate: the instantiated one when ``--type`` was given."""
        return self.definitions[-1]

    @property
    def arities(self) -> dict:
        return self.translation.arities

    @property
    def warnings(self) -> list:
        return [w for d in self.definitions for w in d.warnings]


def free_variable_warning(name: str, el: Elaboration) -> str | None:
    hidden = free_type_params(el)
    if not hidden:
        return None
    namer = Namer()
    return f"Additional type variable(s) in specification of {name}: " + \
        ", ".join(format_type(v, namer) for v in hidden)


def _definition(name: str, el: Elaboration, param_names) -> Definition:
    params = [(p, el.params[p]) for p in param_names if p in el.params]
    d = Definition(name, params, el, normalize(el.pt))
    w = free_variable_warning(name, el)
    if w:
        d.warnings.append(w)
    return d


def prepare(diagram: Diagram):
    """Validate and flatten; return (flat diagram, arity map)."""
    errors = validate(diagram)
    if errors:
        raise StructuralViolation(errors)
    flat = flatten(diagram)
    return flat, compute_arity(flat)


def check(diagram: Diagram, mode: Mode = DEFAULT) -> CheckResult:
    flat, arities = prepare(diagram)
    tr = translate(flat, mode, arities)
    el = elaborate(tr.pt)
    name = tr.pt.name
    defs = [_definition(name, el, tr.params)]
    if mode.target_type is not None:
        inst = instantiate_all(el, mode.target_type)
        defs.append(_definition(f"{name}_type", inst, [p for p in tr.params if p == DT]))
    return CheckResult(name, mode, tr, defs)
