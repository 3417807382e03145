"""Command line: ``blocktype check|simulate|arity FILE``."""

from __future__ import annotations

import argparse
import json
import sys

from .arity import compute_arity
from .blocks import Mode
from .check import check
from .diagram import Diagram, flatten, validate
from .errors import DiagramError, NonConvergence, ParseError, StructuralViolation
from .parser import FORMAT_VERSION, load
from .simulate import SimConfig, run
from .terms import Ground

EXIT_OK, EXIT_DIAGRAM, EXIT_USAGE = 0, 1, 2

# single-dash spellings accepted for the translation options
_ALIASES = {"-const": "--const", "-generic": "--generic", "-type": "--type", "-dt": "--dt",
            "-horizon": "--horizon", "-format": "--format", "-out": "--out"}


def _diagnostic(exc: DiagramError) -> dict:
    d = {"code": exc.code, "message": exc.message, "location": exc.location}
    if isinstance(exc, ParseError):
        d.update(line=exc.line, column=exc.column, code=exc.kind)
    if isinstance(exc, NonConvergence):
        d.update(ports=list(exc.ports), bound=exc.bound)
    if isinstance(exc, StructuralViolation):
        d["errors"] = [{"code": e.code, "message": e.message, "where": e.where} for e in exc.errors]
    blocks = getattr(exc, "blocks", None)
    if blocks:
        d["blocks"] = list(blocks)
    return d


def _mode(args) -> Mode:
    target = Ground(args.type) if getattr(args, "type", None) else None
    return Mode(const_params=args.const, generic=args.generic, target_type=target)


def _emit(args, report: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(report, ensure_ascii=False, indent=2))
    else:
        for line in text_lines:
            print(line)


def _base_report(name: str) -> dict:
    return {"version": FORMAT_VERSION, "name": name, "definitions": [], "arities": {}, "diagnostics": []}


def _fail(args, report: dict, exc: DiagramError) -> int:
    report["diagnostics"].append(_diagnostic(exc))
    _emit(args, report, [f"error: {exc}"])
    return EXIT_DIAGRAM


def cmd_check(args, diagram: Diagram) -> int:
    report = _base_report(diagram.name)
    try:
        result = check(diagram, _mode(args))
    except DiagramError as exc:
        return _fail(args, report, exc)
    report["arities"] = result.arities
    report["definitions"] = [d.to_json() for d in result.definitions]
    report["diagnostics"] = [{"code": "Warning", "message": w, "location": None} for w in result.warnings]
    lines = []
    for d in result.definitions:
        lines.append(d.signature())
        lines.append(d.equation())
        lines.extend(f"warning: {w}" for w in d.warnings)
    _emit(args, report, lines)
    return EXIT_OK


def cmd_simulate(args, diagram: Diagram) -> int:
    report = _base_report(diagram.name)
    try:
        cfg = SimConfig(dt=args.dt, horizon=args.horizon)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = check(diagram, _mode(args))
        trace = run(result, cfg)
    except DiagramError as exc:
        return _fail(args, report, exc)
    csv_text = trace.to_csv()
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    final = trace.final()
    report.update(arities=result.arities, definitions=[d.to_json() for d in result.definitions],
                  final={k: v for k, v in final.items()}, steps=len(trace.rows))
    lines = [f"{k} = {v!r}" for k, v in final.items()]
    if not args.out and args.format != "json":
        lines = [csv_text.rstrip("\n")] + lines
    _emit(args, report, lines)
    return EXIT_OK


def cmd_arity(args, diagram: Diagram) -> int:
    report = _base_report(diagram.name)
    try:
        errors = validate(diagram)
        if errors:
            raise StructuralViolation(errors)
        arities = compute_arity(flatten(diagram))
    except DiagramError as exc:
        return _fail(args, report, exc)
    report["arities"] = arities
    _emit(args, report, [f"{k}: {v}" for k, v in arities.items()])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blocktype", description="Type check, translate and simulate block diagrams.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, translation=True):
        sp.add_argument("file", help="diagram in .bdt.json format")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        if translation:
            sp.add_argument("--const", action="store_true", help="value parameters carry constant types")
            sp.add_argument("--generic", action="store_true", help="type every block over class simulink")
            sp.add_argument("--type", choices=("bool", "real", "int"), help="also emit an instantiated definition")

    common(sub.add_parser("check", help="infer types and print simplified transformers"))
    sim = sub.add_parser("simulate", help="run the diagram and write a CSV trace")
    common(sim)
    sim.add_argument("--dt", type=float, default=0.01)
    sim.add_argument("--horizon", type=float, default=10.0)
    sim.add_argument("--out", help="CSV trace path (default: stdout)")
    common(sub.add_parser("arity", help="print per-port signal counts"), translation=False)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = [_ALIASES.get(a, a) for a in argv]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        diagram = load(args.file)
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        return _fail(args, _base_report(""), exc)
    handler = {"check": cmd_check, "simulate": cmd_simulate, "arity": cmd_arity}[args.command]
    return handler(args, diagram)


if __name__ == "__main__":
    sys.exit(main())
