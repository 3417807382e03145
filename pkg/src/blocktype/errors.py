"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class DiagramError(Exception):
    """Base class for errors that make a diagram unusable (CLI exit status 1)."""

    code = "DiagramError"

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def __str__(self) -> str:
        if self.location:
            return f"{self.code}: {self.message} at {self.location}"
        return f"{self.code}: {self.message}"


class ParseError(DiagramError):
    code = "ParseError"

    def __init__(self, message: str, line: int = 1, column: int = 1, kind: str = "SyntaxError"):
        super().__init__(message, f"{line}:{column}")
        self.line = line
        self.column = column
        self.kind = kind

    def __str__(self) -> str:
        return f"{self.kind} at line {self.line}, column {self.column}: {self.message}"


class UnboundSubsystemPort(DiagramError):
    code = "UnboundSubsystemPort"


class ArityMismatch(DiagramError):
    code = "ArityMismatch"


class NonConvergence(DiagramError):
    code = "NonConvergence"

    def __init__(self, message: str, ports=(), bound: int = 0):
        super().__init__(message)
        self.ports = tuple(ports)
        self.bound = bound


class UnificationError(DiagramError):
    code = "UnificationError"


class Mismatch(UnificationError):
    code = "Mismatch"

    def __init__(self, left, right, location: str | None = None):
        super().__init__(f"{left} vs {right}", location)
        self.left = left
        self.right = right


class ClassViolation(UnificationError):
    code = "ClassViolation"

    def __init__(self, ground, cls: str, location: str | None = None, var=None):
        super().__init__(f"{ground} lacks class {cls}", location)
        self.ground = ground
        self.cls = cls
        self.var = var


class OccursCheck(UnificationError):
    code = "OccursCheck"


class BlockTypeError(DiagramError):
    """Type inference failure, blamed on the port (or block) where unification broke."""

    code = "TypeError"

    def __init__(self, cause: UnificationError, location: str | None = None, blocks=()):
        super().__init__(cause.message, location)
        self.cause = cause
        self.blocks = tuple(blocks)


class AlgebraicLoop(DiagramError):
    code = "AlgebraicLoop"


class UnsupportedKind(DiagramError):
    code = "UnsupportedKind"


class UndefinedOp(DiagramError):
    code = "UndefinedOp"


class UnboundWire(DiagramError):
    code = "UnboundWire"


class StructuralViolation(DiagramError):
    """One or more structural errors reported by validation."""

    code = "StructuralError"

    def __init__(self, errors):
        self.errors = list(errors)
        first = self.errors[0]
        super().__init__("; ".join(f"{e.code}: {e.message}" for e in self.errors), first.where)
        self.code = first.code
