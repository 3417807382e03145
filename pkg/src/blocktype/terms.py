"""Type terms, the class lattice and most-general unification with class constraints."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ClassViolation, Mismatch, OccursCheck

CLASSES = ("zero", "numeral", "plus", "minus", "uminus", "power", "ord", "numeral_nzero", "simulink")

# direct superclasses; closure is the reflexive-transitive hull
SUPERCLASSES: dict[str, frozenset[str]] = {
    "zero": frozenset(),
    "numeral": frozenset(),
    "plus": frozenset(),
    "minus": frozenset(),
    "uminus": frozenset(),
    "power": frozenset(),
    "ord": frozenset(),
    "numeral_nzero": frozenset({"zero", "numeral"}),
    "simulink": frozenset({"zero", "numeral", "minus", "uminus", "power", "ord", "numeral_nzero"}),
}

GROUND_TYPES = ("bool", "real", "int", "unit")


def close(classes: Iterable[str]) -> frozenset[str]:
    out: set[str] = set()
    todo = list(classes)
    while todo:
        c = todo.pop()
        if c not in SUPERCLASSES:
            raise ValueError(f"unknown type class {c!r}")
        if c not in out:
            out.add(c)
            todo.extend(SUPERCLASSES[c])
    return frozenset(out)


def minimal(classes: Iterable[str]) -> list[str]:
    """Smallest generating subset of a closed class set, in canonical order."""
    cs = set(classes)
    implied = set()
    for c in cs:
        implied |= close(SUPERCLASSES[c])
    return [c for c in CLASSES if c in cs and c not in implied]


class InstanceTable(dict):
    """Ground type name -> closed set of classes it instantiates."""

    def admits(self, ground: str, classes: Iterable[str]) -> str | None:
        """Return the first class ``ground`` fails to instantiate, or None."""
        have = self.get(ground, frozenset())
        for c in CLASSES:
            if c in classes and c not in have:
                return c
        return None


# bool carries the arithmetic superclasses of simulink without definitions;
# plus is the one arithmetic class it is denied.
INSTANCES = InstanceTable(
    real=close(CLASSES),
    int=close(c for c in CLASSES if c != "simulink"),
    bool=close({"zero", "numeral", "numeral_nzero", "simulink"}),
    unit=frozenset(),
)


class TypeTerm:
    __slots__ = ()

    def vars(self) -> Iterable["Var"]:
        return ()


@dataclass(frozen=True)
class Ground(TypeTerm):
    name: str

    def __post_init__(self):
        if self.name not in GROUND_TYPES:
            raise ValueError(f"unknown ground type {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Var(TypeTerm):
    id: int
    classes: frozenset = frozenset()

    def vars(self):
        yield self

    def __str__(self):
        return format_type(self)


@dataclass(frozen=True)
class Prod(TypeTerm):
    items: tuple

    def __post_init__(self):
        if len(self.items) == 1:
            raise ValueError("a product needs zero or at least two factors")

    def vars(self):
        for t in self.items:
            yield from t.vars()

    def __str__(self):
        return format_type(self)


@dataclass(frozen=True)
class PT(TypeTerm):
    input: TypeTerm
    output: TypeTerm

    def vars(self):
        yield from self.input.vars()
        yield from self.output.vars()

    def __str__(self):
        return format_type(self)


BOOL, REAL, INT, UNIT = (Ground(n) for n in ("bool", "real", "int", "unit"))

_ids = itertools.count(1)


def fresh(classes: Iterable[str] = ()) -> Var:
    return Var(next(_ids), close(classes))


def tuple_type(items) -> TypeTerm:
    items = tuple(items)
    if not items:
        return UNIT
    if len(items) == 1:
        return items[0]
    return Prod(items)


def ftv(t: TypeTerm) -> dict[int, Var]:
    """Free type variables by id, in order of first occurrence."""
    return {v.id: v for v in t.vars()}


class Subst(dict):
    """Var id -> TypeTerm. Bindings are chased on application, so the map may be triangular."""

    def apply(self, t: TypeTerm) -> TypeTerm:
        if isinstance(t, Var):
            bound = self.get(t.id)
            if bound is None:
                return t
            res = self.apply(bound)
            if res is not bound:
                self[t.id] = res  # path compression
            return res
        if isinstance(t, Prod):
            return Prod(tuple(self.apply(x) for x in t.items))
        if isinstance(t, PT):
            return PT(self.apply(t.input), self.apply(t.output))
        return t

    def normalized(self) -> "Subst":
        return Subst({k: self.apply(v) for k, v in self.items()})


def _occurs(v: Var, t: TypeTerm) -> bool:
    return any(w.id == v.id for w in t.vars())


def bind(s: Subst, v: Var, t: TypeTerm, table: Mapping = INSTANCES) -> None:
    """Extend ``s`` with ``v := t``, checking classes and occurrence. Both sides already applied."""
    if isinstance(t, Var):
        if t.id == v.id:
            return
        if t.classes >= v.classes:
            s[v.id] = t
            return
        if v.classes >= t.classes:
            s[t.id] = v
            return
        merged = fresh(v.classes | t.classes)
        s[v.id] = merged
        s[t.id] = merged
        return
    if _occurs(v, t):
        raise OccursCheck(f"{format_type(v)} occurs in {format_type(t)}")
    if isinstance(t, Ground):
        missing = InstanceTable(table).admits(t.name, v.classes)
        if missing:
            raise ClassViolation(t, missing, var=v)
    elif v.classes:
        raise ClassViolation(t, minimal(v.classes)[0], var=v)
    s[v.id] = t


def unify_into(s: Subst, t1: TypeTerm, t2: TypeTerm, table: Mapping = INSTANCES) -> None:
    t1, t2 = s.apply(t1), s.apply(t2)
    if t1 == t2:
        return
    if isinstance(t1, Var):
        bind(s, t1, t2, table)
    elif isinstance(t2, Var):
        bind(s, t2, t1, table)
    elif isinstance(t1, Prod) and isinstance(t2, Prod) and len(t1.items) == len(t2.items):
        for a, b in zip(t1.items, t2.items):
            unify_into(s, a, b, table)
    elif isinstance(t1, PT) and isinstance(t2, PT):
        unify_into(s, t1.input, t2.input, table)
        unify_into(s, t1.output, t2.output, table)
    else:
        raise Mismatch(format_type(t1), format_type(t2))


def unify(t1: TypeTerm, t2: TypeTerm, table: Mapping = INSTANCES) -> Subst:
    """Most general unifier of ``t1`` and ``t2`` as an idempotent substitution."""
    s = Subst()
    unify_into(s, t1, t2, table)
    return s.normalized()


def require(s: Subst, t: TypeTerm, classes: Iterable[str], table: Mapping = INSTANCES) -> None:
    """Constrain ``t`` to the given classes."""
    classes = close(classes)
    if classes:
        unify_into(s, t, fresh(classes), table)


def instantiate(t: TypeTerm, target: Ground, table: Mapping = INSTANCES) -> TypeTerm:
    """Replace every type variable of ``t`` by ``target``."""
    s = Subst()
    for v in ftv(t).values():
        missing = InstanceTable(table).admits(target.name, v.classes)
        if missing:
            raise ClassViolation(target, missing, location=format_type(v), var=v)
        s[v.id] = target
    return s.apply(t)


class Namer:
    """Stable 'a, 'b, ... names for variables; the first print of a variable shows its classes."""

    def __init__(self):
        self.names: dict[int, str] = {}

    def name(self, v: Var) -> str:
        if v.id not in self.names:
            n = len(self.names)
            letter = chr(ord("a") + n % 26) + (str(n // 26) if n >= 26 else "")
            self.names[v.id] = "'" + letter
        return self.names[v.id]

    def show(self, v: Var) -> str:
        first = v.id not in self.names
        name = self.name(v)
        if not first or not v.classes:
            return name
        cs = minimal(v.classes)
        return f"{name}:{cs[0]}" if len(cs) == 1 else f"{name}:{{{','.join(cs)}}}"


def format_type(t: TypeTerm, namer: Namer | None = None) -> str:
    namer = namer or Namer()
    if isinstance(t, Ground):
        return t.name
    if isinstance(t, Var):
        return namer.show(t)
    if isinstance(t, Prod):
        if not t.items:
            return "unit"
        return " × ".join(
            f"({format_type(x, namer)})" if isinstance(x, PT) else format_type(x, namer) for x in t.items
        )
    if isinstance(t, PT):
        return f"{format_type(t.input, namer)} ⇒° {format_type(t.output, namer)}"
    raise TypeError(f"not a type term: {t!r}")
