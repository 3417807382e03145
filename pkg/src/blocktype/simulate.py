"""Discrete-time execution of a checked diagram with forward-Euler state updates."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .check import CheckResult
from .errors import UndefinedOp
from .inference import instantiate_all, is_ground
from .pt import Update, compile_pt
from .simplify import normalize
from .symbolic import coerce
from .terms import REAL, Ground


@dataclass
class SimConfig:
    dt: float = 0.01
    horizon: float = 10.0
    initial_state: dict = field(default_factory=dict)  # state name -> value
    inputs: dict = field(default_factory=dict)  # inport name -> value or f(t)

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.horizon >= 0 and math.isfinite(self.horizon)):
            raise ValueError(f"horizon must be non-negative, got {self.horizon}")

    @property
    def steps(self) -> int:
        return math.floor(self.horizon / self.dt + 1e-9)


@dataclass
class Trace:
    taps: list
    times: list = field(default_factory=list)
    rows: list = field(default_factory=list)  # one tuple of tap values per time

    def column(self, tap: str) -> list:
        i = self.taps.index(tap)
        return [r[i] for r in self.rows]

    def final(self) -> dict:
        return dict(zip(self.taps, self.rows[-1])) if self.rows else {}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", *self.taps])
        for t, row in zip(self.times, self.rows):
            w.writerow([_fmt(t), *(_fmt(v) for v in row)])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    return format(float(v), ".17g")


def ground_update(result: CheckResult, default: Ground = REAL) -> Update:
    """The simplified update of the last definition, with leftover type variables set to ``default``."""
    el = result.final.elaboration
    if is_ground(el):
        return result.final.simplified
    return normalize(instantiate_all(el, default).pt)


def _zero(ty) -> object:
    return coerce(0, ty.name) if isinstance(ty, Ground) else 0.0


def run(result: CheckResult, cfg: SimConfig, update: Update | None = None) -> Trace:
    """Step the diagram from its initial state, recording the tapped signals each step."""
    u = update if update is not None else ground_update(result)
    tr = result.translation
    step = compile_pt(u)
    n_in = len(tr.inputs)
    n_taps = len(tr.taps)
    types = list(u.in_types) if u.in_types else [None] * len(u.inputs)
    state = []
    for k, (name, _) in enumerate(tr.states):
        v = cfg.initial_state.get(name)
        ty = types[n_in + k]
        state.append(_zero(ty) if v is None else (coerce(v, ty.name) if isinstance(ty, Ground) else v))
    sources: list[Callable[[float], object]] = []
    for k, (name, _) in enumerate(tr.inputs):
        src = cfg.inputs.get(name, 0)
        ty = types[k]
        if callable(src):
            sources.append(lambda t, f=src, ty=ty: coerce(f(t), ty.name) if isinstance(ty, Ground) else f(t))
        else:
            val = coerce(src, ty.name) if isinstance(ty, Ground) else src
            sources.append(lambda t, val=val: val)
    params: Mapping = {"dt": cfg.dt}
    trace = Trace(list(tr.taps))
    for k in range(cfg.steps + 1):
        t = k * cfg.dt
        out = step(tuple(f(t) for f in sources) + tuple(state), params)
        trace.times.append(t)
        trace.rows.append(tuple(out[:n_taps]))
        state = list(out[n_taps:])
    return trace


__all__ = ["SimConfig", "Trace", "run", "ground_update", "UndefinedOp"]
