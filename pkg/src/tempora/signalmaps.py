"""Extensional signal maps: quantizers, projections and a causality check."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .errors import BranchCapError, PreconditionError, UncoveredValueError
from .signals import ProductSpace, RationalInterval, Signal, project
from .timecore import TimeAxis, TimeScaleTransformation, as_fraction

POINT_TO_POINT = "point-to-point"
SET_TO_POINT = "set-to-point"
DEFAULT_BRANCH_CAP = 64


@dataclass(frozen=True)
class PhiEntry:
    """One ``(gamma, tau)`` pair.  ``gamma`` is a tuple over the external grid,
    defined exactly on ``0..tau.external_reach``."""

    gamma: tuple
    tau: TimeScaleTransformation

    @property
    def reach(self) -> int:
        return self.tau.external_reach

    def gamma_signal(self, axis: TimeAxis, space=None) -> Signal:
        return Signal(axis, self.gamma, space)


@dataclass(frozen=True)
class Cell:
    symbol: str
    interval: RationalInterval


@dataclass(frozen=True)
class QuantizerSpec:
    cells: tuple
    mode: str
    external_axis: TimeAxis
    repeat_period: Optional[Fraction] = None

    def __post_init__(self):
        cells = tuple(self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells:
            raise ValueError("quantizer needs at least one cell")
        syms = [c.symbol for c in cells]
        if len(set(syms)) != len(syms):
            raise ValueError("quantizer symbols must be distinct")
        if self.mode not in (POINT_TO_POINT, SET_TO_POINT):
            raise ValueError(f"unknown quantizer mode {self.mode!r}")
        if self.repeat_period is not None:
            rp = as_fraction(self.repeat_period)
            if rp <= 0:
                raise ValueError("repeat period must be positive")
            object.__setattr__(self, "repeat_period", rp)

    @property
    def symbols(self) -> tuple:
        return tuple(c.symbol for c in self.cells)

    def cell(self, symbol) -> RationalInterval:
        for c in self.cells:
            if c.symbol == symbol:
                return c.interval
        raise KeyError(symbol)

    def classify(self, value) -> tuple:
        """Symbols whose cell contains ``value`` (the set-valued discretization)."""
        return tuple(c.symbol for c in self.cells if c.interval.contains(value))

    def hull(self) -> RationalInterval:
        lo = min(self.cells, key=lambda c: (c.interval.lo, c.interval.lo_open)).interval
        hi = max(self.cells, key=lambda c: (c.interval.hi, not c.interval.hi_open)).interval
        return RationalInterval(lo.lo, hi.hi, lo.lo_open, hi.hi_open)


def branch_cap() -> int:
    raw = os.environ.get("TEMPORA_BRANCH_CAP")
    if raw is None or raw == "":
        return DEFAULT_BRANCH_CAP
    cap = int(raw)
    if cap < 1:
        raise ValueError("TEMPORA_BRANCH_CAP must be >= 1")
    return cap


def _memberships(spec: QuantizerSpec, w: Signal) -> list:
    if not w.is_total():
        raise PreconditionError("quantizer input must be total on its axis")
    member = []
    for t, v in enumerate(w.values):
        syms = spec.classify(v)
        if not syms:
            raise UncoveredValueError(f"value {v} at tick {t} lies in no cell", tick=t, value=v)
        member.append(frozenset(syms))
    return member


def _next_event(member, step, last, symbol, repeat_period):
    """Next event tick after ``last`` and whether it is a repeat."""
    n = len(member)
    for t in range(last + 1, n):
        if symbol not in member[t]:
            return t, False
        if repeat_period is not None and (t - last) * step >= repeat_period:
            return t, True
    return None, False


def _entries(spec, axis, branches):
    k_max = spec.external_axis.horizon
    n = axis.size
    out = set()
    for gamma, events, nxt in branches:
        vals = [None] * n
        if spec.mode == POINT_TO_POINT:
            for k, t in enumerate(events):
                vals[t] = k
        else:
            bounds = list(events) + [nxt if nxt is not None else n]
            for k in range(len(events)):
                for t in range(bounds[k], bounds[k + 1]):
                    vals[t] = k
        g = tuple(gamma) + (None,) * (k_max + 1 - len(gamma))
        out.add(PhiEntry(g, TimeScaleTransformation(tuple(vals), k_max)))
    return frozenset(out)


def quantize(spec: QuantizerSpec, w: Signal, cap: Optional[int] = None) -> frozenset:
    """All ``(gamma, tau)`` pairs the event-triggered quantizer assigns to ``w``.

    Overlapping cells make the map nondeterministic; branches are expanded one
    external tick at a time and bounded by ``cap``.
    """
    member = _memberships(spec, w)
    cap = branch_cap() if cap is None else cap
    step = w.axis.step
    k_max = spec.external_axis.horizon
    rp = spec.repeat_period

    frontier = [((q,), (0,)) for q in spec.symbols if q in member[0]]
    done = []
    while frontier:
        if len(frontier) + len(done) > cap:
            raise BranchCapError(f"more than {cap} quantizer branches")
        grown = []
        for gamma, events in frontier:
            t, repeat = _next_event(member, step, events[-1], gamma[-1], rp)
            if t is None or len(events) == k_max + 1:
                if len(events) == 1 and t is None and rp is None:
                    continue  # never leaves its first cell: no infinite symbol stream
                done.append((gamma, events, t))
                continue
            if repeat:
                grown.append((gamma + (gamma[-1],), events + (t,)))
            else:
                for q in spec.symbols:
                    if q in member[t]:
                        grown.append((gamma + (q,), events + (t,)))
        frontier = grown
    return _entries(spec, w.axis, done)


def quantize_with_lookahead(spec: QuantizerSpec, w: Signal, cap: Optional[int] = None) -> frozenset:
    """Variant that repeats the first symbol only when ``w`` never leaves its
    cell over the whole grid.  Deciding this needs the future of ``w``, so the
    resulting map is anticipating; it exists as a negative example."""
    member = _memberships(spec, w)
    plain = QuantizerSpec(spec.cells, spec.mode, spec.external_axis, None)
    out = set(quantize(plain, w, cap))
    step = w.axis.step
    k_max = spec.external_axis.horizon
    period = spec.repeat_period if spec.repeat_period is not None else step
    for q in spec.symbols:
        if all(q in m for m in member):
            events = [0]
            for t in range(1, len(member)):
                if len(events) == k_max + 1:
                    break
                if (t - events[-1]) * step >= period:
                    events.append(t)
            nxt = None
            gamma = (q,) * len(events)
            out |= _entries(plain, w.axis, [(gamma, tuple(events), nxt)])
    return frozenset(out)


def identity_entry(gamma_values: tuple, size: int, external_horizon: int) -> PhiEntry:
    """Entry with identity tau on the defined prefix of ``gamma_values``."""
    defined = [t for t, v in enumerate(gamma_values) if v is not None]
    if defined != list(range(len(defined))):
        raise PreconditionError("identity tau needs a signal defined on an initial segment")
    vals = tuple(t if t < len(defined) else None for t in range(size))
    g = tuple(gamma_values[: len(defined)]) + (None,) * (external_horizon + 1 - len(defined))
    return PhiEntry(g, TimeScaleTransformation(vals, external_horizon))


def projection_map(component):
    """Signal map ``w -> {(project(w, component), identity)}`` with T_E = T."""

    def phi(w: Signal) -> frozenset:
        if w.space is not None and not isinstance(w.space, ProductSpace):
            raise PreconditionError("projection map needs a product value space")
        y = project(w, component)
        return frozenset({identity_entry(y.values, w.axis.size, w.axis.horizon)})

    phi.component = component
    return phi


@dataclass(frozen=True)
class CausalityVerdict:
    accepted: bool
    witness: Optional[dict] = None

    def __bool__(self):
        return self.accepted


def _phi_table(source) -> Mapping:
    if isinstance(source, Mapping):
        return source
    table = getattr(source, "phi", None)
    if table is None:
        raise PreconditionError("expected a system or a mapping from w to entries")
    return {traj.w.values: table.get(traj.w.values, frozenset()) for traj in source.behavior}


def _gamma_upto(entry: PhiEntry, t: int):
    k = entry.tau.last_value_upto(t)
    return () if k is None else entry.gamma[: k + 1]


def check_nonanticipation(source) -> CausalityVerdict:
    """Decide whether changing the future of w can change the past of Phi(w).

    ``source`` is a system or a mapping from w value tuples to Phi entries.
    For every pair w, w' agreeing on [0, t] and every entry of Phi(w), some
    entry of Phi(w') must agree with it on tau over [0, t] and on gamma up to
    the last external tick reached by then.  Pairs where Phi(w') is empty are
    vacuous.
    """
    table = _phi_table(source)
    items = sorted(table.items(), key=lambda kv: repr(kv[0]))
    for w, entries in items:
        for w2, entries2 in items:
            if not entries or not entries2:
                continue
            n = min(len(w), len(w2))
            for t in range(n):
                if w[t] != w2[t]:
                    break
                for e in sorted(entries, key=repr):
                    ok = any(e.tau.values[: t + 1] == e2.tau.values[: t + 1]
                             and _gamma_upto(e, t) == _gamma_upto(e2, t)
                             for e2 in entries2)
                    if not ok:
                        return CausalityVerdict(False, {
                            "w": w, "w_prime": w2, "t": t,
                            "gamma": e.gamma, "tau": e.tau.values,
                        })
    return CausalityVerdict(True)


def tabulate(phi, signals: Iterable[Signal]) -> dict:
    """Evaluate a signal map on each signal, keyed by value tuple."""
    return {w.values: phi(w) for w in signals}
