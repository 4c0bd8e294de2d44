"""Value spaces and partial signals on finite grids."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Optional, Sequence

from .errors import IncompatibleSignalsError, PreconditionError
from .timecore import TimeAxis, _splice, as_fraction


class ValueSpace:
    kind = "abstract"

    def contains(self, value) -> bool:  # pragma: no cover - interface
        raise NotImplementedError

    def __contains__(self, value):
        return self.contains(value)


@dataclass(frozen=True)
class FiniteAlphabet(ValueSpace):
    symbols: tuple
    kind = "finite-alphabet"

    def __post_init__(self):
        syms = tuple(self.symbols)
        object.__setattr__(self, "symbols", syms)
        if not syms:
            raise ValueError("finite alphabet must be nonempty")
        if len(set(syms)) != len(syms):
            raise ValueError("finite alphabet has duplicate symbols")

    def contains(self, value) -> bool:
        return value in self._set

    @cached_property
    def _set(self):
        return frozenset(self.symbols)

    def index(self, value) -> int:
        return self.symbols.index(value)


@dataclass(frozen=True)
class RationalInterval(ValueSpace):
    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False
    kind = "rational-interval"

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"interval bounds reversed: {self.lo} > {self.hi}")
        if self.lo == self.hi and (self.lo_open or self.hi_open):
            raise ValueError("degenerate interval with an open end is empty")

    def contains(self, value) -> bool:
        try:
            v = as_fraction(value)
        except (TypeError, ValueError):
            return False
        if v < self.lo or (self.lo_open and v == self.lo):
            return False
        if v > self.hi or (self.hi_open and v == self.hi):
            return False
        return True

    def __str__(self):
        return f"{'(' if self.lo_open else '['}{self.lo},{self.hi}{')' if self.hi_open else ']'}"


@dataclass(frozen=True)
class ProductSpace(ValueSpace):
    components: tuple
    kind = "product"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ValueError("product space needs at least one component")

    def contains(self, value) -> bool:
        if not isinstance(value, tuple) or len(value) != len(self.components):
            return False
        return all(c.contains(v) for c, v in zip(self.components, value))


@dataclass(frozen=True)
class Signal:
    """Partial map from grid ticks to values; ``None`` marks undefined ticks."""

    axis: TimeAxis
    values: tuple
    space: Optional[ValueSpace] = None

    def __post_init__(self):
        vals = tuple(self.values)
        if len(vals) > self.axis.size:
            raise PreconditionError(f"{len(vals)} values for a grid of {self.axis.size} ticks")
        vals = vals + (None,) * (self.axis.size - len(vals))
        object.__setattr__(self, "values", vals)
        if self.space is not None:
            for t, v in enumerate(vals):
                if v is not None and not self.space.contains(v):
                    raise PreconditionError(f"value {v!r} at tick {t} is outside the value space")

    def __call__(self, t: int):
        return self.values[t] if 0 <= t < len(self.values) else None

    def __len__(self):
        return len(self.values)

    @cached_property
    def domain(self) -> frozenset:
        return frozenset(t for t, v in enumerate(self.values) if v is not None)

    def is_total(self) -> bool:
        return all(v is not None for v in self.values)

    def last_defined(self) -> int:
        dom = self.domain
        return max(dom) if dom else -1


def _compatible(a: Signal, b: Signal):
    if not a.axis.same_grid(b.axis):
        raise IncompatibleSignalsError("signals live on different axes")
    if a.space is not None and b.space is not None and a.space != b.space:
        raise IncompatibleSignalsError("signals live in different value spaces")


def concat_signal(w1: Signal, t1: int, t2: int, w2: Signal) -> Signal:
    """``w1`` before t1, then ``w2`` read at ``t - t1 + t2``; undefined off-grid."""
    _compatible(w1, w2)
    vals, _ = _splice(w1.values, t1, t2, w2.values)
    return Signal(w1.axis, vals, w1.space)


def concat_lossless(w1: Signal, t1: int, t2: int, w2: Signal):
    """Like :func:`concat_signal` but also report the ticks of ``w2`` lost past
    the horizon."""
    _compatible(w1, w2)
    vals, lost = _splice(w1.values, t1, t2, w2.values)
    return Signal(w1.axis, vals, w1.space), lost


def project(w: Signal, component) -> Signal:
    """Pointwise projection onto a 1-based component index or tuple of
    indices; a tuple yields tuple-valued signals."""
    space = w.space
    if space is not None and not isinstance(space, ProductSpace):
        raise PreconditionError("projection needs a product value space")
    many = isinstance(component, (tuple, list, range))
    idx = tuple(component) if many else (component,)
    width = len(space.components) if space is not None else None
    for i in idx:
        if int(i) != i or i < 1 or (width is not None and i > width):
            raise PreconditionError(f"component {i} out of range")
    sub = None
    if space is not None:
        parts = tuple(space.components[i - 1] for i in idx)
        sub = ProductSpace(parts) if many else parts[0]

    def pick(v):
        if v is None:
            return None
        if not isinstance(v, tuple):
            raise PreconditionError(f"value {v!r} is not a tuple")
        return tuple(v[i - 1] for i in idx) if many else v[idx[0] - 1]

    return Signal(w.axis, tuple(pick(v) for v in w.values), sub)


def restrict(w: Signal, t: int, strict: bool = False) -> Signal:
    """Prefix of ``w`` on [0, t] (or [0, t) when strict)."""
    w.axis.check_tick(t)
    end = t if strict else t + 1
    return Signal(w.axis, w.values[:end] + (None,) * (len(w.values) - end), w.space)


@dataclass(frozen=True)
class Trajectory:
    """A behavior member ``(w, x)``; both signals share axis and domain."""

    w: Signal
    x: Signal
    id: Optional[Any] = None

    def __post_init__(self):
        if not self.w.axis.same_grid(self.x.axis):
            raise IncompatibleSignalsError("w and x live on different axes")
        if self.w.domain != self.x.domain:
            raise IncompatibleSignalsError("w and x must share a domain")

    @property
    def key(self):
        return (self.w.values, self.x.values)

    def __eq__(self, other):
        return isinstance(other, Trajectory) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


def concat_trajectory(a: Trajectory, t1: int, t2: int, b: Trajectory) -> Trajectory:
    return Trajectory(concat_signal(a.w, t1, t2, b.w), concat_signal(a.x, t1, t2, b.x))


def signal(values: Sequence, axis: Optional[TimeAxis] = None, space=None) -> Signal:
    """Convenience constructor on a unit grid sized to ``values``."""
    if axis is None:
        axis = TimeAxis(1, max(1, len(values) - 1))
    return Signal(axis, tuple(values), space)
