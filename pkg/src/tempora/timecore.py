"""Finite time axes and time scale transformations.

Ticks are integer indices ``0..horizon`` with an exact rational step.  A time
scale transformation (tst) is a monotone partial map from internal ticks to
external ticks whose image is an initial segment ``{0..external_reach}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import (
    InvalidConcatenationError,
    InvalidTransformationError,
    OutOfRangeError,
    PreconditionError,
)

INTERNAL = "internal"
EXTERNAL = "external"


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted; use int, Fraction or 'p/q'")
    return Fraction(value)


@dataclass(frozen=True)
class TimeAxis:
    step: Fraction
    horizon: int
    kind: str = INTERNAL

    def __post_init__(self):
        object.__setattr__(self, "step", as_fraction(self.step))
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError(f"horizon must be an integer >= 1, got {self.horizon}")
        if self.kind not in (INTERNAL, EXTERNAL):
            raise ValueError(f"unknown axis kind {self.kind!r}")

    @property
    def size(self) -> int:
        return self.horizon + 1

    def ticks(self) -> range:
        return range(self.size)

    def time_of(self, tick: int) -> Fraction:
        self.check_tick(tick)
        return tick * self.step

    def tick_of(self, time) -> int:
        """Grid index of an exact time value; raises if it is off-grid."""
        q = as_fraction(time) / self.step
        if q.denominator != 1 or not 0 <= q <= self.horizon:
            raise OutOfRangeError(f"time {time} is not a grid point of {self}")
        return int(q)

    def check_tick(self, tick: int) -> None:
        if not 0 <= tick <= self.horizon:
            raise OutOfRangeError(f"tick {tick} outside 0..{self.horizon}")

    def same_grid(self, other: "TimeAxis") -> bool:
        return self.step == other.step and self.horizon == other.horizon


@dataclass(frozen=True)
class TimeOffset:
    value: int

    def __post_init__(self):
        if int(self.value) != self.value:
            raise ValueError("offset must be an integer")


def _splice(a: Sequence, t1: int, t2: int, b: Sequence, shift: int = 0):
    """Tickwise ``a`` before t1 and ``b`` read at ``t - t1 + t2`` from t1 on.

    Returns ``(values, lost)`` where ``lost`` lists source ticks of ``b`` that
    carry a value but would land beyond the end of the grid.  ``shift`` is
    added to every value taken from ``b`` (used for tau offsets).
    """
    n = len(a)
    out = list(a[:t1])
    for t in range(t1, n):
        s = t - t1 + t2
        if 0 <= s < len(b) and b[s] is not None:
            out.append(b[s] + shift if shift else b[s])
        else:
            out.append(None)
    lost = [s for s in range(max(t2, n - t1 + t2), len(b)) if b[s] is not None]
    return tuple(out), lost


@dataclass(frozen=True)
class TimeScaleTransformation:
    """Extensional tau: ``values[t]`` is the external tick of internal tick t
    or ``None`` where tau is undefined."""

    values: tuple
    external_horizon: Optional[int] = field(default=None, compare=False)
    _checked: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        vals = tuple(None if v is None else int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self._checked:
            validate_tst(vals, self.external_horizon)

    @classmethod
    def identity(cls, horizon: int, external_horizon: Optional[int] = None):
        return cls(tuple(range(horizon + 1)), external_horizon)

    @classmethod
    def from_preimages(cls, blocks: Iterable[Iterable[int]], size: int, external_horizon=None):
        """Build tau from the list of preimage sets for k = 0, 1, ..."""
        vals: list = [None] * size
        for k, ticks in enumerate(blocks):
            for t in ticks:
                if vals[t] is not None:
                    raise InvalidTransformationError(f"tick {t} assigned twice", tick=t)
                vals[t] = k
        return cls(tuple(vals), external_horizon)

    def __len__(self):
        return len(self.values)

    def __call__(self, t: int):
        return self.values[t] if 0 <= t < len(self.values) else None

    @cached_property
    def domain(self) -> frozenset:
        return frozenset(t for t, v in enumerate(self.values) if v is not None)

    @cached_property
    def external_reach(self) -> int:
        """Largest external tick attained, -1 for the empty map."""
        defined = [v for v in self.values if v is not None]
        return max(defined) if defined else -1

    @cached_property
    def _inverse(self) -> tuple:
        inv = [[] for _ in range(self.external_reach + 1)]
        for t, v in enumerate(self.values):
            if v is not None:
                inv[v].append(t)
        return tuple(tuple(ts) for ts in inv)

    def preimage(self, k: int) -> tuple:
        """Sorted internal ticks mapping to k (empty beyond the reach)."""
        if 0 <= k <= self.external_reach:
            return self._inverse[k]
        return ()

    def last_value_upto(self, t: int) -> Optional[int]:
        """Largest tau value attained at ticks <= t, or None."""
        best = None
        for v in self.values[: t + 1]:
            if v is not None:
                best = v
        return best

    def is_point_to_point(self) -> bool:
        return all(len(p) == 1 for p in self._inverse)

    def is_set_to_point(self) -> bool:
        """Preimages are consecutive blocks tiling an initial segment."""
        expected = 0
        for block in self._inverse:
            if block[0] != expected or block[-1] - block[0] + 1 != len(block):
                return False
            expected = block[-1] + 1
        return all(v is None for v in self.values[expected:])

    def shifted(self, c: int) -> tuple:
        return tuple(None if v is None else v + c for v in self.values)


def validate_tst(values: Sequence, external_horizon: Optional[int] = None, error=InvalidTransformationError) -> int:
    """Check monotonicity and initial-segment surjectivity; return the reach."""
    last = None
    reach = -1
    for t, v in enumerate(values):
        if v is None:
            continue
        if v < 0:
            raise error(f"negative external tick {v} at internal tick {t}", tick=t)
        if last is None:
            if v != 0:
                raise error(f"external tick 0 has no preimage (first value {v} at tick {t})", tick=t)
        elif v < last:
            raise error(f"not monotone at internal tick {t}: {v} < {last}", tick=t)
        elif v > last + 1:
            raise error(f"external tick {last + 1} has no preimage (jump at internal tick {t})", tick=t)
        last = v
        reach = v
    if external_horizon is not None and reach > external_horizon:
        raise error(f"external reach {reach} exceeds external horizon {external_horizon}", tick=None)
    return reach


def inverse_tst(tau: TimeScaleTransformation, k: int) -> frozenset:
    if not 0 <= k <= tau.external_reach:
        raise OutOfRangeError(f"external tick {k} beyond reach {tau.external_reach}")
    return frozenset(tau.preimage(k))


def concat_tst(tau1: TimeScaleTransformation, t1: int, t2: int,
               tau2: TimeScaleTransformation, c: TimeOffset | int) -> TimeScaleTransformation:
    """``tau1`` before t1, ``tau2(t - t1 + t2) + c`` from t1 on."""
    cval = c.value if isinstance(c, TimeOffset) else int(c)
    if len(tau1) != len(tau2):
        raise PreconditionError("transformations live on different internal axes")
    k1, k2 = tau1(t1), tau2(t2)
    if k1 is None or k2 is None:
        raise PreconditionError(f"tau undefined at cut ticks ({t1}, {t2})")
    if cval != k1 - k2:
        raise PreconditionError(f"offset {cval} differs from k1 - k2 = {k1 - k2}")
    vals, lost = _splice(tau1.values, t1, t2, tau2.values, cval)
    if lost:
        raise InvalidConcatenationError(
            f"tau2 values at ticks {lost} fall beyond the internal horizon", tick=lost[0])
    horizon = tau1.external_horizon if tau1.external_horizon is not None else tau2.external_horizon
    validate_tst(vals, horizon, error=InvalidConcatenationError)
    return TimeScaleTransformation(vals, horizon, _checked=False)
