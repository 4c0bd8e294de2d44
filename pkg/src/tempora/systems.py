"""State space systems with extensional signal maps, state axioms and closure."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence

from .errors import ClosureLimitError, HorizonOverflowError, SystemValidationError
from .signalmaps import PhiEntry
from .signals import FiniteAlphabet, Signal, Trajectory, ValueSpace
from .timecore import TimeAxis, _splice

ASYNC = "async"
EXT_SYNC = "ext-sync"
SYNC = "sync"
AXIOM_CLASSES = (ASYNC, EXT_SYNC, SYNC)
_ALIASES = {
    "asynchronous": ASYNC, "externally-synchronous": EXT_SYNC, "synchronous": SYNC,
    "extsync": EXT_SYNC, "ext_sync": EXT_SYNC,
}


def axiom_class(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in AXIOM_CLASSES:
        raise ValueError(f"unknown axiom class {name!r}")
    return name


def class_admits(cls: str, t1: int, k1: int, t2: int, k2: int) -> bool:
    if cls == ASYNC:
        return True
    if cls == EXT_SYNC:
        return k1 == k2
    return k1 == k2 and t1 == t2


class Run(NamedTuple):
    """A trajectory paired with one of its Phi entries, as plain tuples."""

    w: tuple
    x: tuple
    gamma: tuple
    tau: tuple
    traj: int
    entry: PhiEntry


@dataclass(frozen=True, eq=False)
class StateSpacePhiSystem:
    internal_axis: TimeAxis
    external_axis: TimeAxis
    w_space: Optional[ValueSpace]
    gamma_space: FiniteAlphabet
    x_space: FiniteAlphabet
    behavior: tuple
    phi: Dict[tuple, frozenset]
    axiom_class: str = ASYNC
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "behavior", tuple(self.behavior))
        object.__setattr__(self, "phi", {k: frozenset(v) for k, v in self.phi.items()})
        object.__setattr__(self, "axiom_class", axiom_class(self.axiom_class))
        self._validate()

    def _validate(self):
        n, kmax = self.internal_axis.size, self.external_axis.horizon
        seen = set()
        for i, tr in enumerate(self.behavior):
            if not tr.w.axis.same_grid(self.internal_axis):
                raise SystemValidationError(f"trajectory {i} is not on the internal axis")
            if tr.key in seen:
                raise SystemValidationError(f"trajectory {i} is a duplicate")
            seen.add(tr.key)
            for t, v in enumerate(tr.x.values):
                if v is not None and not self.x_space.contains(v):
                    raise SystemValidationError(f"trajectory {i}: state {v!r} at tick {t} not in X")
            if self.w_space is not None:
                for t, v in enumerate(tr.w.values):
                    if v is not None and not self.w_space.contains(v):
                        raise SystemValidationError(f"trajectory {i}: w value {v!r} at tick {t} not in W")
            if tr.w.values not in self.phi:
                raise SystemValidationError(f"trajectory {i} has no Phi record (use an empty set)")
        ws = {tr.w.values for tr in self.behavior}
        for w, entries in self.phi.items():
            if w not in ws:
                raise SystemValidationError("Phi has an entry for a signal outside the behavior")
            dom = {t for t, v in enumerate(w) if v is not None}
            for e in entries:
                tau = e.tau
                if len(tau.values) != n:
                    raise SystemValidationError("tau length differs from the internal grid")
                if tau.external_reach > kmax:
                    raise SystemValidationError(f"tau reaches {tau.external_reach} > external horizon {kmax}")
                if not tau.domain <= dom:
                    raise SystemValidationError("tau is defined where w is undefined")
                if len(e.gamma) != kmax + 1:
                    raise SystemValidationError("gamma length differs from the external grid")
                for k, g in enumerate(e.gamma):
                    if (g is not None) != (k <= tau.external_reach):
                        raise SystemValidationError(
                            f"gamma must be defined exactly on 0..{tau.external_reach} (tick {k})")
                    if g is not None and not self.gamma_space.contains(g):
                        raise SystemValidationError(f"gamma symbol {g!r} not in the external alphabet")

    # derived views -----------------------------------------------------
    @cached_property
    def runs(self) -> tuple:
        out = []
        for i, tr in enumerate(self.behavior):
            for e in sorted(self.phi[tr.w.values], key=_entry_key):
                out.append(Run(tr.w.values, tr.x.values, e.gamma, e.tau.values, i, e))
        return tuple(out)

    @cached_property
    def cuts(self) -> tuple:
        """Per run, the (t, k, state) triples where state and tau are defined."""
        return tuple(tuple((t, k, r.x[t]) for t, k in enumerate(r.tau) if k is not None)
                     for r in self.runs)

    @cached_property
    def trajectory_keys(self) -> frozenset:
        return frozenset(tr.key for tr in self.behavior)

    @property
    def horizon(self) -> tuple:
        return (self.internal_axis.horizon, self.external_axis.horizon)

    def signature(self):
        return self._signature

    @cached_property
    def _signature(self):
        return (
            self.internal_axis, self.external_axis, self.w_space, self.gamma_space,
            self.x_space, self.axiom_class, self.trajectory_keys,
            frozenset((w, e) for w, es in self.phi.items() for e in es),
            frozenset(w for w, es in self.phi.items() if not es),
        )

    def __eq__(self, other):
        return isinstance(other, StateSpacePhiSystem) and self.signature() == other.signature()

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash(self._signature)

    def replace(self, **changes) -> "StateSpacePhiSystem":
        fields = dict(internal_axis=self.internal_axis, external_axis=self.external_axis,
                      w_space=self.w_space, gamma_space=self.gamma_space, x_space=self.x_space,
                      behavior=self.behavior, phi=self.phi, axiom_class=self.axiom_class,
                      name=self.name)
        fields.update(changes)
        return StateSpacePhiSystem(**fields)


def _entry_key(e: PhiEntry):
    return (repr(e.gamma), repr(e.tau.values))


def make_system(internal_axis: TimeAxis, external_axis: TimeAxis, trajectories: Iterable,
                *, x_space=None, gamma_space=None, w_space=None, axiom_class: str = ASYNC,
                name=None) -> StateSpacePhiSystem:
    """Build a system from ``(w_values, x_values, entries)`` triples.

    ``entries`` are PhiEntry objects or ``(gamma, tau)`` pairs where gamma may
    be shorter than the external grid and tau is a TimeScaleTransformation or
    a tuple.  Alphabets default to the symbols used.
    """
    from .timecore import TimeScaleTransformation

    n, kmax = internal_axis.size, external_axis.horizon
    behavior, phi = [], {}
    for w, x, entries in trajectories:
        w = tuple(w) + (None,) * (n - len(w))
        x = tuple(x) + (None,) * (n - len(x))
        tr = Trajectory(Signal(internal_axis, w), Signal(internal_axis, x))
        if tr not in behavior:
            behavior.append(tr)
        bucket = phi.setdefault(w, set())
        for e in entries:
            if not isinstance(e, PhiEntry):
                gamma, tau = e
                if not isinstance(tau, TimeScaleTransformation):
                    tau = tuple(tau) + (None,) * (n - len(tau))
                    tau = TimeScaleTransformation(tau, kmax)
                gamma = tuple(gamma)[: kmax + 1]
                gamma = gamma + (None,) * (kmax + 1 - len(gamma))
                e = PhiEntry(gamma, tau)
            bucket.add(e)
    if x_space is None:
        x_space = FiniteAlphabet(tuple(sorted({v for tr in behavior for v in tr.x.values if v is not None},
                                              key=repr)) or ("_",))
    if gamma_space is None:
        syms = {g for es in phi.values() for e in es for g in e.gamma if g is not None}
        gamma_space = FiniteAlphabet(tuple(sorted(syms, key=repr)) or ("_",))
    return StateSpacePhiSystem(internal_axis, external_axis, w_space, gamma_space, x_space,
                               tuple(behavior), phi, axiom_class, name)


# external behavior and time-indexed spaces ---------------------------------

def external_behavior(system: StateSpacePhiSystem) -> frozenset:
    """All gamma value tuples produced by some trajectory."""
    return frozenset(r.gamma for r in system.runs)


@dataclass(frozen=True)
class TimeIndexedStateSpaces:
    by_internal_tick: Dict[int, frozenset]
    by_external_tick: Dict[int, frozenset]
    all_internal: frozenset
    all_external: frozenset

    def at_internal(self, t: int) -> frozenset:
        return self.by_internal_tick.get(t, frozenset())

    def at_external(self, k: int) -> frozenset:
        return self.by_external_tick.get(k, frozenset())


def time_indexed_spaces(system: StateSpacePhiSystem) -> TimeIndexedStateSpaces:
    cache = system.__dict__.get("_tis")
    if cache is not None:
        return cache
    xt: Dict[int, set] = defaultdict(set)
    xk: Dict[int, set] = defaultdict(set)
    for tr in system.behavior:
        for t, v in enumerate(tr.x.values):
            if v is not None:
                xt[t].add(v)
    for cuts in system.cuts:
        for _, k, s in cuts:
            xk[k].add(s)
    bt = {t: frozenset(v) for t, v in sorted(xt.items())}
    bk = {k: frozenset(v) for k, v in sorted(xk.items())}
    out = TimeIndexedStateSpaces(
        bt, bk,
        frozenset().union(*bt.values()) if bt else frozenset(),
        frozenset().union(*bk.values()) if bk else frozenset(),
    )
    system.__dict__["_tis"] = out
    return out


# concatenation of runs ------------------------------------------------------

class Concatenation(NamedTuple):
    w: tuple
    x: tuple
    gamma: tuple
    tau: tuple
    overflow: Optional[str]


def concat_runs(r1, t1: int, r2, t2: int, k_max: int) -> Concatenation:
    """``(w1,x1) ^ (w2,x2)`` cut at t1/t2 together with the matching Phi entry.

    ``overflow`` describes values that would have to leave the finite grid;
    the other fields are then only a truncated view.
    """
    k1, k2 = r1.tau[t1], r2.tau[t2]
    c = k1 - k2
    w, lost_w = _splice(r1.w, t1, t2, r2.w)
    x, _ = _splice(r1.x, t1, t2, r2.x)
    tau, _ = _splice(r1.tau, t1, t2, r2.tau, c)
    gamma, lost_g = _splice(r1.gamma, k1, k2, r2.gamma)
    overflow = None
    if lost_w:
        overflow = f"internal ticks {lost_w[0]}..{lost_w[-1]} of the second trajectory leave the grid"
    elif lost_g or any(v is not None and v > k_max for v in tau):
        overflow = "external signal would pass the external horizon"
    return Concatenation(w, x, gamma, tau, overflow)


def _cut_index(cls: str, cuts):
    """Group cut points by the data that must match under the class."""
    idx = defaultdict(list)
    for t, k, s in cuts:
        idx[_cut_key(cls, t, k, s)].append((t, k))
    return idx


def _cut_key(cls, t, k, s):
    if cls == ASYNC:
        return (s,)
    if cls == EXT_SYNC:
        return (s, k)
    return (s, k, t)


@dataclass
class AxiomVerdict:
    accepted: bool
    axiom_class: str
    witness: Optional[dict] = None
    boundary_notes: List[str] = field(default_factory=list)
    horizon: tuple = ()

    def __bool__(self):
        return self.accepted

    @property
    def up_to_horizon(self) -> bool:
        return bool(self.boundary_notes)


def check_state_axiom(system: StateSpacePhiSystem, cls: Optional[str] = None,
                      max_notes: int = 20) -> AxiomVerdict:
    """Check closure of behavior and Phi under concatenation at matching states.

    Concatenations that would need ticks beyond the grid are skipped and
    recorded as boundary notes ("accepted up to horizon").
    """
    cls = axiom_class(cls or system.axiom_class)
    runs, cuts = system.runs, system.cuts
    k_max = system.external_axis.horizon
    trajs = system.trajectory_keys
    notes: List[str] = []
    skipped = 0
    indexes = [_cut_index(cls, c) for c in cuts]
    for i, r1 in enumerate(runs):
        for t1, k1, s in cuts[i]:
            key = _cut_key(cls, t1, k1, s)
            for j, r2 in enumerate(runs):
                for t2, k2 in indexes[j].get(key, ()):
                    cat = concat_runs(r1, t1, r2, t2, k_max)
                    if cat.overflow:
                        skipped += 1
                        if len(notes) < max_notes:
                            notes.append(f"runs {i},{j} cut at ({t1},{t2}): {cat.overflow}")
                        continue
                    entry_ok = any(e.gamma == cat.gamma and e.tau.values == cat.tau
                                   for e in system.phi.get(cat.w, ()))
                    if (cat.w, cat.x) in trajs and entry_ok:
                        continue
                    return AxiomVerdict(False, cls, {
                        "run1": i, "run2": j, "traj1": r1.traj, "traj2": r2.traj,
                        "t1": t1, "t2": t2, "k1": k1, "k2": k2, "state": s,
                        "missing": "trajectory" if (cat.w, cat.x) not in trajs else "phi entry",
                        "w": cat.w, "x": cat.x, "gamma": cat.gamma, "tau": cat.tau,
                    }, notes, system.horizon)
    if skipped > len(notes):
        notes.append(f"{skipped - len(notes)} further concatenations skipped at the horizon")
    return AxiomVerdict(True, cls, None, notes, system.horizon)


def closure(system: StateSpacePhiSystem, cls: Optional[str] = None,
            max_runs: Optional[int] = None) -> StateSpacePhiSystem:
    """Least extension of behavior and Phi closed under the class's
    concatenation rule."""
    cls = axiom_class(cls or system.axiom_class)
    k_max = system.external_axis.horizon
    axis = system.internal_axis
    traj_order: List[tuple] = []
    traj_seen = set()
    x_by_w: Dict[tuple, List[tuple]] = defaultdict(list)
    phi: Dict[tuple, set] = defaultdict(set)
    runs: List[tuple] = []   # (w, x, gamma, tau)
    run_seen = set()
    for tr in system.behavior:
        traj_order.append(tr.key)
        traj_seen.add(tr.key)
        x_by_w[tr.w.values].append(tr.x.values)
    for w, es in system.phi.items():
        phi[w] |= set(es)
    for r in system.runs:
        runs.append((r.w, r.x, r.gamma, r.tau))
        run_seen.add(runs[-1])

    def push(run):
        if run not in run_seen:
            run_seen.add(run)
            runs.append(run)
            if max_runs is not None and len(runs) > max_runs:
                raise ClosureLimitError(f"closure exceeds {max_runs} runs")

    def add(cat: Concatenation):
        entry = None
        if (cat.w, cat.x) not in traj_seen:
            traj_seen.add((cat.w, cat.x))
            traj_order.append((cat.w, cat.x))
            x_by_w[cat.w].append(cat.x)
            for e in phi[cat.w]:
                push((cat.w, cat.x, e.gamma, e.tau.values))
        if not any(e.gamma == cat.gamma and e.tau.values == cat.tau for e in phi[cat.w]):
            from .timecore import TimeScaleTransformation
            entry = PhiEntry(cat.gamma, TimeScaleTransformation(cat.tau, k_max))
            phi[cat.w].add(entry)
            for x in x_by_w[cat.w]:
                push((cat.w, x, cat.gamma, cat.tau))

    index: Dict[tuple, List[tuple]] = defaultdict(list)
    i = 0
    while i < len(runs):
        r = _RunView(*runs[i])
        my_cuts = [(t, k, r.x[t]) for t, k in enumerate(r.tau) if k is not None]
        for t, k, s in my_cuts:
            index[_cut_key(cls, t, k, s)].append((i, t, k))
        for t, k, s in my_cuts:
            for j, tj, kj in list(index[_cut_key(cls, t, k, s)]):
                other = _RunView(*runs[j])
                for a, ta, b, tb in ((r, t, other, tj), (other, tj, r, t)):
                    cat = concat_runs(a, ta, b, tb, k_max)
                    if cat.overflow:
                        raise HorizonOverflowError(
                            f"required concatenation at ticks ({ta},{tb}): {cat.overflow}",
                            detail={"t1": ta, "t2": tb})
                    add(cat)
        i += 1

    behavior = tuple(Trajectory(Signal(axis, w), Signal(axis, x)) for w, x in traj_order)
    return system.replace(behavior=behavior, phi={w: frozenset(v) for w, v in phi.items()},
                          axiom_class=cls)


class _RunView(NamedTuple):
    w: tuple
    x: tuple
    gamma: tuple
    tau: tuple


def restrict_behavior(system: StateSpacePhiSystem, keep: Sequence[int]) -> StateSpacePhiSystem:
    """Subsystem with the given trajectory indices (not re-closed)."""
    behavior = tuple(system.behavior[i] for i in keep)
    ws = {tr.w.values for tr in behavior}
    return system.replace(behavior=behavior, phi={w: e for w, e in system.phi.items() if w in ws})
