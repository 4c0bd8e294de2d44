"""Simulation relations between state space systems: checks and synthesis."""

from __future__ import annotations

import enum
from collections import OrderedDict, defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from . import kernels
from .errors import IncompatibleSystemsError, OutOfRangeError
from .systems import StateSpacePhiSystem, external_behavior, time_indexed_spaces
from .timecore import _splice


class Flavor(str, enum.Enum):
    ASYNC = "async"
    EXT_SYNC = "ext-sync"
    SYNC = "sync"
    L_INITIAL = "l-initial"

    @classmethod
    def parse(cls, value) -> "Flavor":
        if isinstance(value, Flavor):
            return value
        aliases = {"asynchronous": "async", "externally-synchronous": "ext-sync",
                   "synchronous": "sync", "initial": "l-initial"}
        return cls(aliases.get(value, value))


FREE, K_SYNC, KT_SYNC = "free", "k-sync", "kt-sync"
TRANSFER_MODE = {Flavor.ASYNC: FREE, Flavor.EXT_SYNC: K_SYNC, Flavor.SYNC: KT_SYNC, Flavor.L_INITIAL: FREE}
COVER_CLAUSE = {Flavor.ASYNC: "cover-4a", Flavor.EXT_SYNC: "cover-5a", Flavor.SYNC: "cover-6a",
                Flavor.L_INITIAL: "cover-init"}
TRANSFER_CLAUSE = "transfer-4b"
CLAUSE_LABELS = {"cover-4a": "4a", "cover-5a": "5a", "cover-6a": "6a", "cover-init": "4a@l",
                 "transfer-4b": "4b"}


@dataclass(frozen=True)
class Relation:
    pairs: frozenset
    flavor: Flavor = Flavor.ASYNC
    l: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(tuple(p) for p in self.pairs))
        object.__setattr__(self, "flavor", Flavor.parse(self.flavor))

    def __contains__(self, pair):
        return tuple(pair) in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs, key=repr))

    def __len__(self):
        return len(self.pairs)

    def with_pairs(self, pairs) -> "Relation":
        return Relation(frozenset(pairs), self.flavor, self.l)


def _pairs(R) -> frozenset:
    return R.pairs if isinstance(R, Relation) else frozenset(tuple(p) for p in R)


def inverse(R):
    inv = frozenset((b, a) for a, b in _pairs(R))
    return R.with_pairs(inv) if isinstance(R, Relation) else inv


def compose(R12, R23, via: Optional[Iterable] = None):
    """``{(a, c) | exists b: (a, b) in R12 and (b, c) in R23}``, optionally
    only through intermediate states in ``via``."""
    allowed = None if via is None else set(via)
    succ = defaultdict(set)
    for b, c in _pairs(R23):
        succ[b].add(c)
    out = frozenset((a, c) for a, b in _pairs(R12)
                    if allowed is None or b in allowed for c in succ.get(b, ()))
    return R12.with_pairs(out) if isinstance(R12, Relation) else out


def identity_relation(states, flavor=Flavor.ASYNC, l: int = 0) -> Relation:
    return Relation(frozenset((s, s) for s in states), flavor, l)


@dataclass
class RelationVerdict:
    accepted: bool
    failed_clause: Optional[str] = None
    witness: Optional[dict] = None
    horizon: tuple = ()
    notes: List[str] = field(default_factory=list)

    def __bool__(self):
        return self.accepted

    @property
    def label(self) -> Optional[str]:
        return CLAUSE_LABELS.get(self.failed_clause) if self.failed_clause else None


def _check_axes(sys1, sys2, mode):
    if not sys1.external_axis.same_grid(sys2.external_axis):
        raise IncompatibleSystemsError("systems do not share the external time axis")
    if mode == KT_SYNC and not sys1.internal_axis.same_grid(sys2.internal_axis):
        raise IncompatibleSystemsError("synchronous checks need a shared internal time axis")


# transfer condition -------------------------------------------------------

class TransferProblem:
    """All instances of the transfer condition for a pair of systems,
    compiled into flat arrays.  Independent of the relation, so one problem
    serves every relation checked between the same systems."""

    def __init__(self, sys1: StateSpacePhiSystem, sys2: StateSpacePhiSystem,
                 mode: str = FREE, anchor_cut: bool = True):
        _check_axes(sys1, sys2, mode)
        self.sys1, self.sys2, self.mode, self.anchor_cut = sys1, sys2, mode, anchor_cut
        self.states1 = tuple(sys1.x_space.symbols)
        self.states2 = tuple(sys2.x_space.symbols)
        self.idx1 = {s: i for i, s in enumerate(self.states1)}
        self.idx2 = {s: i for i, s in enumerate(self.states2)}
        self.k_max = sys1.external_axis.horizon
        self._build()

    # contexts ---------------------------------------------------------------
    def _left_contexts(self):
        """Distinct (t1, k1, state, gamma suffix, future) over system-1 runs."""
        out = {}
        for ri, (r, cuts) in enumerate(zip(self.sys1.runs, self.sys1.cuts)):
            for ci, (t1, k1, s) in enumerate(cuts):
                future = tuple((self.idx1[s2], k - k1) for t, k, s2 in cuts[ci + 1:])
                key = (t1, k1, s, r.gamma[k1:], future)
                out.setdefault(key, (ri, t1))
        return out

    def _right_contexts(self):
        out = {}
        for ri, (r, cuts) in enumerate(zip(self.sys2.runs, self.sys2.cuts)):
            for t2, k2, s in cuts:
                key = (t2, k2, s, r.gamma[:k2], r.w[:t2], r.x[:t2 + 1], r.tau[:t2])
                out.setdefault(key, (ri, t2))
        return out

    def _witness_index(self):
        """Candidate runs of system 2 keyed by what (a)-(c) pin down, each
        with its future partner sets keyed by the external offset."""
        index = defaultdict(dict)
        for r, cuts in zip(self.sys2.runs, self.sys2.cuts):
            for t2 in range(len(r.x)):
                if r.x[t2] is None:
                    continue
                k2 = r.tau[t2]
                if self.anchor_cut and k2 is None:
                    continue
                later = defaultdict(set)
                for t, k, s in cuts:
                    if t > t2:
                        later[k].add(self.idx2[s])
                key = (t2, r.gamma, r.w[:t2], r.x[:t2 + 1], r.tau[:t2], k2 if self.anchor_cut else None)
                index[key].setdefault(tuple(sorted((k, frozenset(v)) for k, v in later.items())),
                                      None)
        return index

    def _build(self):
        left = self._left_contexts()
        right = self._right_contexts()
        windex = self._witness_index()
        n_ext = self.k_max + 1
        instances = {}
        for lkey, lorig in left.items():
            t1, k1, s1, gsuf, future = lkey
            for rkey, rorig in right.items():
                t2, k2, s2, gpre, wpre, xpre, taupre = rkey
                if self.mode != FREE and k1 != k2:
                    continue
                if self.mode == KT_SYNC and t1 != t2:
                    continue
                gamma_req, lost = _splice(gpre + (None,) * (n_ext - k2), k2, 0, gsuf)
                if lost:
                    cand_sets = []
                else:
                    key = (t2, gamma_req, wpre, xpre, taupre, k2 if self.anchor_cut else None)
                    cand_sets = []
                    for later in windex.get(key, {}):
                        later_map = dict(later)
                        obligations = set()
                        ok = True
                        for a, dj in future:
                            partners = later_map.get(k2 + dj)
                            if not partners:
                                ok = False
                                break
                            obligations.add((a, partners))
                        if ok:
                            cand_sets.append(frozenset(obligations))
                    if any(not c for c in cand_sets):
                        continue  # a witness without obligations always works
                pair = (self.idx1[s1], self.idx2[s2])
                ikey = (pair, frozenset(cand_sets))
                if ikey not in instances:
                    instances[ikey] = {"run1": lorig[0], "t1": t1, "k1": k1,
                                       "run2": rorig[0], "t2": t2, "k2": k2,
                                       "gamma_required": None if lost else gamma_req,
                                       "overflow": bool(lost)}
        self._pack(instances)

    def _pack(self, instances):
        inst_a, inst_b, cptr, optr, obl_a, sptr, set_b = [], [], [0], [0], [], [0], []
        self.meta = []
        for (pair, cands), meta in sorted(instances.items(), key=lambda kv: (kv[0][0], len(kv[0][1]))):
            inst_a.append(pair[0])
            inst_b.append(pair[1])
            for cand in sorted(cands, key=lambda c: sorted((a, sorted(p)) for a, p in c)):
                for a, partners in sorted(cand, key=lambda o: (o[0], sorted(o[1]))):
                    obl_a.append(a)
                    set_b.extend(sorted(partners))
                    sptr.append(len(set_b))
                optr.append(len(obl_a))
            cptr.append(len(optr) - 1)
            self.meta.append(meta)
        as32 = lambda v: np.asarray(v, dtype=np.int32)
        self.arrays = tuple(as32(v) for v in (inst_a, inst_b, cptr, optr, obl_a, sptr, set_b))

    @property
    def n_instances(self) -> int:
        return len(self.meta)

    def matrix(self, R) -> np.ndarray:
        M = np.zeros((len(self.states1), len(self.states2)), dtype=np.uint8)
        for a, b in _pairs(R):
            if a in self.idx1 and b in self.idx2:
                M[self.idx1[a], self.idx2[b]] = 1
        return M

    def pairs_of(self, M) -> frozenset:
        rows, cols = np.nonzero(M)
        return frozenset((self.states1[i], self.states2[j]) for i, j in zip(rows.tolist(), cols.tolist()))

    def first_violation(self, R, kernel=None) -> int:
        k = kernels.get(kernel)
        return int(k.first_violation(self.matrix(R), *self.arrays))

    def refine_matrix(self, M, kernel=None) -> int:
        k = kernels.get(kernel)
        return int(k.refine(M, *self.arrays))

    def witness(self, i: int) -> dict:
        m = dict(self.meta[i])
        r1 = self.sys1.runs[m["run1"]]
        r2 = self.sys2.runs[m["run2"]]
        m["pair"] = (self.states1[int(self.arrays[0][i])], self.states2[int(self.arrays[1][i])])
        m["traj1"], m["traj2"] = r1.traj, r2.traj
        m["gamma1"], m["gamma_prime"] = r1.gamma, r2.gamma
        m["candidates"] = int(self.arrays[2][i + 1] - self.arrays[2][i])
        return m


_problem_cache: "OrderedDict[tuple, TransferProblem]" = OrderedDict()
_CACHE_SIZE = 128


def transfer_problem(sys1, sys2, mode=FREE, anchor_cut=True) -> TransferProblem:
    """TransferProblem from a small LRU cache keyed on system identity."""
    key = (id(sys1), id(sys2), mode, anchor_cut)
    prob = _problem_cache.get(key)
    if prob is not None and prob.sys1 is sys1 and prob.sys2 is sys2:
        _problem_cache.move_to_end(key)
        return prob
    prob = TransferProblem(sys1, sys2, mode, anchor_cut)
    _problem_cache[key] = prob
    while len(_problem_cache) > _CACHE_SIZE:
        _problem_cache.popitem(last=False)
    return prob


def check_transfer(sys1, sys2, R, mode: str = FREE, anchor_cut: bool = True,
                   kernel=None) -> RelationVerdict:
    prob = transfer_problem(sys1, sys2, mode, anchor_cut)
    i = prob.first_violation(R, kernel)
    horizon = (sys1.internal_axis.horizon, sys2.internal_axis.horizon, sys1.external_axis.horizon)
    if i < 0:
        return RelationVerdict(True, horizon=horizon)
    return RelationVerdict(False, TRANSFER_CLAUSE, prob.witness(i), horizon)


# cover conditions ----------------------------------------------------------

def _cover_levels(sys1, sys2, flavor: Flavor, l: int):
    s1, s2 = time_indexed_spaces(sys1), time_indexed_spaces(sys2)
    if flavor == Flavor.ASYNC:
        return [(None, s1.all_external, s2.all_external)]
    if flavor == Flavor.EXT_SYNC:
        ks = sorted(set(s1.by_external_tick))
        return [(k, s1.at_external(k), s2.at_external(k)) for k in ks]
    if flavor == Flavor.SYNC:
        ts = sorted(set(s1.by_internal_tick))
        return [(t, s1.at_internal(t), s2.at_internal(t)) for t in ts]
    if not 0 <= l <= sys1.external_axis.horizon:
        raise OutOfRangeError(f"l = {l} is outside the external axis 0..{sys1.external_axis.horizon}")
    return [(l, s1.at_external(l), s2.at_external(l))]


def check_cover(sys1, sys2, R, flavor=Flavor.ASYNC, l: int = 0) -> RelationVerdict:
    flavor = Flavor.parse(flavor)
    _check_axes(sys1, sys2, TRANSFER_MODE[flavor])
    pairs = _pairs(R)
    for tick, left, right in _cover_levels(sys1, sys2, flavor, l):
        for xi in sorted(left, key=repr):
            if not any((xi, y) in pairs for y in right):
                return RelationVerdict(False, COVER_CLAUSE[flavor],
                                       {"state": xi, "tick": tick, "candidates": sorted(right, key=repr)},
                                       (sys1.internal_axis.horizon, sys1.external_axis.horizon))
    return RelationVerdict(True, horizon=(sys1.internal_axis.horizon, sys1.external_axis.horizon))


def check_simulation(sys1, sys2, R, flavor=None, l: Optional[int] = None,
                     anchor_cut: bool = True, kernel=None) -> RelationVerdict:
    if flavor is None:
        flavor = R.flavor if isinstance(R, Relation) else Flavor.ASYNC
    flavor = Flavor.parse(flavor)
    if l is None:
        l = R.l if isinstance(R, Relation) else 0
    cov = check_cover(sys1, sys2, R, flavor, l)
    if not cov:
        return cov
    return check_transfer(sys1, sys2, R, TRANSFER_MODE[flavor], anchor_cut, kernel)


def check_bisimulation(sys1, sys2, R, flavor=None, l: Optional[int] = None,
                       anchor_cut: bool = True, kernel=None) -> RelationVerdict:
    fwd = check_simulation(sys1, sys2, R, flavor, l, anchor_cut, kernel)
    if not fwd:
        return fwd
    back = check_simulation(sys2, sys1, inverse(R), flavor, l, anchor_cut, kernel)
    if not back:
        back.notes.append("failure is in the reverse direction (inverse relation)")
        if back.witness is not None:
            back.witness = dict(back.witness, direction="reverse")
    return back


# synthesis -------------------------------------------------------------------

def universe(sys1, sys2, flavor) -> frozenset:
    """Pairs any clause can ever inspect; synthesis starts from all of them."""
    flavor = Flavor.parse(flavor)
    s1, s2 = time_indexed_spaces(sys1), time_indexed_spaces(sys2)
    if flavor == Flavor.SYNC:
        left, right = s1.all_internal, s2.all_internal
    else:
        left, right = s1.all_external, s2.all_external
    return frozenset((a, b) for a in left for b in right)


@dataclass
class SynthesisResult:
    relation: Optional[Relation]
    verdict: RelationVerdict
    greatest_transfer: frozenset
    deleted: frozenset

    def __bool__(self):
        return self.relation is not None


def synthesize_greatest(sys1, sys2, flavor=Flavor.ASYNC, l: int = 0, bisimulation: bool = False,
                        anchor_cut: bool = True, kernel=None) -> SynthesisResult:
    """Greatest relation satisfying transfer (both directions for
    bisimulation), found by deleting violating pairs until a fixpoint, then
    checked against the cover condition."""
    flavor = Flavor.parse(flavor)
    mode = TRANSFER_MODE[flavor]
    start = universe(sys1, sys2, flavor)
    fwd = transfer_problem(sys1, sys2, mode, anchor_cut)
    M = fwd.matrix(start)
    if bisimulation:
        back = transfer_problem(sys2, sys1, mode, anchor_cut)
        while True:
            changed = fwd.refine_matrix(M, kernel)
            MT = np.ascontiguousarray(M.T)
            changed += back.refine_matrix(MT, kernel)
            M = np.ascontiguousarray(MT.T)
            if not changed:
                break
    else:
        fwd.refine_matrix(M, kernel)
    pairs = fwd.pairs_of(M)
    rel = Relation(pairs, flavor, l)
    check = check_bisimulation if bisimulation else check_simulation
    verdict = check(sys1, sys2, rel, flavor, l, anchor_cut, kernel)
    return SynthesisResult(rel if verdict.accepted else None, verdict, pairs, start - pairs)


# behavioral inclusion ----------------------------------------------------------

@dataclass
class InclusionVerdict:
    subset: bool
    superset: bool
    missing: Optional[tuple] = None

    @property
    def equal(self) -> bool:
        return self.subset and self.superset

    @property
    def symbol(self) -> str:
        if self.equal:
            return "="
        if self.subset:
            return "⊆"
        if self.superset:
            return "⊇"
        return "incomparable"

    def __bool__(self):
        return self.subset


def check_behavior_inclusion(sys1, sys2) -> InclusionVerdict:
    b1, b2 = external_behavior(sys1), external_behavior(sys2)
    missing = min(b1 - b2, key=repr) if b1 - b2 else None
    return InclusionVerdict(b1 <= b2, b2 <= b1, missing)
