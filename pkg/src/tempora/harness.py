"""Random closed systems and executable checks of the preorder/equivalence results."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence

from .errors import ClosureLimitError, GenerationExhaustedError, HorizonOverflowError
from .relations import (Flavor, Relation, check_behavior_inclusion, check_bisimulation,
                        check_simulation, compose, identity_relation, inverse, synthesize_greatest)
from .signals import FiniteAlphabet
from .systems import (ASYNC, EXT_SYNC, SYNC, StateSpacePhiSystem, axiom_class, check_state_axiom,
                      closure, make_system, time_indexed_spaces)
from .timecore import EXTERNAL, TimeAxis

TAU_STYLES = ("identity", "point-to-point", "set-to-point", "mixed")
SUITES = ("lemma1", "thm1", "thm2", "thm3", "thm4", "cor1")


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    max_states: int = 4
    max_trajectories: int = 6
    internal_horizon: int = 8
    external_horizon: int = 4
    gamma_size: int = 3
    tau_style: str = "mixed"
    axiom_class: str = ASYNC
    max_runs: int = 40
    retries: int = 200

    def __post_init__(self):
        for name in ("max_states", "max_trajectories", "internal_horizon", "external_horizon",
                     "gamma_size", "max_runs", "retries"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.tau_style not in TAU_STYLES:
            raise ValueError(f"unknown tau style {self.tau_style!r}")
        object.__setattr__(self, "axiom_class", axiom_class(self.axiom_class))

    @property
    def effective_external_horizon(self) -> int:
        # identity transformations need T = T_E
        return self.internal_horizon if self.tau_style == "identity" else self.external_horizon


@dataclass(frozen=True)
class Blueprint:
    """Everything needed to rebuild a generated system (used by shrinking)."""

    cfg: GeneratorConfig
    states: tuple
    base: tuple   # (w, x, entries) triples before closure

    def build(self, base=None) -> StateSpacePhiSystem:
        cfg = self.cfg
        ia = TimeAxis(1, cfg.internal_horizon)
        ea = TimeAxis(1, cfg.effective_external_horizon, EXTERNAL)
        gammas = FiniteAlphabet(tuple(f"g{i}" for i in range(cfg.gamma_size)))
        raw = make_system(ia, ea, self.base if base is None else base,
                          x_space=FiniteAlphabet(self.states), gamma_space=gammas,
                          w_space=FiniteAlphabet((0, 1, 2)), axiom_class=cfg.axiom_class)
        return closure(raw, cfg.axiom_class, max_runs=cfg.max_runs)


def _tau(rng: random.Random, length: int, style: str, k_max: int) -> tuple:
    if style == "mixed":
        options = ["point-to-point", "set-to-point"]
        if length - 1 <= k_max:
            options.append("identity")
        style = rng.choice(options)
    if style == "identity":
        return tuple(range(length))
    extra = rng.sample(range(1, length), min(length - 1, rng.randint(0, min(k_max, length - 1))))
    marks = sorted([0] + extra)
    vals: List[Optional[int]] = [None] * length
    if style == "point-to-point":
        for k, t in enumerate(marks):
            vals[t] = k
    else:
        bounds = marks + [length]
        for k in range(len(marks)):
            for t in range(bounds[k], bounds[k + 1]):
                vals[t] = k
    return tuple(vals)


def _gamma(rng, tau, x, output, symbols):
    reach = max(v for v in tau if v is not None)
    out = []
    for k in range(reach + 1):
        t = min(i for i, v in enumerate(tau) if v == k)
        out.append(output[x[t]] if output is not None else rng.choice(symbols))
    return tuple(out)


def _random_trajectory(rng, cfg, states, w_of, output, symbols):
    n = len(states)
    k_max = cfg.effective_external_horizon
    if cfg.axiom_class == SYNC:
        length = rng.randint(1, min(cfg.internal_horizon + 1, n + 2))
        path = [rng.randrange(n) for _ in range(length)]
    else:
        length = rng.randint(1, min(n, cfg.internal_horizon + 1))
        path = sorted(rng.sample(range(n), length))
    if cfg.tau_style == "identity":
        length = min(length, k_max + 1)
        path = path[:length]
    x = tuple(states[i] for i in path)
    w = tuple(w_of[i] if w_of is not None else rng.randrange(3) for i in path)
    entries = []
    for _ in range(2 if rng.random() < 0.2 else 1):
        tau = _tau(rng, length, cfg.tau_style, k_max)
        entries.append((_gamma(rng, tau, x, output, symbols), tau))
    return (w, x, tuple(entries))


def _random_blueprint(rng: random.Random, cfg: GeneratorConfig) -> Blueprint:
    n = rng.randint(min(2, cfg.max_states), cfg.max_states)
    states = tuple(f"s{i}" for i in range(n))
    symbols = tuple(f"g{i}" for i in range(cfg.gamma_size))
    w_of = [rng.randrange(3) for _ in range(n)] if rng.random() < 0.6 else None
    output = {s: rng.choice(symbols) for s in states} if rng.random() < 0.6 else None
    count = rng.randint(1, cfg.max_trajectories)
    base = tuple(_random_trajectory(rng, cfg, states, w_of, output, symbols) for _ in range(count))
    return Blueprint(cfg, states, base)


def generate_blueprint(cfg: GeneratorConfig, rng: Optional[random.Random] = None):
    """``(system, blueprint)`` for a random closed system; deterministic per seed."""
    rng = rng if rng is not None else random.Random(cfg.seed)
    for _ in range(cfg.retries):
        bp = _random_blueprint(rng, cfg)
        try:
            system = bp.build()
        except (ClosureLimitError, HorizonOverflowError):
            continue
        verdict = check_state_axiom(system, cfg.axiom_class)
        if not verdict.accepted:  # closure guarantees this; guard against regressions
            raise AssertionError(f"closure produced a system violating its axiom: {verdict.witness}")
        return system, bp
    raise GenerationExhaustedError(f"no closed system within {cfg.retries} attempts (seed {cfg.seed})")


def generate_system(cfg: GeneratorConfig) -> StateSpacePhiSystem:
    return generate_blueprint(cfg)[0]


def derive_blueprint(rng: random.Random, bp: Blueprint):
    """A related blueprint plus a natural relation from ``bp``'s states to it:
    a superset of the behavior (identity relation) or a state renaming."""
    cfg = bp.cfg
    symbols = tuple(f"g{i}" for i in range(cfg.gamma_size))
    if rng.random() < 0.6:
        extra = tuple(_random_trajectory(rng, cfg, bp.states, None, None, symbols)
                      for _ in range(rng.randint(0, 2)))
        return Blueprint(cfg, bp.states, bp.base + extra), frozenset((s, s) for s in bp.states)
    perm = list(bp.states)
    rng.shuffle(perm)
    names = dict(zip(bp.states, perm))
    base = tuple((w, tuple(names[s] for s in x), e) for w, x, e in bp.base)
    return Blueprint(cfg, bp.states, base), frozenset(names.items())


def generate_family(cfg: GeneratorConfig, size: int = 3, rng: Optional[random.Random] = None):
    """``size`` systems where each is derived from its predecessor; returns
    (systems, blueprints, natural relations between consecutive members)."""
    rng = rng if rng is not None else random.Random(cfg.seed)
    for _ in range(cfg.retries):
        system, bp = generate_blueprint(cfg, rng)
        systems, bps, links = [system], [bp], []
        try:
            while len(systems) < size:
                nbp, link = derive_blueprint(rng, bps[-1])
                systems.append(nbp.build())
                bps.append(nbp)
                links.append(link)
        except (ClosureLimitError, HorizonOverflowError):
            continue
        return systems, bps, links
    raise GenerationExhaustedError(f"no family within {cfg.retries} attempts (seed {cfg.seed})")


# suites ------------------------------------------------------------------------

@dataclass
class Counterexample:
    suite: str
    trial: int
    seed: int
    prop: str
    detail: dict
    blueprints: tuple = ()
    shrunk: bool = False


@dataclass
class SuiteReport:
    suite: str
    trials: int
    passed: int = 0
    failed: int = 0
    checks: int = 0
    vacuous: int = 0
    counterexamples: List[Counterexample] = field(default_factory=list)
    # property family (flavor tag stripped) -> number of trials it failed in
    property_failures: Dict[str, int] = field(default_factory=dict)
    property_checks: Dict[str, int] = field(default_factory=dict)
    elapsed: float = field(default=0.0, compare=False)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def checks_of(self, prop: str) -> int:
        return sum(n for p, n in self.property_checks.items()
                   if p == prop or p.split("[")[0] == prop)

    def failures_of(self, prop: str) -> int:
        """Trials in which property ``prop`` failed, with or without a flavor tag."""
        return sum(n for p, n in self.property_failures.items()
                   if p == prop or p.split("[")[0] == prop)

    def summary(self) -> str:
        line = (f"{self.suite}: {self.passed}/{self.trials} trials passed, {self.checks} checks, "
                f"{self.vacuous} vacuous, {self.failed} failed")
        if self.property_failures:
            line += " (" + ", ".join(f"{p}: {n}" for p, n in sorted(self.property_failures.items())) + ")"
        return line


def _reach_states(system, flavor) -> frozenset:
    spaces = time_indexed_spaces(system)
    return spaces.all_internal if Flavor.parse(flavor) == Flavor.SYNC else spaces.all_external


class _Trial:
    def __init__(self, suite, trial, seed):
        self.suite, self.trial, self.seed = suite, trial, seed
        self.checks = 0
        self.vacuous = 0
        self.failures: List[tuple] = []
        self.by_prop: Dict[str, int] = {}

    def expect(self, prop, verdict, **detail):
        self.checks += 1
        self.by_prop[prop] = self.by_prop.get(prop, 0) + 1
        if not verdict:
            info = dict(detail)
            info.update(getattr(verdict, "witness", None) or {})
            clause = getattr(verdict, "failed_clause", None)
            if clause:
                info["clause"] = clause
            self.failures.append((prop, info))


def _accepted_relations(sys1, sys2, flavor, rng, natural=None, bisimulation=False, extra=2):
    """Accepted relations between two systems: the greatest one, the natural
    link if it is accepted, and a few accepted random subsets."""
    check = check_bisimulation if bisimulation else check_simulation
    found = []
    res = synthesize_greatest(sys1, sys2, flavor, bisimulation=bisimulation)
    if res.relation is None:
        return found
    found.append(res.relation)
    if natural is not None:
        rel = Relation(natural, flavor)
        if check(sys1, sys2, rel):
            found.append(rel)
    pool = sorted(res.relation.pairs, key=repr)
    for _ in range(extra):
        sub = Relation(frozenset(p for p in pool if rng.random() < 0.7), flavor)
        if sub.pairs and check(sys1, sys2, sub):
            found.append(sub)
    return found


def _flavors_for(suite, cls):
    if suite == "thm2" or suite == "cor1" and cls == ASYNC:
        return [Flavor.ASYNC, Flavor.EXT_SYNC, Flavor.SYNC, Flavor.L_INITIAL]
    if suite == "thm3" or suite == "cor1" and cls == EXT_SYNC:
        return [Flavor.EXT_SYNC, Flavor.SYNC]
    return [Flavor.SYNC]


def _exists(a, b, flavor, bisimulation=False):
    res = synthesize_greatest(a, b, flavor, bisimulation=bisimulation)
    return res.verdict


def _preorder_trial(t: _Trial, systems, links, rng, flavors):
    s1, s2, s3 = systems
    for flavor in flavors:
        for s in systems:
            ident = identity_relation(_reach_states(s, flavor), flavor)
            t.expect(f"reflexivity[{flavor.value}]", check_simulation(s, s, ident))
        r12s = _accepted_relations(s1, s2, flavor, rng, links[0])
        r23s = _accepted_relations(s2, s3, flavor, rng, links[1])
        if not r12s or not r23s:
            t.vacuous += 1
        if r12s and r23s:
            # the preorder claim proper: some relation from s1 to s3 exists
            t.expect(f"transitivity-existence[{flavor.value}]",
                     _exists(s1, s3, flavor), flavor=flavor.value)
        via = _reach_states(s2, flavor)
        for r12 in r12s:
            for r23 in r23s:
                r13 = compose(r12, r23, via=via)
                t.expect(f"transitivity[{flavor.value}]", check_simulation(s1, s3, r13),
                         r12=sorted(r12.pairs), r23=sorted(r23.pairs))


def _equivalence_trial(t: _Trial, systems, links, rng, flavors):
    s1, s2, s3 = systems
    for flavor in flavors:
        for s in systems:
            ident = identity_relation(_reach_states(s, flavor), flavor)
            t.expect(f"bisim-reflexivity[{flavor.value}]", check_bisimulation(s, s, ident))
        r12s = _accepted_relations(s1, s2, flavor, rng, links[0], bisimulation=True)
        r23s = _accepted_relations(s2, s3, flavor, rng, links[1], bisimulation=True)
        if not r12s:
            t.vacuous += 1
        for r in r12s:
            t.expect(f"symmetry[{flavor.value}]", check_bisimulation(s2, s1, inverse(r)),
                     relation=sorted(r.pairs))
        if r12s and r23s:
            t.expect(f"bisim-transitivity-existence[{flavor.value}]",
                     _exists(s1, s3, flavor, bisimulation=True), flavor=flavor.value)
        via = _reach_states(s2, flavor)
        for r12 in r12s:
            for r23 in r23s:
                t.expect(f"bisim-transitivity[{flavor.value}]",
                         check_bisimulation(s1, s3, compose(r12, r23, via=via)))


def _lemma1_trial(t: _Trial, systems, links, rng, identity_style):
    s1, s2 = systems[0], systems[1]
    rels = _accepted_relations(s1, s2, Flavor.L_INITIAL, rng, links[0], extra=3)
    if not rels:
        t.vacuous += 1
    for r in rels:
        t.expect("lemma1(i)", check_simulation(s1, s2, r, Flavor.EXT_SYNC), relation=sorted(r.pairs))
        t.expect("lemma1(ii)", check_simulation(s1, s2, r, Flavor.ASYNC), relation=sorted(r.pairs))
        if identity_style and s1.internal_axis.same_grid(s1.external_axis):
            t.expect("lemma1(iii)", check_simulation(s1, s2, r, Flavor.SYNC), relation=sorted(r.pairs))


def _thm1_trial(t: _Trial, systems, links, rng):
    s1, s2 = systems[0], systems[1]
    for a, b, link in ((s1, s2, links[0]), (s2, s1, None)):
        sim = synthesize_greatest(a, b, Flavor.L_INITIAL)
        if sim.relation is not None:
            t.expect("thm1(i)", check_behavior_inclusion(a, b), relation=sorted(sim.relation.pairs))
        else:
            t.vacuous += 1
        bis = synthesize_greatest(a, b, Flavor.L_INITIAL, bisimulation=True)
        if bis.relation is not None:
            inc = check_behavior_inclusion(a, b)
            t.expect("thm1(ii)", inc.equal, relation=sorted(bis.relation.pairs))


SUITE_CLASS = {"lemma1": ASYNC, "thm1": ASYNC, "thm2": ASYNC, "thm3": EXT_SYNC, "thm4": SYNC, "cor1": ASYNC}


def _run_trial(name, cfg, trial_seed, blueprints=None):
    """Run one trial; returns (_Trial, blueprints)."""
    rng = random.Random(trial_seed)
    if blueprints is None:
        systems, bps, links = generate_family(replace(cfg, seed=trial_seed), 3, rng)
    else:
        bps = blueprints
        systems = [bp.build() for bp in bps]
        links = [frozenset((s, s) for s in bps[0].states)] * 2
    t = _Trial(name, 0, trial_seed)
    if name in ("thm2", "thm3", "thm4"):
        _preorder_trial(t, systems, links, rng, _flavors_for(name, cfg.axiom_class))
    elif name == "cor1":
        _equivalence_trial(t, systems, links, rng, _flavors_for(name, cfg.axiom_class))
    elif name == "lemma1":
        _lemma1_trial(t, systems, links, rng, cfg.tau_style == "identity")
    elif name == "thm1":
        _thm1_trial(t, systems, links, rng)
    else:
        raise ValueError(f"unknown suite {name!r}")
    return t, tuple(bps)


def shrink(blueprints: Sequence[Blueprint], still_fails: Callable[[tuple], bool], budget: int = 200):
    """Greedily drop base trajectories while ``still_fails`` keeps holding.

    ``still_fails`` receives a tuple of blueprints; candidates that cannot be
    built (closure overflow) are skipped.
    """
    current = tuple(blueprints)
    progress = True
    while progress and budget > 0:
        progress = False
        for i, bp in enumerate(current):
            for j in range(len(bp.base)):
                if len(bp.base) == 1:
                    break
                cand = list(current)
                cand[i] = Blueprint(bp.cfg, bp.states, bp.base[:j] + bp.base[j + 1:])
                budget -= 1
                try:
                    bad = still_fails(tuple(cand))
                except (ClosureLimitError, HorizonOverflowError):
                    bad = False
                if bad:
                    current = tuple(cand)
                    progress = True
                    break
            if progress or budget <= 0:
                break
    return current


def run_theorem_suite(name: str, cfg: Optional[GeneratorConfig] = None, trials: int = 50,
                      shrink_failures: bool = True) -> SuiteReport:
    """Execute one theorem suite over ``trials`` generated families."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = cfg or GeneratorConfig()
    if name != "cor1":
        cfg = replace(cfg, axiom_class=SUITE_CLASS[name])
    start = time.perf_counter()
    report = SuiteReport(name, trials)
    for i in range(trials):
        seed = cfg.seed * 1_000_003 + i
        t, bps = _run_trial(name, cfg, seed)
        report.checks += t.checks
        for p, n in t.by_prop.items():
            report.property_checks[p] = report.property_checks.get(p, 0) + n
        report.vacuous += t.vacuous
        if not t.failures:
            report.passed += 1
            continue
        report.failed += 1
        for p in sorted({p for p, _ in t.failures}):
            report.property_failures[p] = report.property_failures.get(p, 0) + 1
        prop, detail = t.failures[0]
        shrunk = bps
        if shrink_failures:
            def fails(cand, prop=prop):
                tt, _ = _run_trial(name, cfg, seed, cand)
                return any(p == prop for p, _ in tt.failures)
            shrunk = shrink(bps, fails)
        report.counterexamples.append(Counterexample(name, i, seed, prop, detail, shrunk,
                                                     shrunk != bps))
    report.elapsed = time.perf_counter() - start
    return report
