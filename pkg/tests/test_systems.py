import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from tempora.errors import ClosureLimitError, HorizonOverflowError, SystemValidationError
from tempora.harness import GeneratorConfig, generate_system
from tempora.signalmaps import quantize
from tempora.systems import (axiom_class, check_state_axiom, closure, external_behavior, make_system,
                             restrict_behavior, time_indexed_spaces)
from tempora.timecore import EXTERNAL, TimeAxis

import example1 as ex
import oracles

AX = TimeAxis(1, 4)
EX = TimeAxis(1, 4, EXTERNAL)
IDENT = (0, 1, 2, 3, 4)


def ident_traj(states):
    """Identity-tau trajectory whose w and gamma copy the state path."""
    n = len(states)
    tau = IDENT[:n] + (None,) * (5 - n)
    return (tuple(states), tuple(states), [(tuple(states), tau)])


def test_external_behavior_empty_and_single():
    assert external_behavior(make_system(AX, EX, [])) == frozenset()
    s = make_system(AX, EX, [ident_traj("abcde")])
    assert external_behavior(s) == {tuple("abcde")}


def test_external_behavior_ramp_family():
    # three ramps that share their first crossings; gamma sets deduplicate
    ramps = [[5 * t for t in range(9)], [5 * t for t in range(8)] + [35], [0, 5, 15, 15, 25, 25, 35, 35, 40]]
    trajs = []
    for i, r in enumerate(ramps):
        w = ex.sig(r)
        trajs.append((w.values, tuple(f"r{i}t{t}" for t in range(9)), quantize(ex.spec(), w)))
    s = make_system(ex.INTERNAL, ex.EXTERNAL_AXIS, trajs)
    expected = {g for _, _, g, _ in oracles.runs(s)}
    assert external_behavior(s) == expected == {("q1", "q2", "q3", "q4", None)}


def test_closed_single_trajectory():
    s = make_system(AX, EX, [ident_traj("abcde")])
    for cls in ("async", "ext-sync", "sync"):
        assert check_state_axiom(s, cls)


def _missing_one():
    """Two paths meeting at state m at tick 1; one cross concatenation is
    present, the other is omitted (found by enumerating the requirements)."""
    base = make_system(AX, EX, [ident_traj("amb"), ident_traj("cmd")], axiom_class="sync")
    req = oracles.required_concatenations(base, "sync")
    have = set(oracles.runs(base))
    extra = sorted(req - have)
    assert len(extra) == 2
    w, x, g, tau = extra[0]
    trajs = [ident_traj("amb"), ident_traj("cmd"), (w, x, [(g, tau)])]
    return make_system(AX, EX, trajs, axiom_class="sync")


def test_missing_concatenation_rejected_then_closed():
    s = _missing_one()
    v = check_state_axiom(s)
    assert not v
    assert v.witness["state"] == "m" and v.witness["missing"] == "trajectory"
    assert not oracles.axiom_ok(s, "sync")
    c = closure(s)
    assert len(c.behavior) == len(s.behavior) + 1
    assert check_state_axiom(c) and oracles.axiom_ok(c, "sync")


def test_closure_fixpoint_and_idempotence():
    s = _missing_one()
    c = closure(s)
    assert closure(c) == c
    assert external_behavior(c) >= external_behavior(s)


def test_closure_overflow_and_limit():
    # a shifted cut pushes the second path past the grid
    s = make_system(AX, EX, [ident_traj("xxabc"), ident_traj("x")], axiom_class="async")
    with pytest.raises(HorizonOverflowError):
        closure(s)
    v = check_state_axiom(s, "async")
    assert v.up_to_horizon or not v
    s = make_system(AX, EX, [ident_traj("abc"), ident_traj("dbe")], axiom_class="sync")
    with pytest.raises(ClosureLimitError):
        closure(s, max_runs=2)


def test_time_indexed_spaces_identity():
    s = make_system(AX, EX, [ident_traj("abcde"), ident_traj("abd")])
    sp = time_indexed_spaces(s)
    for t in range(5):
        assert sp.at_internal(t) == sp.at_external(t)
    assert sp.all_external <= sp.all_internal


def test_time_indexed_spaces_empty():
    sp = time_indexed_spaces(make_system(AX, EX, []))
    assert not sp.all_internal and not sp.all_external


def test_time_indexed_spaces_ramp():
    w = ex.sig(ex.RAMP)
    states = tuple(f"t{t}" for t in range(9))
    s = make_system(ex.INTERNAL, ex.EXTERNAL_AXIS, [(w.values, states, quantize(ex.spec(), w))])
    assert time_indexed_spaces(s).at_external(1) == {"t3"}
    assert time_indexed_spaces(s).at_external(1) == oracles.x_k(s)[1]


def test_validation_errors():
    with pytest.raises(SystemValidationError):
        make_system(AX, EX, [(("a",), ("s",), [(("g", "h"), (0, None))])])  # gamma past reach
    with pytest.raises(SystemValidationError):
        make_system(AX, EX, [(("a", None), ("s", None), [(("g", "h"), (0, 1))])])  # tau where w undefined
    with pytest.raises(ValueError):
        axiom_class("sometimes")


def test_equality_by_content():
    a = make_system(AX, EX, [ident_traj("ab"), ident_traj("cd")])
    b = make_system(AX, EX, [ident_traj("cd"), ident_traj("ab")])
    assert a == b and hash(a) == hash(b)
    assert restrict_behavior(a, [0]) != a


CLASSES = ["async", "ext-sync", "sync"]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(CLASSES), st.sampled_from(["identity", "mixed", "set-to-point"]))
def test_generated_systems_satisfy_their_axiom(seed, cls, style):
    s = generate_system(GeneratorConfig(seed=seed, axiom_class=cls, tau_style=style))
    assert check_state_axiom(s, cls)
    assert oracles.axiom_ok(s, cls)
    # the hierarchy: async-accepted systems also pass the weaker classes
    order = CLASSES[CLASSES.index(cls):]
    for weaker in order:
        assert check_state_axiom(s, weaker)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_external_ticks_are_all_reached(seed):
    s = generate_system(GeneratorConfig(seed=seed, tau_style="mixed"))
    sp = time_indexed_spaces(s)
    reach = max((e.reach for es in s.phi.values() for e in es), default=-1)
    for k in range(reach + 1):
        assert sp.at_external(k)


def test_axiom_check_agrees_with_oracle_on_random_subsystems():
    rng = random.Random(3)
    for seed in range(40):
        cls = CLASSES[seed % 3]
        s = generate_system(GeneratorConfig(seed=seed, axiom_class=cls))
        if len(s.behavior) < 2:
            continue
        keep = sorted(rng.sample(range(len(s.behavior)), len(s.behavior) - 1))
        sub = restrict_behavior(s, keep)
        assert bool(check_state_axiom(sub, cls)) == oracles.axiom_ok(sub, cls)
