import random
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tempora import kernels
from tempora.errors import IncompatibleSystemsError, OutOfRangeError
from tempora.harness import GeneratorConfig, generate_family, generate_system
from tempora.relations import (Flavor, Relation, TransferProblem, check_behavior_inclusion, check_bisimulation,
                               check_cover, check_simulation, check_transfer, compose, identity_relation,
                               inverse, synthesize_greatest, universe)
from tempora.systems import closure, make_system, time_indexed_spaces
from tempora.timecore import EXTERNAL, TimeAxis

import oracles

AX = TimeAxis(1, 4)
EX = TimeAxis(1, 4, EXTERNAL)
FLAVORS = ["async", "ext-sync", "sync", "l-initial"]
# flavors that are preorders for each system class
PROMISED = {"async": FLAVORS, "ext-sync": ["ext-sync", "sync"], "sync": ["sync"]}


def ident(states, w=None):
    n = len(states)
    w = tuple(w if w is not None else (0,) * n)
    tau = tuple(range(n)) + (None,) * (5 - n)
    return (w, tuple(states), [(w, tau)])


def closed(trajs, cls="sync"):
    return closure(make_system(AX, EX, trajs, axiom_class=cls))


CHAIN = closed([ident("ababa")])
QUOTIENT = closed([ident("qqqqq")])


def test_identity_on_itself():
    # CHAIN is a sync-class system, so only the synchronous flavor is promised
    assert check_simulation(CHAIN, CHAIN, identity_relation("ab", "sync"), "sync")
    assert check_bisimulation(CHAIN, CHAIN, identity_relation("ab", "sync"), "sync")
    for cls in ["async", "ext-sync", "sync"]:
        s = generate_system(GeneratorConfig(seed=2, axiom_class=cls))
        for fl in FLAVORS:
            if fl in PROMISED[cls]:
                states = time_indexed_spaces(s).all_internal if fl == "sync" else time_indexed_spaces(s).all_external
                assert check_bisimulation(s, s, identity_relation(states, fl), fl)


def test_empty_relation_passes_transfer():
    assert check_transfer(CHAIN, QUOTIENT, frozenset())
    v = check_simulation(CHAIN, QUOTIENT, Relation(frozenset()))
    assert not v and v.label == "4a"


def test_chain_against_quotient():
    R = Relation({("a", "q"), ("b", "q")}, Flavor.SYNC)
    # frozen from the oracle: the quotient simulates the chain synchronously,
    # and the total relation is a sync bisimulation as well
    assert oracles.simulation_ok(CHAIN, QUOTIENT, R.pairs, "sync")
    assert oracles.simulation_ok(QUOTIENT, CHAIN, inverse(R).pairs, "sync")
    assert check_simulation(CHAIN, QUOTIENT, R, "sync")
    assert check_bisimulation(CHAIN, QUOTIENT, R, "sync")
    for fl in FLAVORS:
        assert bool(check_simulation(CHAIN, QUOTIENT, R, fl)) == oracles.simulation_ok(CHAIN, QUOTIENT, R.pairs, fl)


def test_transfer_failure_names_clause_and_witness():
    a = closed([ident("ab", (0, 1))])
    b = closed([ident("ab", (0, 2))])
    v = check_simulation(a, b, Relation({("a", "a"), ("b", "b")}))
    assert not v and v.failed_clause == "transfer-4b" and v.label == "4b"
    assert {"t1", "t2", "k1", "k2"} <= set(v.witness)


def test_cover_variants():
    s = CHAIN
    full = Relation({(p, q) for p in "ab" for q in "q"})
    assert check_cover(s, QUOTIENT, full, "async")
    # 0-initial cover relates X^0 only: not enough for the per-tick cover
    R = {("a", "q")}
    assert check_cover(s, QUOTIENT, R, "l-initial", 0)
    v = check_cover(s, QUOTIENT, R, "ext-sync")
    assert not v and v.label == "5a"
    assert not check_cover(s, QUOTIENT, R, "sync")


def test_cover_vacuous_and_out_of_range():
    short = closed([ident("ab")])
    # nothing in short reaches external tick 3
    assert check_cover(short, QUOTIENT, frozenset(), "l-initial", 3)
    with pytest.raises(OutOfRangeError):
        check_cover(short, QUOTIENT, frozenset(), "l-initial", 5)


def test_sync_needs_shared_internal_axis():
    other = make_system(TimeAxis(1, 5), EX, [((0,) * 5, tuple("qqqqq"), [((0,) * 5, (0, 1, 2, 3, 4, None))])])
    with pytest.raises(IncompatibleSystemsError):
        check_simulation(CHAIN, other, frozenset(), "sync")


def test_inverse_and_compose_algebra():
    R = Relation({("a", "q"), ("b", "q")})
    assert inverse(inverse(R)) == R
    assert compose(R, identity_relation("q")) == R
    assert compose(R, identity_relation("x")).pairs == frozenset()
    assert compose({(1, 2), (1, 3)}, {(2, 9)}) == {(1, 9)}


def test_synthesis_on_identical_systems():
    res = synthesize_greatest(CHAIN, CHAIN, "sync")
    assert {(s, s) for s in "ab"} <= res.relation.pairs
    for cls in ["async", "ext-sync", "sync"]:
        s = generate_system(GeneratorConfig(seed=5, axiom_class=cls))
        for fl in FLAVORS:
            if fl in PROMISED[cls]:
                res = synthesize_greatest(s, s, fl)
                states = {a for a, _ in universe(s, s, fl)}
                assert {(x, x) for x in states} <= res.relation.pairs


def test_synthesis_incompatible_at_start():
    a = closed([((0,), ("s",), [(("g",), (0,))])])
    b = closed([((0,), ("s",), [(("h",), (0,))])])
    for fl, label in [("async", "4a"), ("ext-sync", "5a"), ("sync", "6a"), ("l-initial", "4a@l")]:
        res = synthesize_greatest(a, b, fl)
        assert res.relation is None and res.verdict.label == label


def _pairs(seeds, cls):
    for seed in seeds:
        cfg = GeneratorConfig(seed=seed, max_states=3, max_trajectories=3, internal_horizon=5,
                              external_horizon=3, gamma_size=2, axiom_class=cls)
        systems, _, _ = generate_family(cfg, 2, random.Random(seed))
        yield systems


@pytest.mark.parametrize("cls", ["async", "ext-sync", "sync"])
def test_synthesis_matches_brute_force(cls):
    checked = 0
    for s1, s2 in _pairs(range(12), cls):
        if len(oracles.universe(s1, s2, "async")) > 9:
            continue
        for fl in FLAVORS:
            exp = oracles.brute_force_greatest(s1, s2, fl)
            got = synthesize_greatest(s1, s2, fl).relation
            assert (None if got is None else got.pairs) == exp
            checked += 1
    assert checked >= 8


def test_synthesis_result_is_maximal():
    s1, s2 = next(_pairs([4], "async"))
    res = synthesize_greatest(s1, s2, "async")
    if res.relation is None:
        pytest.skip("no relation on this pair")
    assert check_simulation(s1, s2, res.relation)
    for p in res.deleted:
        assert not check_simulation(s1, s2, res.relation.with_pairs(res.relation.pairs | {p}))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000), st.sampled_from(["async", "ext-sync", "sync"]), st.randoms(use_true_random=False))
def test_checker_agrees_with_oracle(seed, cls, rnd):
    cfg = GeneratorConfig(seed=seed, max_states=3, max_trajectories=4, internal_horizon=6,
                          external_horizon=3, axiom_class=cls)
    systems, _, _ = generate_family(cfg, 2, random.Random(seed))
    s1, s2 = systems
    for fl in FLAVORS:
        U = oracles.universe(s1, s2, fl)
        R = frozenset(p for p in U if rnd.random() < 0.75)
        for anchor in (True, False):
            got = check_simulation(s1, s2, Relation(R, fl), fl, anchor_cut=anchor)
            assert bool(got) == oracles.simulation_ok(s1, s2, R, fl, anchor=anchor)


def test_inclusion_basics():
    v = check_behavior_inclusion(CHAIN, CHAIN)
    assert v.equal and v.symbol == "="
    a = closed([ident("ab", (0, 1))])
    b = closed([ident("ab", (0, 2))])
    v = check_behavior_inclusion(a, b)
    assert v.symbol == "incomparable" and v.missing is not None


def test_inclusion_without_initial_simulation(pair_fixture):
    s1, s2, _ = pair_fixture("inclusion_without_initial_simulation")
    assert check_behavior_inclusion(s1, s2).subset
    assert synthesize_greatest(s1, s2, "l-initial", 0).relation is None
    assert oracles.brute_force_greatest(s1, s2, "l-initial", 0) is None


def test_transfer_problem_matrix_round_trip():
    s = generate_system(GeneratorConfig(seed=11))
    prob = TransferProblem(s, s)
    R = identity_relation(time_indexed_spaces(s).all_external)
    M = prob.matrix(R)
    assert prob.pairs_of(M) == R.pairs


@pytest.mark.skipif(not kernels.compiled_available(), reason="compiled kernel not built")
def test_kernels_agree():
    rng = random.Random(5)
    for seed in range(25):
        cls = ["async", "ext-sync", "sync"][seed % 3]
        systems, _, _ = generate_family(GeneratorConfig(seed=seed, axiom_class=cls), 2, random.Random(seed))
        s1, s2 = systems
        for fl in FLAVORS:
            a = synthesize_greatest(s1, s2, fl, kernel="python")
            b = synthesize_greatest(s1, s2, fl, kernel="compiled")
            assert a.greatest_transfer == b.greatest_transfer
            U = universe(s1, s2, fl)
            R = frozenset(p for p in U if rng.random() < 0.6)
            assert bool(check_transfer(s1, s2, R, kernel="python")) == bool(check_transfer(s1, s2, R, kernel="compiled"))
