from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from facmech import (
    ConfigurationError,
    Fixture,
    Generator,
    Instance,
    Mechanism,
    Objective,
    RatioResult,
    SPViolation,
    Solution,
    check_sp,
    compare_ratio_to_bound,
    fuzz_sp,
    pivotal_misreports,
    ratio,
    sweep,
)
from facmech.model import ONE_PLUS_SQRT2, THREE, TWO
from facmech.verification import reverify, theorem_bound
from strategies import general, homogeneous, singleton

F = Fraction


# -- pivotal sets --------------------------------------------------------------

def test_pivotal_set_two_candidates_one_other_agent():
    inst = Instance.homogeneous([5, 0], [-1, 1])
    probes = set(pivotal_misreports(inst, 0))
    eta = F(1, 4)  # smallest gap among {-1, 0, 1, 5} is 1
    assert {-1, 0, 1} <= probes
    assert {-1 - eta, -1 + eta, -eta, eta, 1 - eta, 1 + eta} <= probes
    assert min(probes) == -1 - 2 * 6 and max(probes) == 5 + 2 * 6


def test_pivotal_set_single_pair():
    inst = Instance.homogeneous([0], [0, 2])
    probes = pivotal_misreports(inst, 0)
    assert {1, F(1, 2), F(3, 2)} <= set(probes)
    assert probes == sorted(set(probes))


def test_pivotal_set_contains_the_move_to_one():
    inst = Fixture.parse("sc-general-lower-i1?eps=1/1000").build()
    assert 1 in pivotal_misreports(inst, 1)


def test_pivotal_set_coincident_coordinates():
    inst = Instance.homogeneous([3, 3], [3, 3])
    assert pivotal_misreports(inst, 0) == [1, 2, 3, 4, 5]
    with pytest.raises(IndexError):
        pivotal_misreports(inst, 2)


# -- check_sp --------------------------------------------------------------------

def test_zero_cost_agent_never_violates():
    inst = Instance.homogeneous([0, 0, 1], [0, 0, 10])
    assert Mechanism("broken-mean")(inst) == (0, 1)
    assert all(v.agent != 0 for v in check_sp(Mechanism("broken-mean"), inst))


def test_broken_mean_negative_control():
    inst = Instance.homogeneous([0, 10], [0, 6, 10])
    found = check_sp(Mechanism("broken-mean"), inst)
    assert found
    v = found[0]
    assert (v.agent, v.misreport, v.true_cost, v.deviated_cost) == (1, 11, 14, 4)
    assert all(reverify(Mechanism("broken-mean"), inst, w) for w in found)


def test_violation_must_be_strict():
    with pytest.raises(ValueError):
        SPViolation(0, 0, 1, 2, 2, Solution(0, 1), Solution(1, 0))


# Counterexamples to strategyproofness found by the checker.  Each one is
# recomputed below with the reference cost function.

WITNESSES = [
    # (mechanism, instance, agent, misreport, cost before, cost after)
    ("leftmost-priority", Instance.homogeneous([F(2, 15), F(17, 14)], [-2, 2, F(11, 4)]),
     0, F(-23, 2), F(269, 60), 4),
    ("leftmost-priority", Fixture.parse("mc-hom-lower-i1?eps=1/1000").build(),
     0, -5, F(501, 500), 1),
    ("alpha-stat", Instance.homogeneous([F(4, 3), F(17, 14), F(-17, 3), F(2, 15), 3, F(-5, 7)], [2, F(11, 4), -2]),
     3, -23, F(269, 60), 4),
    ("pmm", Instance.build([(-1, False, True), (1, True, False), (4, True, False)], [5, -3, -1]),
     1, F(-7, 4), 4, 2),
]


@pytest.mark.parametrize("name, inst, agent, z, before, after", WITNESSES)
def test_known_manipulations_are_found(name, inst, agent, z, before, after):
    mech = Mechanism(name)
    found = check_sp(mech, inst)
    assert any(v.agent == agent and v.misreport == z for v in found)
    agents, cands = oracle.plain(inst)
    s0 = mech(inst)
    s1 = mech(inst.with_position(agent, z))
    assert oracle.cost(agents[agent], cands[s0.c1], cands[s0.c2]) == before
    assert oracle.cost(agents[agent], cands[s1.c1], cands[s1.c2]) == after
    assert all(reverify(mech, inst, v) for v in found)


def test_scaled_and_unscaled_search_agree():
    for name, inst, *_ in WITNESSES:
        mech = Mechanism(name)
        assert check_sp(mech, inst) == check_sp(mech, inst, scale=False)


@settings(max_examples=60)
@given(homogeneous)
def test_median2_strategyproof_on_random_instances(inst):
    assert check_sp(Mechanism("median2"), inst) == []


@settings(max_examples=60)
@given(singleton())
def test_vote_for_priority_strategyproof_on_random_instances(inst):
    assert check_sp(Mechanism("vote-for-priority"), inst) == []


@settings(max_examples=40)
@given(general())
def test_reported_violations_reverify(inst):
    for name in ("pmm", "naive-median-f1", "naive-left-right", "general-max"):
        mech = Mechanism(name)
        for v in check_sp(mech, inst):
            assert reverify(mech, inst, v)


# -- ratios ----------------------------------------------------------------------

def test_ratio_conventions():
    assert RatioResult(0, 0).ratio == 1 and not RatioResult(0, 0).infinite
    assert RatioResult(3, 0).infinite and RatioResult(3, 0).ratio is None
    assert RatioResult(F(3, 2), F(3, 2)).ratio == 1
    assert str(RatioResult(3, 0)) == "inf"


def test_ratio_median_tight():
    r = ratio(Mechanism("median2"), Fixture.parse("median-tight?eps=1/1000").build(), Objective.SC)
    assert r.ratio == oracle.median_tight(F(1, 1000)) == F(1498, 501)


def test_ratio_naive_left_right():
    r = ratio(Mechanism("naive-left-right"), Fixture.parse("vfp-example?eps=1/1000").build(), Objective.MC)
    assert r.ratio == F(5000, 1001)


def test_unique_pair_symmetric_prefs_ratio_one():
    inst = Instance.homogeneous([1, 4], [0, 3])
    for name in ("median2", "alpha-stat", "leftmost-priority", "general-max"):
        for obj in Objective:
            assert ratio(Mechanism(name), inst, obj).ratio == 1


def test_infinite_ratio_from_duplicate_slots():
    zero = Instance.homogeneous([0], [0, 0, 10])
    assert optimal_value(zero) == 0
    r = ratio(lambda _: Solution(0, 2), zero, Objective.SC)
    assert r.infinite and r.mech_value == 10


def optimal_value(inst):
    return oracle.brute_opt(*oracle.plain(inst), "sc")


@pytest.mark.parametrize("value, bound, order", [
    (F(241, 100), ONE_PLUS_SQRT2, -1), (3, THREE, 0), (F(17, 7), ONE_PLUS_SQRT2, 1), (2, TWO, 0),
])
def test_compare_ratio_to_bound(value, bound, order):
    assert compare_ratio_to_bound(value, bound) == order


def test_infinite_exceeds_every_bound():
    assert compare_ratio_to_bound(RatioResult(1, 0), THREE) == 1


def test_theorem_bounds():
    assert theorem_bound(Mechanism("alpha-stat"), Objective.SC, True) == ONE_PLUS_SQRT2
    assert theorem_bound(Mechanism("leftmost-priority"), Objective.MC, True) == TWO
    assert theorem_bound(Mechanism("leftmost-priority"), Objective.MC, False) == THREE
    assert theorem_bound(Mechanism("naive-median-f1"), Objective.SC, False) is None


# -- sweeps ------------------------------------------------------------------------

def test_sweep_is_reproducible():
    g = Generator.parse("uniform-homogeneous")
    a = sweep(Mechanism("alpha-stat"), Objective.SC, g, 200, 11)
    b = sweep(Mechanism("alpha-stat"), Objective.SC, g, 200, 11)
    assert a == b
    assert sum(c for _, c in a.histogram) == 200
    assert ratio(Mechanism("alpha-stat"), a.argmax_instance, Objective.SC) == a.max_ratio
    assert a.within_bound


def test_sweep_parallel_matches_serial(monkeypatch):
    g = Generator.parse("singleton")
    monkeypatch.setenv("FACMECH_THREADS", "1")
    serial = sweep(Mechanism("general-max"), Objective.MC, g, 120, 5)
    monkeypatch.setenv("FACMECH_THREADS", "3")
    parallel = sweep(Mechanism("general-max"), Objective.MC, g, 120, 5)
    assert serial == parallel


def test_empty_sweep():
    rep = sweep(Mechanism("median2"), Objective.SC, Generator(), 0, 1)
    assert rep.max_ratio is None and rep.argmax_instance is None and rep.within_bound is None


@pytest.mark.parametrize("mech, gen", [
    ("median2", "uniform-general"), ("alpha-stat", "singleton"), ("leftmost-priority", "uniform-general"),
    ("vote-for-priority", "uniform-general"), ("vote-for-priority", "clustered?prefs=overlap"),
])
def test_mismatched_generator_is_rejected(mech, gen):
    with pytest.raises(ConfigurationError):
        sweep(Mechanism(mech), Objective.SC, Generator.parse(gen), 10, 1)
    with pytest.raises(ConfigurationError):
        fuzz_sp(Mechanism(mech), Generator.parse(gen), 10, 1)


def test_fuzz_finds_broken_mean():
    rep = fuzz_sp(Mechanism("broken-mean"), Generator(), 50, 1)
    assert not rep.ok
    assert rep == fuzz_sp(Mechanism("broken-mean"), Generator(), 50, 1)


@given(st.integers(0, 2 ** 32))
@settings(max_examples=5)
def test_fuzz_median2_clean(seed):
    assert fuzz_sp(Mechanism("median2"), Generator(), 20, seed).ok
