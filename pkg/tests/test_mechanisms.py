from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from facmech import (
    AlphaParam,
    ConfigurationError,
    DomainError,
    Fixture,
    Instance,
    Mechanism,
    Solution,
    alpha_index,
)
from facmech.instances import duplicate
from facmech.mechanisms import MECHANISM_NAMES, SQRT2_MINUS_1, in_domain
from strategies import general, homogeneous, instances, overlap, singleton

SQ = SQRT2_MINUS_1


# -- ranks -------------------------------------------------------------------

FROZEN_RANKS = {1: (1, 1), 2: (1, 2), 3: (2, 2), 4: (2, 3), 5: (3, 3), 6: (3, 4),
                7: (3, 5), 8: (4, 5), 9: (4, 6), 10: (5, 6), 100: (42, 59)}


@pytest.mark.parametrize("n", sorted(FROZEN_RANKS))
def test_alpha_ranks_frozen(n):
    assert alpha_index(n, SQ) == FROZEN_RANKS[n]


@given(st.integers(1, 10 ** 7))
def test_alpha_ranks_match_decimal_sqrt(n):
    lo, hi = oracle.alpha_ranks(n)
    assert alpha_index(n, SQ) == (lo, max(lo, hi))


@pytest.mark.parametrize("alpha, n, ranks", [
    ("1/2", 4, (2, 2)), ("1/2", 5, (3, 3)), ("0", 4, (1, 4)), ("1/3", 6, (2, 4)), ("1/4", 3, (1, 3)),
])
def test_alpha_ranks_rational(alpha, n, ranks):
    assert alpha_index(n, AlphaParam.parse(alpha)) == ranks


def test_alpha_param_parsing():
    assert AlphaParam.parse("sqrt2-1").is_sqrt2_minus_1
    assert AlphaParam.parse(" 1/3 ").value == Fraction(1, 3)
    for bad in ("2/3", "-1/5", "x", "1/0"):
        with pytest.raises(ConfigurationError):
            AlphaParam.parse(bad)


def test_mechanism_ids():
    assert str(Mechanism("alpha-stat")) == "alpha-stat[alpha=sqrt2-1]"
    with pytest.raises(ConfigurationError):
        Mechanism("median3")
    with pytest.raises(ConfigurationError):
        Mechanism("pmm", AlphaParam.parse("1/3"))


# -- fixtures ------------------------------------------------------------------

def run(fixture, name):
    return Mechanism(name).run(Fixture.parse(fixture).build())


def test_median2_on_tight_instance():
    out = run("median-tight?eps=1/1000", "median2")
    assert out.solution == (1, 0)
    assert out.trace == {"median": 0}


def test_alpha_stat_case3_end_uses_ranks_42_and_59():
    out = run("sc-hom-lower-case3-end?n=100&eps=1/10000", "alpha-stat")
    assert (out.trace["i_rank"], out.trace["j_rank"]) == (42, 59)
    assert out.solution == (1, 2)


def test_pmm_example():
    out = run("pmm-example?x=1&eps=1/1000", "pmm")
    assert out.solution == (1, 0)
    assert out.trace["priority"] == 2
    assert (out.trace["S1"], out.trace["N1"], out.trace["S2"], out.trace["N2"]) == (2, 3, 3, 3)


def test_naive_median_f1_on_pmm_example():
    assert run("pmm-example?x=1&eps=1/1000", "naive-median-f1").solution == (0, 1)


def test_pmm_equal_fractions_prefer_larger_group():
    bigger_f2 = Instance.build([(0, True, False), (0, False, True), (0, False, True)], [0, 1, 5])
    assert Mechanism("pmm")(bigger_f2) == (1, 0)
    same_size = Instance.build([(0, True, False), (0, False, True)], [0, 1, 5])
    assert Mechanism("pmm")(same_size) == (0, 1)


def test_vote_for_priority_example():
    out = run("vfp-example?eps=1/1000", "vote-for-priority")
    assert out.solution == (1, 0)
    assert out.trace["case"] == 3


def test_naive_left_right_example():
    assert run("vfp-example?eps=1/1000", "naive-left-right").solution == (1, 2)


def test_vote_for_priority_missing_right_neighbour():
    # w1 is the rightmost slot, so both F2 extremes vote left
    inst = Instance.build([(11, True, False), (0, False, True), (1, False, True)], [0, 10, 11])
    out = Mechanism("vote-for-priority").run(inst)
    assert out.trace["R"] is None and out.trace["case"] == 1
    assert out.solution == (2, 0)


def test_vote_for_priority_all_duplicates():
    inst = Instance.build([(0, True, False), (1, False, True)], [3, 3, 3])
    assert Mechanism("vote-for-priority")(inst) == (0, 1)


def test_general_max_branches():
    assert run("mc-hom-lower-i1", "general-max").trace["branch"] == "leftmost-priority"
    assert run("vfp-example", "general-max").trace["branch"] == "vote-for-priority"
    out = run("mc-general-lower-i2", "general-max")
    assert out.trace["branch"] == "only-F1"
    assert out.solution == (0, 1)


def test_leftmost_priority_second_choice():
    # t(r12) is taken by F1, so F2 goes to s(r12)
    inst = Instance.homogeneous([0, 0], [0, 1, -2])
    assert Mechanism("leftmost-priority")(inst) == (0, 1)


@pytest.mark.parametrize("name, inst", [
    ("median2", Instance.build([(0, True, False), (1, True, True)], [0, 1])),
    ("alpha-stat", Instance.build([(0, False, True)], [0, 1])),
    ("pmm", Instance.build([(0, True, False)], [0, 1])),
    ("leftmost-priority", Instance.build([(0, True, False), (1, False, True)], [0, 1])),
    ("vote-for-priority", Instance.build([(0, True, True), (1, False, True)], [0, 1])),
    ("naive-median-f1", Instance.build([(0, False, True)], [0, 1])),
])
def test_domain_errors(name, inst):
    assert not in_domain(name, inst)
    with pytest.raises(DomainError):
        Mechanism(name).run(inst)


# -- differential and structural properties ------------------------------------

@given(homogeneous)
def test_median2_matches_reference(inst):
    assert Mechanism("median2")(inst) == oracle.median2(*oracle.plain(inst))


@given(homogeneous)
def test_alpha_stat_matches_reference(inst):
    assert Mechanism("alpha-stat")(inst) == oracle.alpha_stat(*oracle.plain(inst))


@given(overlap())
def test_leftmost_priority_matches_reference(inst):
    assert Mechanism("leftmost-priority")(inst) == oracle.leftmost_priority(*oracle.plain(inst))


ANY = st.one_of(homogeneous, overlap(), singleton(), general(), instances(unique=False))


@given(ANY, st.sampled_from(MECHANISM_NAMES))
def test_outcomes_are_feasible(inst, name):
    if not in_domain(name, inst):
        return
    c1, c2 = Mechanism(name)(inst)
    assert c1 != c2 and 0 <= c1 < inst.m and 0 <= c2 < inst.m


@given(ANY, st.sampled_from(MECHANISM_NAMES), st.integers(-50, 50),
       st.fractions(min_value=Fraction(1, 9), max_value=9, max_denominator=9))
def test_translation_and_scale_covariance(inst, name, shift, scale):
    if not in_domain(name, inst):
        return
    mech = Mechanism(name)
    base = mech(inst)
    assert mech(inst.map_coordinates(lambda v: v + shift)) == base
    assert mech(inst.map_coordinates(lambda v: v * scale)) == base


@given(homogeneous, st.sampled_from([2, 3, 5]))
def test_alpha_stat_duplication_invariance(inst, k):
    mech = Mechanism("alpha-stat")
    assert mech(duplicate(inst, k)) == mech(inst)


def test_outcome_is_reproducible():
    inst = Fixture.parse("vfp-example").build()
    assert Mechanism("general-max").run(inst) == Mechanism("general-max").run(inst)
    assert Mechanism("general-max")(inst) == Solution(1, 0)
