from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from facmech import ConfigurationError, Fixture, Generator, Instance, build_fixture, duplicate, generate
from facmech.instances import FIXTURE_NAMES, GENERATOR_NAMES, ceil_alpha_n, sc_hom_lower_sequence

E = Fraction(1, 1000)


def layout(inst):
    return sorted((a.x, a.p1, a.p2) for a in inst.agents), list(inst.candidates)


def test_mc_general_lower_i2():
    agents, cands = layout(build_fixture("mc-general-lower-i2?eps=1/1000"))
    assert cands == [-1, 1]
    assert agents == [(-2, True, False), (E, True, False)]


def test_pmm_example_x1():
    inst = build_fixture("pmm-example?x=1&eps=1/1000")
    assert inst.candidates == (0, 2)
    c = Counter((a.x, a.p1, a.p2) for a in inst.agents)
    assert c == {(1 - E, True, False): 2, (2, True, False): 1, (0, False, True): 3}


def test_vfp_example():
    agents, cands = layout(build_fixture("vfp-example?eps=1/1000"))
    assert cands == [0, 2, 6]
    assert agents == [(1, False, True), (1 + E, True, False), (3 + E, False, True)]


def test_sc_hom_lower_counts():
    inst = build_fixture("sc-hom-lower-i1?n=100&eps=1/10000")
    c = Counter(a.x for a in inst.agents)
    assert c == {0: 42, 2: 58}
    assert inst.candidates == (-Fraction(1, 10000), Fraction(1, 10000), 2 - Fraction(1, 10000), 2 + Fraction(1, 10000))
    assert build_fixture("sc-hom-lower-i1?n=10&dup=1").candidates == (0, 0, 2, 2)


def test_ceil_alpha_n():
    assert [ceil_alpha_n(n) for n in (1, 2, 3, 7, 100)] == [1, 1, 2, 3, 42]


@pytest.mark.parametrize("case, end", [(1, "case1-end"), (2, "case2-end"), (3, "case3-end")])
def test_moving_sequence_ends_at_end_fixture(case, end):
    seq = sc_hom_lower_sequence(case, 12, Fraction(1, 100))
    target = build_fixture(f"sc-hom-lower-{end}?n=12&eps=1/100")
    assert seq[0] == build_fixture("sc-hom-lower-i1?n=12&eps=1/100")
    assert layout(seq[-1]) == layout(target)
    assert all(sum(a.x != b.x for a, b in zip(p.agents, q.agents)) == 1 for p, q in zip(seq, seq[1:]))


@pytest.mark.parametrize("name", FIXTURE_NAMES)
@pytest.mark.parametrize("eps", [Fraction(1, 10), Fraction(1, 10000), Fraction(1, 9)])
def test_every_fixture_builds(name, eps):
    fx = Fixture(name, eps=eps, n=7, x=3)
    inst = fx.build()
    assert isinstance(inst, Instance)
    assert Fixture.parse(fx.ident()) == fx
    for s in fx.forced():
        assert s.c1 != s.c2 and max(s) < inst.m


@pytest.mark.parametrize("text", [
    "fixture:median-tight?eps=1/8", "median-tight?eps=0", "median-tight?eps=-1/10", "median-tight?eps=abc",
    "median-tight?n=3", "nope", "sc-hom-lower-i1?n=0", "pmm-example?x=1.5",
])
def test_fixture_rejects(text):
    with pytest.raises(ConfigurationError):
        Fixture.parse(text)


def test_generator_ids():
    for name in GENERATOR_NAMES:
        g = Generator.parse(name)
        assert Generator.parse(g.ident()) == g
    g = Generator.parse("gen:uniform-homogeneous?n=4&m=3&copies=2")
    assert (g.max_agents, g.max_candidates, g.copies) == (4, 3, 2)
    assert g.ident() == "gen:uniform-homogeneous?n=4&m=3&copies=2"
    for bad in ("gen:zipf", "uniform-general?n=0", "uniform-general?q=2", "singleton?n=1", "uniform-general?m=1"):
        with pytest.raises(ConfigurationError):
            Generator.parse(bad)


def test_uniform_homogeneous_seed_7():
    g = Generator(max_agents=4, max_candidates=3)
    inst = generate(g, 7)
    assert 1 <= inst.n <= 4 and 2 <= inst.m <= 3
    assert inst.is_homogeneous


@given(st.integers(0, 2 ** 64 - 1), st.integers(0, 10 ** 6), st.sampled_from(GENERATOR_NAMES))
def test_generator_determinism_and_guarantees(seed, trial, name):
    g = Generator.parse(name)
    inst = generate(g, seed, trial)
    assert inst == generate(g, seed, trial)
    assert len(set(inst.candidates)) == inst.m
    for c in inst.candidates + inst.positions:
        assert Fraction(c).denominator <= 16
    tags = g.guarantees()
    assert ("homogeneous" not in tags) or inst.is_homogeneous
    assert ("singleton" not in tags) or inst.is_singleton
    assert ("overlap" not in tags) or inst.both
    assert ("both-groups" not in tags) or (inst.group1 and inst.group2)


@given(st.integers(0, 1000), st.sampled_from([2, 3, 5]))
def test_copies_multiplicity(seed, k):
    inst = generate(Generator(copies=k), seed)
    assert all(count % k == 0 for count in Counter(inst.positions).values())


def test_duplicate():
    inst = Instance.homogeneous([1, 2], [0, 1])
    assert duplicate(inst, 3).positions == (1, 1, 1, 2, 2, 2)
    with pytest.raises(ConfigurationError):
        duplicate(inst, 0)
