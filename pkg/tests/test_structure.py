from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from conftest import G
from qlocal.actions import coset_action
from qlocal.catalog import (alternating_group, build_named, cyclic_group, dihedral_group, direct_product,
                            named_group, symmetric_group)
from qlocal.group import PermGroup, is_normal, is_subgroup, subgroup_equal, trivial_group
from qlocal.perm import Permutation
from qlocal.simple import lookup, section_set
from qlocal.structure import (Budget, CompositionMultiset, NotSimple, StructureError, composition_multiset,
                              core, derived_series, identify_simple, is_soluble, minimal_normal_subgroups,
                              normal_subgroups, quotient_group, quotient_multiset_identity, simple_quotients,
                              simple_sections, socle)


def cm(*names):
    return CompositionMultiset.of(*names)


@pytest.fixture(scope="module")
def a5xa6():
    return direct_product([alternating_group(5), alternating_group(6)])


def _a5_in(n: int, offset: int) -> PermGroup:
    gens = []
    for text in ("(0 1 2)", "(0 1 2 3 4)"):
        p = Permutation.parse(text, 5).images
        gens.append(np.concatenate([np.arange(offset), p + offset, np.arange(offset + 5, n)]))
    return PermGroup.from_arrays(gens, n)


def a5_square_product_action() -> PermGroup:
    """A5 x A5 on the 25 pairs (i, j), each factor moving one coordinate."""
    a5 = alternating_group(5)
    gens = []
    for s in a5.gen_arrays:
        gens.append(np.array([5 * s[i] + j for i in range(5) for j in range(5)]))
        gens.append(np.array([5 * i + s[j] for i in range(5) for j in range(5)]))
    return PermGroup.from_arrays(gens, 25)


# -- cores ---------------------------------------------------------------------------------------

def test_core_examples(a5xa6):
    minus, plus = _a5_in(11, 0), _a5_in(11, 5)
    assert subgroup_equal(core(a5xa6, minus), minus)
    assert core(a5xa6, plus).order() == 1
    assert subgroup_equal(core(a5xa6, a5xa6), a5xa6)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_core_matches_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 6)
    gens = [rng.sample(range(n), n) for _ in range(2)]
    g = PermGroup([Permutation(x) for x in gens], n)
    ge = O.closure(gens, n)
    h_gen = sorted(ge)[rng.randrange(len(ge))]
    h = PermGroup([Permutation(h_gen)], n)
    c = core(g, h)
    assert O.elements_of(c) == O.core(O.closure([h_gen], n), ge)
    img, _ = coset_action(g, h)
    assert subgroup_equal(img.kernel, c)


# -- minimal normal subgroups and socles ----------------------------------------------------------

def test_minimal_normal_examples(s3, a5):
    r = minimal_normal_subgroups(s3)
    assert r.complete and [w.order() for w in r] == [3]
    r = minimal_normal_subgroups(a5_square_product_action())
    assert r.complete and sorted(w.order() for w in r) == [60, 60]
    r = minimal_normal_subgroups(a5)
    assert r.complete and [w.order() for w in r] == [60]


def test_minimal_normal_witnesses_are_normal_and_minimal():
    for g in (symmetric_group(4), named_group("SL(2,3)"), dihedral_group(6), build_named("C2xS3"),
              dihedral_group(4)):
        elems = O.elements_of(g)
        normals = O.normal_subgroups(elems, g.degree)
        minimal = {x for x in normals if len(x) > 1 and not any(1 < len(y) < len(x) and y < x for y in normals)}
        result = minimal_normal_subgroups(g)
        assert result.complete
        assert {O.elements_of(w.subgroup) for w in result} == minimal
        for w in result:
            assert is_normal(w.subgroup, g)


def test_socle_examples(a5):
    s4 = symmetric_group(4)
    soc, complete = socle(s4)
    assert complete and subgroup_equal(soc, G("(0 1)(2 3)", "(0 2)(1 3)", n=4))
    assert subgroup_equal(socle(a5)[0], a5)
    agl = named_group("AGL(3,2)")
    soc, complete = socle(agl)
    assert complete and soc.order() == 8 and soc.is_abelian() and soc.is_transitive()
    assert all(np.all(x[x] == np.arange(8)) for x in soc.elements_array())


# -- composition factors --------------------------------------------------------------------------

def test_composition_examples(a5xa6):
    assert composition_multiset(symmetric_group(4)) == cm("C2", "C2", "C2", "C3")
    assert composition_multiset(a5xa6) == cm("A5", "A6")
    assert len(composition_multiset(trivial_group(4))) == 0


SMALL_GROUPS = {
    "S4": lambda: symmetric_group(4),
    "SL(2,3)": lambda: named_group("SL(2,3)"),
    "D6": lambda: dihedral_group(6),
    "C2xS3": lambda: build_named("C2xS3"),
    "D8": lambda: dihedral_group(4),
    "C4xC2": lambda: build_named("C4xC2"),
    "S5": lambda: symmetric_group(5),
    "PSL(2,7)": lambda: named_group("PSL(2,7)"),
}


@pytest.mark.parametrize("name", sorted(SMALL_GROUPS))
def test_composition_matches_oracle(name):
    g = SMALL_GROUPS[name]()
    want = O.composition_factors(O.elements_of(g), g.degree)
    assert composition_multiset(g).to_dict() == dict(sorted(want.items()))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_composition_order_product_and_seed_independence(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 8)
    gens = [Permutation(rng.sample(range(n), n)) for _ in range(rng.randint(1, 3))]
    g = PermGroup(gens, n)
    a = composition_multiset(g, Budget(seed=seed))
    b = composition_multiset(PermGroup(list(reversed(gens)), n), Budget(seed=seed + 1))
    assert a.order() == g.order()
    assert a == b


def test_identify_simple():
    assert identify_simple(alternating_group(5)) == lookup("A5")
    assert identify_simple(named_group("GL(3,2)")) == lookup("PSL(2,7)")
    assert identify_simple(cyclic_group(5)) == lookup("C5")
    # equal orders told apart by element orders
    assert identify_simple(alternating_group(8)).name == "A8"
    assert identify_simple(named_group("PSL(3,4)")).name == "PSL(3,4)"
    with pytest.raises(NotSimple):
        identify_simple(symmetric_group(4))


# -- sections, solubility, quotients -------------------------------------------------------------

def test_a5_section_set_matches_subgroup_oracle(a5):
    elems = O.elements_of(a5)
    found = set()
    for sub in O.subgroups_two_generated(elems, 5):
        found |= set(O.composition_factors(sub, 5))
    ids, complete = section_set(lookup("A5"))
    assert complete and {i.name for i in ids} == found == {"C2", "C3", "C5", "A5"}


def test_section_examples():
    want = ["C2", "C3", "C5", "A5"]
    sl = simple_sections(build_named("SL(2,5):regular"))
    s5 = simple_sections(build_named("S5:regular"))
    assert sl.complete and s5.complete and sl.names() == s5.names() == want
    assert simple_sections(cyclic_group(7)).names() == ["C7"]


def test_solubility(a5):
    assert is_soluble(symmetric_group(4))
    assert not is_soluble(a5)
    assert is_soluble(trivial_group(3))


def test_simple_quotient_examples(a5):
    sl = named_group("SL(2,5)")
    assert simple_quotients(sl).names() == ["A5"]
    assert simple_quotients(symmetric_group(5)).names() == ["C2"]
    assert simple_quotients(a5).names() == ["A5"]
    # equal sections, different quotients
    q1 = simple_quotients(build_named("SL(2,5):regular"))
    q2 = simple_quotients(build_named("S5:regular"))
    assert q1.complete and q2.complete and q1.ids != q2.ids


def test_simple_quotients_match_oracle():
    for name in ("S4", "SL(2,3)", "D6", "C2xS3", "D8"):
        g = SMALL_GROUPS[name]()
        elems = O.elements_of(g)
        normals = [x for x in O.normal_subgroups(elems, g.degree) if len(x) < len(elems)]
        maximal = [x for x in normals if not any(len(y) > len(x) and x < y for y in normals)]
        want = {O._simple_name(len(elems) // len(x)) for x in maximal}
        assert set(simple_quotients(g).names()) == want, name


def test_quotient_multiset_identity(a5xa6):
    s4 = symmetric_group(4)
    cn, cq, ok = quotient_multiset_identity(s4, G("(0 1)(2 3)", "(0 2)(1 3)", n=4))
    assert (cn, cq, ok) == (cm("C2", "C2"), cm("C2", "C3"), True)
    cn, cq, ok = quotient_multiset_identity(s4, trivial_group(4))
    assert len(cn) == 0 and cq == composition_multiset(s4) and ok
    cn, cq, ok = quotient_multiset_identity(a5xa6, _a5_in(11, 0))
    assert (cn, cq, ok) == (cm("A5"), cm("A6"), True)
    with pytest.raises(StructureError):
        quotient_multiset_identity(s4, G("(0 1)", n=4))


@pytest.mark.parametrize("name", ["S4", "SL(2,3)", "D8", "C2xS3", "S5"])
def test_multiset_calculus_over_all_normal_subgroups(name):
    g = SMALL_GROUPS[name]()
    lattice, complete = normal_subgroups(g)
    assert complete
    assert len(lattice) == len(O.normal_subgroups(O.elements_of(g), g.degree))
    for n in lattice:
        assert quotient_multiset_identity(g, n)[2]


def test_sections_appear_in_series_factors():
    """Every simple section of a group is a section of a factor of a subnormal series (50 seeded groups)."""
    rng = random.Random(2024)
    for _ in range(50):
        n = rng.randint(3, 7)
        g = PermGroup([Permutation(rng.sample(range(n), n)) for _ in range(2)], n)
        series = derived_series(g)
        from_factors = set()
        for hi, lo in zip(series, series[1:]):
            img = quotient_group(hi, lo)
            from_factors |= simple_sections(img.image).ids
        if series[-1].order() > 1:
            from_factors |= simple_sections(series[-1]).ids
        assert simple_sections(g).ids <= from_factors


def test_normal_witnesses_invariant_under_generators():
    g = build_named("HolSym(A5,1)")
    for w in minimal_normal_subgroups(g):
        for s in g.gen_arrays:
            inv = np.argsort(s)
            for x in w.subgroup.gen_arrays:
                assert w.subgroup.contains_array(s[x[inv]])
        assert is_subgroup(w.subgroup, g)
