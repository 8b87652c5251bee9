from __future__ import annotations

import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from conftest import G
from qlocal.catalog import (affine_point_stabilizer, agl_quotient_subgroup, alternating_group, build_named,
                            dihedral_group, named_group, symmetric_group)
from qlocal.group import PermGroup
from qlocal.perm import Permutation
from qlocal.qp import (QP_TYPES, QPError, classify_qp, compatible_pair_types, compfactors_bound_probe,
                       degree_feasible, evidence_degree_consistent, general_linear_group, is_irreducible,
                       is_quasiprimitive, out_bound_check, pair_type_allowed, quotient_pair_types,
                       socle_in_stabilizer_check, socle_stabilizer_multisets)
from qlocal.structure import CompositionMultiset


# -- recognition -----------------------------------------------------------------------------------

def test_is_quasiprimitive_examples(a5):
    assert is_quasiprimitive(a5)
    assert is_quasiprimitive(symmetric_group(4))
    v = is_quasiprimitive(dihedral_group(6))
    assert not v and v.complete and not v.intransitive_normal.is_transitive()
    with pytest.raises(QPError):
        is_quasiprimitive(G("(0 1)", n=3))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_quasiprimitive_matches_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    gens = [list(range(1, n)) + [0], rng.sample(range(n), n)]
    g = PermGroup([Permutation(x) for x in gens], n)
    elems = O.closure(gens, n)
    # every nontrivial normal subgroup contains the normal closure of one of its elements
    reps, seen = [], set()
    for x in sorted(elems):
        if x != O.ident(n) and x not in seen:
            reps.append(x)
            seen |= {O.conj(x, s) for s in elems}
    want = all(len(O.orbits(list(O.normal_closure([x], elems, n)), n)) == 1 for x in reps)
    assert bool(is_quasiprimitive(g)) == want


# -- classification -----------------------------------------------------------------------------

def test_classify_small_examples(a5):
    tag, ev = classify_qp(named_group("AGL(3,2)"))
    assert tag == "HA" and ev.socle_regular and ev.socle.order() == 8 and ev.socle.is_abelian()
    assert classify_qp(a5)[0] == "AS"
    assert classify_qp(named_group("PSL(2,7)"))[0] == "AS"
    assert classify_qp(symmetric_group(4))[0] == "HA"
    with pytest.raises(QPError):
        classify_qp(dihedral_group(6))


@pytest.mark.parametrize("name,want", [("HolSym(A5,1)", "HS"), ("A5wrC2:diagonal", "SD"),
                                       ("PSL(2,7)wrC2:product", "PA"), ("HolSym(A5,1):plus", "AS")])
def test_classify_corpus(corpus, name, want):
    g = corpus(name)
    tag, ev = classify_qp(g)
    assert tag == want and not ev.provisional
    assert evidence_degree_consistent(tag, ev, g.degree)
    assert degree_feasible(tag, g.degree).feasible


def test_diagonal_projections(corpus):
    _, ev = classify_qp(corpus("A5wrC2:diagonal"))
    assert ev.stab_order == 60 and ev.stab_projections == [60, 60]


# -- degree rules -----------------------------------------------------------------------------------

def test_degree_feasible_examples():
    f = degree_feasible("HS", 60)
    assert f.feasible and {"T": "A5", "k": 2} in f.params
    assert not degree_feasible("HS", 100).feasible
    f = degree_feasible("TW", 3600)
    assert f.feasible and {"T": "A5", "k": 2} in f.params
    assert degree_feasible("HA", 8).params == [{"p": 2, "k": 3}]
    assert not degree_feasible("HA", 12).feasible
    assert degree_feasible("AS", 7).feasible
    assert degree_feasible("HC", 3600).params == [{"T": "A5", "k": 4}]
    assert {"T": "A5", "k": 2} in degree_feasible("SD", 60).params
    assert {"m": 1, "x": 8, "k": 2} in degree_feasible("PA", 64).params
    with pytest.raises(QPError):
        degree_feasible("XX", 5)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=5000))
def test_ha_feasible_iff_prime_power(n):
    pp = [(p, k) for p in range(2, n + 1) for k in range(1, 13)
          if p ** k == n and all(p % d for d in range(2, p))]
    assert degree_feasible("HA", n).feasible == bool(pp)


# -- type pairs ----------------------------------------------------------------------------------

def test_pair_type_allowed_examples():
    assert pair_type_allowed("HS", "AS", "compatible-quotient")
    assert not pair_type_allowed("HA", "PA", "compatible-quotient")
    assert pair_type_allowed("HA", "PA", "quotient-only")
    assert not pair_type_allowed("TW", "HA", "quotient-only")
    # the compatible list is contained in the quotient list
    for a, b in product(QP_TYPES, QP_TYPES):
        if pair_type_allowed(a, b, "compatible-quotient"):
            assert pair_type_allowed(a, b, "quotient-only")
    with pytest.raises(QPError):
        pair_type_allowed("HA", "AS", "other")


def test_agl_quotient_pair():
    agl = named_group("AGL(3,2)")
    res = quotient_pair_types(agl, agl_quotient_subgroup(agl))
    assert (res.g_type, res.h_type, res.kernel_order, res.allowed) == ("HA", "AS", 8, True)
    # a core-free subgroup of the right index is out of scope
    assert quotient_pair_types(agl, affine_point_stabilizer(agl)) is None


def test_compatible_pair_types_orders(a5):
    r = compatible_pair_types(a5, a5)
    assert not r.applicable and "equal orders" in r.reason
    r = compatible_pair_types(dihedral_group(6), dihedral_group(6))
    assert not r.applicable and r.reason == "not quasiprimitive"
    r = compatible_pair_types(symmetric_group(5), a5)
    assert r.applicable and (r.minus_type, r.plus_type) == ("AS", "AS") and not r.allowed


# -- Out(T) and stabilizers --------------------------------------------------------------------------

def test_out_bound_examples():
    assert out_bound_check("PSL(2,7)", 8)
    assert out_bound_check("A6", 6)
    assert not out_bound_check("A5", 1)
    assert not out_bound_check("A6", 4)
    with pytest.raises(QPError):
        out_bound_check("C5", 10)


def test_socle_in_stabilizer_examples(a5):
    s = socle_stabilizer_multisets(a5)
    assert s.socle == CompositionMultiset.of("A5")
    assert s.stabilizer == CompositionMultiset.of("C2", "C2", "C3") and s.holds
    s = socle_stabilizer_multisets(named_group("PSL(2,7)"))
    assert s.stabilizer == CompositionMultiset.of("C3", "C7") and s.holds
    assert socle_in_stabilizer_check(build_named("PSL(2,7)wrC2:product"))
    with pytest.raises(QPError):
        socle_in_stabilizer_check(named_group("AGL(3,2)"))


# -- linear groups -----------------------------------------------------------------------------

def _vector(i: int, d: int, p: int) -> tuple[int, ...]:
    x = i + 1
    return tuple((x // p ** j) % p for j in range(d))


def _irreducible_oracle(elems, d: int, p: int) -> bool:
    """Only for d = 2: no line fixed by every element."""
    lines = {frozenset(tuple(c * v % p for v in _vector(i, d, p)) for c in range(1, p))
             for i in range(p ** d - 1)}
    index = {_vector(i, d, p): i for i in range(p ** d - 1)}
    for line in lines:
        pts = {index[v] for v in line}
        if all({x[q] for q in pts} == pts for x in elems):
            return False
    return True


@pytest.mark.parametrize("p", [2, 3])
def test_compfactor_probe_matches_oracle(p):
    gl = general_linear_group(2, p)
    elems = O.elements_of(gl)
    assert len(elems) == gl.order() == (p * p - 1) * (p * p - p)
    best = 0
    irreducible = set()
    for sub in O.subgroups_two_generated(elems, gl.degree):
        if len(sub) == 1 or not _irreducible_oracle(sub, 2, p):
            continue
        irreducible.add(sub)
        best = max(best, O.composition_factors(sub, gl.degree).get(f"C{p}", 0))
    probe = compfactors_bound_probe(2, p)
    assert probe.max_count == best == 1 and probe.holds
    # classes are counted up to conjugacy, so at most the number of subgroups
    assert 1 <= probe.irreducible_classes <= len(irreducible)


def test_gl2_2_irreducible_subgroups():
    probe = compfactors_bound_probe(2, 2)
    assert probe.counts == {3: 0, 6: 1}


def test_gl_orders_and_irreducibility():
    assert general_linear_group(3, 2).order() == 168
    assert general_linear_group(2, 5).order() == 480
    gl = general_linear_group(2, 3)
    assert is_irreducible(gl, 2, 3)
    # the upper unitriangular group fixes a line
    unitri = PermGroup.from_arrays([gl.gen_arrays[0]], gl.degree)
    assert not is_irreducible(unitri, 2, 3)
    with pytest.raises(QPError):
        general_linear_group(2, 4)


def test_compfactor_bound_gl32():
    probe = compfactors_bound_probe(3, 2)
    assert probe.holds and probe.max_count <= 2


def test_alternating_quasiprimitive_is_as():
    assert classify_qp(alternating_group(6))[0] == "AS"
