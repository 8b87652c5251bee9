from __future__ import annotations

import json

import numpy as np
import pytest

import oracles as O
from conftest import G
from qlocal.catalog import alternating_group, build_named, cyclic_group, direct_product, symmetric_group
from qlocal.compat import (CompatError, CompatProblem, DegenerateWitness, IsoTable, NotAHomomorphism,
                           build_witness, graph_isomorphism, necessary_compat_check, problem_from_json,
                           regular_pair_witness, subnormal_series_witness, verify_witness, witness_digraph)
from qlocal.digraphs import perm_isomorphic
from qlocal.group import PermGroup, intersection, is_subgroup, subgroup_equal, trivial_group
from qlocal.perm import Permutation
from qlocal.regular import regular_embedding
from qlocal.selftest import d8_problem, regular_examples, s3_problem
from qlocal.structure import CompositionMultiset, composition_multiset, core


def cm(*names):
    return CompositionMultiset.of(*names)


# -- regular embeddings --------------------------------------------------------------------------

def test_regular_embedding_examples(s3):
    c3 = regular_embedding(cyclic_group(3)).group
    assert c3.degree == 3 and subgroup_equal(c3, G("(0 1 2)", n=3))
    r = regular_embedding(s3)
    assert r.group.degree == 6 and r.group.order() == 6 and r.group.is_transitive()
    # right translation is a homomorphism: t(x) t(y) = t(x y)
    E = r.elements
    for i in range(6):
        for j in range(6):
            assert np.array_equal(r.translation(j)[r.translation(i)], r.translation(r.product(i, j)))
    big = regular_embedding(direct_product([alternating_group(5), alternating_group(6)]))
    assert big.size == 21600 and big.group.degree == 21600
    assert E[0].tolist() == [0, 1, 2]


# -- isomorphism tables ---------------------------------------------------------------------------

def test_phi_must_be_a_homomorphism(s3):
    reg = regular_embedding(s3)
    a3 = G("(0 1 2)", n=3)
    x = Permutation.parse("(0 1 2)", 3).images
    y = Permutation.parse("(0 2 1)", 3).images
    good = IsoTable.from_pairs(reg, a3, a3, [(x, y)])
    assert len(good.table) == 3
    # a bijection V4 -> C4 fixing the identity cannot be multiplicative
    s4 = symmetric_group(4)
    reg4 = regular_embedding(s4)
    v4 = reg4.member_indices(G("(0 1)(2 3)", "(0 2)(1 3)", n=4)).tolist()
    c4 = G("(0 1 2 3)", n=4)
    c4_idx = reg4.member_indices(c4).tolist()
    with pytest.raises(NotAHomomorphism, match="not a homomorphism"):
        IsoTable(reg4, np.array(v4), np.array(c4_idx), dict(zip(v4, c4_idx))).validate()
    with pytest.raises(NotAHomomorphism, match="not a homomorphism"):
        CompatProblem.create(s4, c4, c4, [("(0 1 2 3)", "(0 1 2 3)"), ("(0 2)(1 3)", "(0 1 2 3)")])


def test_problem_validation(s3):
    with pytest.raises(CompatError):
        CompatProblem.create(s3, G("(0 1)", n=3), G("(0 1 2)", n=3), [("(0 1)", "(0 1 2)")])
    with pytest.raises(CompatError):
        CompatProblem.create(s3, G("(0 1)", n=3), G("(0 2)", n=3))


# -- witnesses ---------------------------------------------------------------------------------------

def _check_witness_exactly(w):
    """Subgroup-level check of ``(H_-)^g = H_+ = H ∩ H^g`` on the 2|H| points."""
    p = w.problem
    reg = p.reg
    h2 = w.h2
    a2 = PermGroup.from_arrays([np.concatenate([reg.translation_by(s), reg.translation_by(s) + reg.size])
                                .astype(h2.gen_arrays[0].dtype) for s in p.a.gen_arrays], h2.degree)
    b2 = PermGroup.from_arrays([np.concatenate([reg.translation_by(s), reg.translation_by(s) + reg.size])
                                .astype(h2.gen_arrays[0].dtype) for s in p.b.gen_arrays], h2.degree)
    g = w.g.images.astype(np.int64)
    ginv = np.argsort(g)
    conj = lambda grp: PermGroup.from_arrays([g[x.astype(np.int64)[ginv]] for x in grp.gen_arrays],  # noqa: E731
                                             h2.degree)
    assert subgroup_equal(conj(a2), b2)
    assert subgroup_equal(intersection(h2, conj(h2)), b2)


def test_s3_witness():
    w = build_witness(s3_problem(), seed=0)
    assert w.ok and w.degree == 12
    _check_witness_exactly(w)
    assert w.big_group.degree == 12
    wd = witness_digraph(w)
    assert wd.ok
    for rep in (wd.out_report, wd.in_report):
        assert rep.degree == 3 and rep.order() == 6
    assert necessary_compat_check(w.l_minus.image, w.l_plus.image).passed


def test_d8_witness():
    w = build_witness(d8_problem(), seed=0)
    assert w.ok and w.degree == 16
    _check_witness_exactly(w)
    assert is_subgroup(w.problem.a, w.l_minus.kernel)
    assert w.l_plus.is_faithful()
    wd = witness_digraph(w)
    assert wd.ok and wd.out_report.degree == wd.in_report.degree == 4
    assert wd.out_report.orbit_count() == wd.in_report.orbit_count()
    assert necessary_compat_check(w.l_minus.image, w.l_plus.image).passed


def test_witness_for_a_equal_b_equal_h(s3):
    p = CompatProblem.create(s3, s3, s3)
    w = build_witness(p, seed=0)
    assert w.ok
    assert w.big_group.order() == 6
    with pytest.raises(DegenerateWitness):
        witness_digraph(w)


def test_verify_witness_rejects_identity_for_s3():
    p = s3_problem()
    checks = verify_witness(p, Permutation.identity(12))
    assert not checks["conjugatesAintoB"] and not checks["intersectionIsB"]


def test_witness_seed_reproducible():
    a = build_witness(s3_problem(), seed=3)
    b = build_witness(s3_problem(), seed=3)
    assert a.g == b.g


# -- regular constructions ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def regular_results():
    return {name: regular_pair_witness(*args, seed=0, with_witness=False)
            for name, args in regular_examples().items()}


def test_a5xs5_regular_pair(regular_results):
    r = regular_results["A5xS5"]
    assert all(r.checks.values())
    assert r.l_minus.degree == r.l_plus.degree == 120
    assert perm_isomorphic(r.l_minus.image, build_named("S5:regular")).verdict == "yes"
    assert perm_isomorphic(r.l_plus.image, build_named("A5xC2:regular")).verdict == "yes"


def test_sl25xc2_regular_pair(regular_results):
    r = regular_results["SL(2,5)xC2"]
    assert all(r.checks.values())
    assert perm_isomorphic(r.l_minus.image, build_named("A5xC2:regular")).verdict == "yes"
    assert perm_isomorphic(r.l_plus.image, build_named("SL(2,5):regular")).verdict == "yes"
    for name in ("A5xS5", "SL(2,5)xC2"):
        r = regular_results[name]
        assert subgroup_equal(core(r.problem.h, r.problem.a), r.problem.a)


def test_abelian_regular_pair():
    h = build_named("C4xC2")
    a = G("(0 1 2 3)", n=h.degree)
    r = regular_pair_witness(h, a, a, seed=0)
    assert r.witness is not None and r.witness.ok
    assert perm_isomorphic(r.l_minus.image, r.l_plus.image).verdict == "yes"
    with pytest.raises(CompatError):
        regular_pair_witness(symmetric_group(3), G("(0 1)", n=3), G("(0 1)", n=3))


# -- subnormal series ------------------------------------------------------------------------------

def test_subnormal_s3(s3):
    r = subnormal_series_witness(s3, [trivial_group(3), G("(0 1 2)", n=3), s3])
    assert all(r.checks.values())
    assert r.problem.h.order() == 18
    assert r.quotient_minus == composition_multiset(s3)
    assert r.quotient_plus == cm("C3", "C2") == r.predicted


def test_subnormal_c4():
    c4 = G("(0 1 2 3)", n=4)
    r = subnormal_series_witness(c4, [trivial_group(4), G("(0 2)(1 3)", n=4), c4])
    assert all(r.checks.values())
    assert r.quotient_plus == cm("C2", "C2")
    # H/H_+ is elementary abelian: every element squares to the identity
    h, b = r.problem.h, r.problem.b
    for x in O.elements_of(h):
        assert b.contains_array(np.array(O.mul(x, x)))


def test_subnormal_trivial_series(s3):
    r = subnormal_series_witness(s3, [trivial_group(3), s3])
    assert all(r.checks.values())
    assert r.problem.a.order() == r.problem.b.order() == 1
    assert subgroup_equal(r.problem.h, s3)


def test_subnormal_rejects_non_normal(s3):
    s4 = symmetric_group(4)
    with pytest.raises(CompatError):
        subnormal_series_witness(s4, [trivial_group(4), G("(0 1)", n=4), s4])
    with pytest.raises(CompatError):
        subnormal_series_witness(s3, [G("(0 1 2)", n=3), s3])


# -- necessary conditions --------------------------------------------------------------------------

def test_necessary_sl25_vs_s5():
    rep = necessary_compat_check(build_named("SL(2,5):regular"), build_named("S5:regular"))
    assert rep.certified_incompatible and rep.failures() == ["commonSimpleQuotient"]


def test_necessary_a5xc2_vs_sl25():
    rep = necessary_compat_check(build_named("A5xC2:regular"), build_named("SL(2,5):regular"))
    assert rep.passed and not rep.certified_incompatible
    assert rep.common_simple_quotient.evidence["common"] == ["A5"]


@pytest.mark.parametrize("name", ["S4", "A5", "D4", "C6", "PSL(2,7)"])
def test_necessary_reflexive(name):
    g = build_named(name)
    assert necessary_compat_check(g, g).passed


def test_necessary_degree_and_primes():
    rep = necessary_compat_check(symmetric_group(3), cyclic_group(4))
    assert not rep.degree_equal.ok and not rep.primes_equal.ok and rep.certified_incompatible
    json.dumps(rep.to_json())


# -- graph isomorphism and JSON problems ----------------------------------------------------------

def test_graph_isomorphism():
    c3a, c3b = G("(0 1 2)", n=3), G("(0 2 1)", n=3)
    assert graph_isomorphism(c3a, c3b, [("(0 1 2)", "(0 2 1)")])
    s3 = symmetric_group(3)
    # swapping the images of a 3-cycle and a transposition is not a homomorphism
    assert not graph_isomorphism(s3, s3, [("(0 1 2)", "(0 1)"), ("(0 1)", "(0 1 2)")])
    assert graph_isomorphism(s3, s3, [("(0 1 2)", "(0 2 1)"), ("(0 1)", "(1 2)")])
    assert not graph_isomorphism(s3, G("(0 1 2 3 4 5)", n=6), [("(0 1 2)", "(0 2 4)(1 3 5)")])
    # generators that miss part of the group
    assert not graph_isomorphism(s3, s3, [("(0 1 2)", "(0 1 2)")])


def test_problem_from_json_round_trip():
    p = s3_problem()
    q = problem_from_json(json.dumps(p.to_json()))
    assert subgroup_equal(q.a, p.a) and subgroup_equal(q.b, p.b)
    table_problem = {"group": {"table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]},
                     "subgroupA": [1], "subgroupB": [2], "phi": [[1, 2]]}
    q = problem_from_json(table_problem)
    assert q.h.order() == 3 and q.a.order() == 3
    with pytest.raises(CompatError, match="subgroupB"):
        problem_from_json({"group": {"degree": 3, "generators": ["(0 1 2)"]}, "subgroupA": []})


def test_example_files_parse():
    from pathlib import Path
    root = Path(__file__).resolve().parent.parent / "problems"
    for name, order in (("s3.json", 6), ("d8.json", 8)):
        p = problem_from_json((root / name).read_text())
        assert p.h.order() == order
