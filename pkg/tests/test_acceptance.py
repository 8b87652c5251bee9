"""The eleven acceptance criteria, each with its own assertions and time limit.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

from __future__ import annotations

import time
from contextlib import contextmanager

import numpy as np

from conftest import ACCEPTANCE, G
from qlocal.actions import coset_action
from qlocal.arith import is_prime, l1_check_a, l1_check_b, vp_factorial
from qlocal.catalog import (alternating_group, build_named, corpus_entry, corpus_names, direct_product,
                            symmetric_group)
from qlocal.compat import (build_witness, necessary_compat_check, regular_pair_witness, subnormal_series_witness,
                           witness_digraph)
from qlocal.digraphs import local_action
from qlocal.group import PermGroup, intersection, subgroup_equal, trivial_group
from qlocal.perm import Permutation
from qlocal.qp import classify_qp, compfactors_bound_probe, out_bound_check, socle_in_stabilizer_check
from qlocal.selftest import (corpus_group, criterion_7, criterion_8, d8_problem, digraph_corpus,
                             regular_examples, s3_problem)
from qlocal.structure import CompositionMultiset, composition_multiset, core, simple_sections

QUOTIENT_PAIRS = {("HS", "AS"), ("HC", "TW"), ("HA", "AS"), ("HA", "PA")}
COMPATIBLE_PAIRS = {("HS", "AS"), ("HC", "TW")}


def cm(*names):
    return CompositionMultiset.of(*names)


@contextmanager
def criterion(number: int, title: str, limit: float | None):
    """Record PASS only when the body raises nothing and finishes within ``limit`` seconds."""
    t = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - t
        assert limit is None or elapsed < limit, f"took {elapsed:.1f} s, limit {limit} s"
        ok = True
    finally:
        elapsed = time.perf_counter() - t
        ACCEPTANCE[number] = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({elapsed:.1f} s)"


def _a5_block(offset: int, n: int) -> PermGroup:
    gens = []
    for text in ("(0 1 2)", "(0 1 2 3 4)"):
        p = Permutation.parse(text, 5).images
        gens.append(np.concatenate([np.arange(offset), p + offset, np.arange(offset + 5, n)]))
    return PermGroup.from_arrays(gens, n)


def _exact_witness_checks(w) -> None:
    """``(H_-)^g = H_+ = H ∩ H^g`` by subgroup equality on the doubled points."""
    reg, h2 = w.problem.reg, w.h2
    dt = h2.gen_arrays[0].dtype

    def doubled(sub):
        return PermGroup.from_arrays([np.concatenate([reg.translation_by(s), reg.translation_by(s) + reg.size])
                                      .astype(dt) for s in sub.gen_arrays], h2.degree)

    g = w.g.images.astype(np.int64)
    ginv = np.argsort(g)

    def conj(grp):
        return PermGroup.from_arrays([g[x.astype(np.int64)[ginv]].astype(dt) for x in grp.gen_arrays], h2.degree)

    minus, plus = doubled(w.problem.a), doubled(w.problem.b)
    assert subgroup_equal(conj(minus), plus)
    assert subgroup_equal(intersection(h2, conj(h2)), plus)


def test_criterion_01_alt5_alt6_cores():
    with criterion(1, "cores and coset images for Alt(5) x Alt(6)", 30):
        h = direct_product([alternating_group(5), alternating_group(6)])
        minus = _a5_block(0, 11)
        plus = _a5_block(5, 11)  # Alt(5) on five of the six Alt(6) points
        assert core(h, minus).order() == 60
        assert core(h, plus).order() == 1
        img_m, _ = coset_action(h, minus)
        img_p, _ = coset_action(h, plus)
        assert composition_multiset(img_m.image) == cm("A6")
        assert img_p.image.order() == 21_600
        assert img_m.degree == img_p.degree == 360


def test_criterion_02_regular_pairs():
    with criterion(2, "regular pairs and a certified incompatible pair", 10):
        for name, (h, a, b, phi) in regular_examples().items():
            r = regular_pair_witness(h, a, b, phi, seed=0)
            assert all(r.checks.values()), name
            assert r.l_minus.image.order() == r.l_plus.image.order() == 120
            assert composition_multiset(r.l_minus.image) == cm("A5", "C2")
            assert composition_multiset(r.l_plus.image) == cm("A5", "C2")
        rep = necessary_compat_check(build_named("SL(2,5):regular"), build_named("S5:regular"))
        csq = rep.common_simple_quotient
        assert rep.certified_incompatible and csq.complete and csq.evidence["common"] == []


def test_criterion_03_witness_end_to_end():
    with criterion(3, "witness digraphs for S3 and D8", 20):
        for make in (s3_problem, d8_problem):
            t = time.perf_counter()
            w = build_witness(make(), seed=0)
            assert w.ok
            _exact_witness_checks(w)
            wd = witness_digraph(w)
            assert wd.out_certificate.verdict == wd.in_certificate.verdict == "yes"
            assert wd.out_certificate.verify(wd.out_report.induced_group, w.l_plus.image)
            assert wd.in_certificate.verify(wd.in_report.induced_group, w.l_minus.image)
            assert time.perf_counter() - t < 10, make.__name__


def test_criterion_04_local_symmetry():
    with criterion(4, "in/out local symmetry on witness and orbital digraphs", 60):
        corpus = digraph_corpus(0)
        assert len(corpus) >= 20
        for name, gamma in corpus:
            outd, ind = gamma.out_degrees(), gamma.in_degrees()
            assert (outd == outd[0]).all() and (ind == outd[0]).all(), name
            lo, li = local_action(gamma, 0, "out"), local_action(gamma, 0, "in")
            assert lo.degree == li.degree > 0, name
            assert len(lo.induced_group.orbits()) == len(li.induced_group.orbits()), name
            so, si = simple_sections(lo.induced_group), simple_sections(li.induced_group)
            assert so.complete and si.complete and so.ids == si.ids, name


def test_criterion_05_subnormal_series():
    with criterion(5, "subnormal series constructions", 5):
        s3 = symmetric_group(3)
        c4 = G("(0 1 2 3)", n=4)
        for l, series, plus in ((s3, [trivial_group(3), G("(0 1 2)", n=3), s3], cm("C3", "C2")),
                                (c4, [trivial_group(4), G("(0 2)(1 3)", n=4), c4], cm("C2", "C2"))):
            r = subnormal_series_witness(l, series)
            h = r.problem.h
            assert h.order() // r.problem.a.order() == l.order()
            assert r.quotient_minus == composition_multiset(l)
            assert h.order() // r.problem.b.order() == plus.order()
            assert r.quotient_plus == plus


def test_criterion_06_classifier_ground_truth():
    truth = {"AGL(3,2)": ("HA", 8), "A5": ("AS", 5), "PSL(2,7)": ("AS", 8), "HolSym(A5,1)": ("HS", 60),
             "HolSym(A5,2)": ("HC", 3600), "HolSym(A5,2):plus": ("TW", 3600),
             "PSL(2,7)wrC2:product": ("PA", 64), "A5wrC2:diagonal": ("SD", 60)}
    with criterion(6, "quasiprimitive type ground truth", 300):
        for name, (want, degree) in truth.items():
            g = corpus_group(name)
            tag, ev = classify_qp(g)
            assert (tag, g.degree, ev.provisional) == (want, degree, False), name


def test_criterion_07_quotient_type_pairs():
    with criterion(7, "type pairs of quasiprimitive quotients", 300):
        ok, details = criterion_7(0)
        assert details["constructed"] == {"HolSym(A5,1)": ["HS", "AS"], "HolSym(A5,2)": ["HC", "TW"],
                                          "AGL(3,2)": ["HA", "AS"], "AGL(3,2)wrC2:product": ["HA", "PA"]}
        for name, pairs in details["searched"].items():
            for p in pairs:
                assert tuple(p.split("/")) in QUOTIENT_PAIRS, (name, p)
        assert ok


def test_criterion_08_compatible_type_pairs():
    with criterion(8, "type pairs of compatible non-isomorphic pairs", None):
        ok, details = criterion_8(0)
        applicable = {n: tuple(v["types"]) for n, v in details["pairs"].items() if v["applicable"]}
        assert all(v["certified"] for v in details["pairs"].values())
        assert applicable == {"HolSym(A5,1)": ("HS", "AS"), "HolSym(A5,2)": ("HC", "TW")}
        assert set(applicable.values()) <= COMPATIBLE_PAIRS
        assert ok


def test_criterion_09_arithmetic():
    with criterion(9, "factorial divisibility and valuation bounds", 5):
        primes = [p for p in range(2, 98) if is_prime(p)]
        assert not any(l1_check_a(x, k) for x in range(2, 51) for k in range(2, 2001))
        assert not any(l1_check_b(k, ell) for k in range(2, 2001) for ell in range(2, k + 1) if k % ell == 0)
        assert all(vp_factorial(k, p) * (p - 1) <= k - 1 for p in primes for k in range(1, 2001))
        assert vp_factorial(8, 2) == 7


def test_criterion_10_linear_group_probe():
    with criterion(10, "order-p composition factors of irreducible linear groups", 120):
        for d, p in ((2, 2), (2, 3), (3, 2), (2, 5)):
            probe = compfactors_bound_probe(d, p)
            assert probe.irreducible_classes > 0
            assert probe.max_count <= d - 1, (d, p, probe.counts)


def test_criterion_11_socle_and_out_bound():
    with criterion(11, "socle versus stabilizer and the Out(T) bound", 60):
        names = [n for n in corpus_names() if corpus_entry(n).qp_type in ("AS", "PA")]
        assert names
        for name in names:
            g = corpus_group(name)
            tag, ev = classify_qp(g)
            assert tag == corpus_entry(name).qp_type, name
            assert socle_in_stabilizer_check(g), name
            assert out_bound_check(ev.factor, g.degree), name
