#!/usr/bin/env python3
"""Regenerate src/qlocal/data/*.json.

Usage:
  python3 tools/gen_catalog.py            # write both data files
  python3 tools/gen_catalog.py --check    # compare against the committed files
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from qlocal.arith import prime_power
from qlocal.group import PermGroup
from qlocal.perm import Permutation
from qlocal.simple import (EXTRA_ALIASES, _load, ORDER_LIMIT, alternating_spectrum, family_kind, family_name,
                           family_order, family_out_order, formula_rows, psl2_spectrum)
from qlocal.structure import composition_multiset, element_spectrum
from qlocal.subgroups import subgroup_classes

DATA = Path(__file__).resolve().parents[1] / "src" / "qlocal" / "data"
SECTION_LIMIT = 3600


# -- finite fields GF(p^f), elements as integers 0..q-1 (polynomial coefficients base p) --

CONWAY = {(2, 1): [1, 1], (2, 2): [1, 1, 1], (2, 3): [1, 1, 0, 1], (2, 4): [1, 1, 0, 0, 1],
          (3, 1): [1, 1], (3, 2): [2, 2, 1], (5, 1): [3, 1]}


class GF:
    def __init__(self, q: int):
        self.q = q
        self.p, self.f = prime_power(q)
        p, f = self.p, self.f
        if f == 1:
            self.add = [[(a + b) % p for b in range(q)] for a in range(q)]
            self.mul = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            poly = CONWAY[(p, f)]  # monic modulus, low coefficients first (x^f omitted)

            def digits(a):
                return [(a // p ** i) % p for i in range(f)]

            def number(d):
                return sum(c * p ** i for i, c in enumerate(d))

            def mulpoly(a, b):
                prod = [0] * (2 * f - 1)
                for i, x in enumerate(digits(a)):
                    for j, y in enumerate(digits(b)):
                        prod[i + j] = (prod[i + j] + x * y) % p
                for k in range(2 * f - 2, f - 1, -1):
                    c = prod[k]
                    if c:
                        prod[k] = 0
                        for i in range(f):
                            prod[k - f + i] = (prod[k - f + i] - c * poly[i]) % p
                return number(prod[:f])

            self.add = [[number([(x + y) % p for x, y in zip(digits(a), digits(b))]) for b in range(q)]
                        for a in range(q)]
            self.mul = [[mulpoly(a, b) for b in range(q)] for a in range(q)]
        self.neg = [next(b for b in range(q) if self.add[a][b] == 0) for a in range(q)]
        self.inv = [None] + [next(b for b in range(1, q) if self.mul[a][b] == 1) for a in range(1, q)]
        self.primitive = next(a for a in range(2, q) if len({self.power(a, k) for k in range(q - 1)}) == q - 1) \
            if q > 2 else 1

    def power(self, a, k):
        r = 1
        for _ in range(k):
            r = self.mul[r][a]
        return r


def projective_points(F: GF, d: int) -> list[tuple[int, ...]]:
    pts = []
    for v in itertools.product(range(F.q), repeat=d):
        if any(v) and next(x for x in v if x) == 1:
            pts.append(v)
    return pts


def normalize(F: GF, v):
    lead = next(x for x in v if x)
    li = F.inv[lead]
    return tuple(F.mul[x][li] for x in v)


def apply(F: GF, m, v):
    """Row vector v times matrix m."""
    d = len(v)
    out = []
    for j in range(d):
        s = 0
        for i in range(d):
            s = F.add[s][F.mul[v[i]][m[i][j]]]
        out.append(s)
    return tuple(out)


def transvections(F: GF, d: int):
    """Generators of SL(d, q): elementary transvections with a basis of scalars."""
    scalars = [1] + ([F.primitive] if F.f > 1 else [])
    mats = []
    for i in range(d):
        for j in range(d):
            if i != j:
                for a in scalars:
                    m = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
                    m[i][j] = a
                    mats.append(m)
    return mats


def psl_on_points(q: int, d: int) -> tuple[int, list[str]]:
    F = GF(q)
    pts = projective_points(F, d)
    index = {p: i for i, p in enumerate(pts)}
    gens = []
    for m in transvections(F, d):
        gens.append(str(Permutation([index[normalize(F, apply(F, m, v))] for v in pts])))
    return len(pts), gens


def sl_on_vectors(q: int, d: int) -> tuple[int, list[str]]:
    F = GF(q)
    vecs = [v for v in itertools.product(range(q), repeat=d) if any(v)]
    index = {v: i for i, v in enumerate(vecs)}
    gens = [str(Permutation([index[apply(F, m, v)] for v in vecs])) for m in transvections(F, d)]
    return len(vecs), gens


def agl(d: int, p: int) -> tuple[int, list[str]]:
    F = GF(p)
    vecs = list(itertools.product(range(p), repeat=d))
    index = {v: i for i, v in enumerate(vecs)}
    gens = []
    for m in transvections(F, d):
        gens.append(str(Permutation([index[apply(F, m, v)] for v in vecs])))
    e = tuple([1] + [0] * (d - 1))
    gens.append(str(Permutation([index[tuple(F.add[a][b] for a, b in zip(v, e))] for v in vecs])))
    return len(vecs), gens


def psl2_projective_line(q: int) -> tuple[int, list[str]]:
    return psl_on_points(q, 2)


def from_one_based(cycles: list[str], n: int) -> list[str]:
    out = []
    for c in cycles:
        perm = Permutation.parse(c, n + 1)
        arr = perm.to_list()
        out.append(str(Permutation([arr[i + 1] - 1 for i in range(n)])))
    return out


def named_groups() -> list[dict]:
    rows = []

    def add(name, degree, gens, order, oracle, aliases=()):
        g = PermGroup.from_cycles(gens, degree)
        got = g.order()
        if got != order:
            raise SystemExit(f"{name}: chain order {got} != expected {order}")
        rows.append({"name": name, "degree": degree, "generators": gens, "order": order,
                     "aliases": list(aliases), "oracle": oracle})

    n, gens = agl(3, 2)
    add("AGL(3,2)", n, gens, 1344, "order by chain; 8 * |GL(3,2)| = 8 * 168")
    n, gens = sl_on_vectors(2, 3)
    add("GL(3,2)", n, gens, 168, "order by chain; action on the 7 nonzero vectors of GF(2)^3",
        aliases=["PSL(3,2)", "SL(3,2)", "L3(2)"])
    for q in (7, 8, 11, 13, 16, 17, 19):
        n, gens = psl2_projective_line(q)
        o = q * (q * q - 1) // (2 if q % 2 else 1)
        aliases = ["L2(7)"] if q == 7 else []
        add(f"PSL(2,{q})", n, gens, o, "order by chain; action on the projective line", aliases)
    n, gens = sl_on_vectors(5, 2)
    add("SL(2,5)", n, gens, 120, "order by chain; action on the 24 nonzero vectors of GF(5)^2")
    n, gens = sl_on_vectors(3, 2)
    add("SL(2,3)", n, gens, 24, "order by chain; action on the 8 nonzero vectors of GF(3)^2")
    n, gens = psl_on_points(3, 3)
    add("PSL(3,3)", n, gens, 5616, "order by chain; action on the 13 points of PG(2,3)")
    n, gens = psl_on_points(4, 3)
    add("PSL(3,4)", n, gens, 20160, "order by chain; action on the 21 points of PG(2,4)")
    add("M11", 11, from_one_based(["(1 2 3 4 5 6 7 8 9 10 11)", "(3 7 11 8)(4 10 5 6)"], 11), 7920,
        "order by chain")
    add("M12", 12, from_one_based(["(1 2 3 4 5 6 7 8 9 10 11)", "(3 7 11 8)(4 10 5 6)",
                                   "(1 12)(2 11)(3 6)(4 8)(5 9)(7 10)"], 12), 95040, "order by chain")
    return rows


def alternating_generators(n: int) -> list[str]:
    cyc = range(n) if n % 2 else range(1, n)
    return ["(0 1 2)", "(" + " ".join(map(str, cyc)) + ")"]


def simple_rows(named: list[dict], with_sections: bool) -> list[dict]:
    gens_by_name = {r["name"]: r for r in named}
    for r in named:
        for a in r["aliases"]:
            gens_by_name.setdefault(a, r)
    out = []
    for tag, params in formula_rows(ORDER_LIMIT):
        name = family_name(tag, params)
        order = family_order(tag, params)
        row = {"name": name, "tag": tag, "params": list(params), "order": order,
               "kind": family_kind(tag), "out_order": family_out_order(tag, params),
               "aliases": EXTRA_ALIASES.get(name, []),
               "oracle": {"order": "formula", "out_order": "formula"}}
        group = None
        if tag == "A":
            n = params[0]
            row["spectrum"] = alternating_spectrum(n)
            row["oracle"]["spectrum"] = "cycle types of even permutations"
            if order <= SECTION_LIMIT:
                group = PermGroup.from_cycles(alternating_generators(n), n)
        elif tag == "L" and params[0] == 2:
            row["spectrum"] = psl2_spectrum(params[1])
            row["oracle"]["spectrum"] = "formula"
        if name in gens_by_name:
            r = gens_by_name[name]
            group = PermGroup.from_cycles(r["generators"], r["degree"])
            if "spectrum" not in row and order * r["degree"] <= 10 ** 7:
                row["spectrum"] = sorted(element_spectrum(group))
                row["oracle"]["spectrum"] = "enumeration of element orders"
            elif "spectrum" in row and order * r["degree"] <= 10 ** 7:
                if sorted(element_spectrum(group)) != row["spectrum"]:
                    raise SystemExit(f"{name}: spectrum formula disagrees with enumeration")
        if with_sections and order <= SECTION_LIMIT:
            if group is None:
                raise SystemExit(f"no generators for {name}")
            secs = set()
            for c in subgroup_classes(group):
                secs |= {i.name for i in composition_multiset(c.group).support()}
            row["sections"] = sorted(secs, key=lambda s: (len(s), s))
            row["oracle"]["sections"] = "subgroup classes by cyclic extension; composition factors of each"
        out.append(row)
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args(argv)
    named = named_groups()
    # composition factors need the order table, so write it once without sections first
    if not args.check:
        bare = {"version": 1, "order_limit": ORDER_LIMIT, "rows": simple_rows(named, False)}
        (DATA / "simple_groups.json").write_text(json.dumps(bare, indent=1) + "\n")
        _load.cache_clear()
    simple = simple_rows(named, True)
    payloads = {
        "named_groups.json": {"version": 1, "groups": named},
        "simple_groups.json": {"version": 1, "order_limit": ORDER_LIMIT, "rows": simple},
    }
    status = 0
    for fname, payload in payloads.items():
        text = json.dumps(payload, indent=1) + "\n"
        path = DATA / fname
        if args.check:
            if not path.exists() or path.read_text() != text:
                print(f"{fname}: differs from regenerated data")
                status = 1
        else:
            path.write_text(text)
            print(f"wrote {path}")
    return status


if __name__ == "__main__":
    sys.exit(main())
