"""Brute-force reference implementations on tuples, independent of the package under test.

Permutations are tuples of images acting on the right: ``mul(p, q)`` applies
``p`` first, so ``mul(p, q)[i] == q[p[i]]``.
"""

from __future__ import annotations

import re
from itertools import product
from math import factorial


def parse(text: str, n: int) -> tuple[int, ...]:
    img = list(range(n))
    for cyc in re.findall(r"\(([^()]*)\)", text):
        pts = [int(x) for x in cyc.replace(",", " ").split()]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a] = b
    return tuple(img)


def mul(p, q):
    return tuple(q[i] for i in p)


def inv(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def ident(n: int):
    return tuple(range(n))


def closure(gens, n: int) -> frozenset:
    """All products of the generators (breadth-first)."""
    e = ident(n)
    seen = {e}
    frontier = [e]
    gens = [tuple(int(x) for x in g) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = mul(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def elements_of(group) -> frozenset:
    """Element set of a package group, enumerated from its generators only."""
    return closure([g.tolist() for g in group.gen_arrays], group.degree)


def orbits(gens, n: int) -> list[set[int]]:
    left = set(range(n))
    out = []
    while left:
        start = min(left)
        orb = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for g in gens:
                y = g[x]
                if y not in orb:
                    orb.add(y)
                    stack.append(y)
        out.append(orb)
        left -= orb
    return out


def conj(x, s):
    return mul(mul(inv(s), x), s)


def is_normal(sub: frozenset, g: frozenset) -> bool:
    return all(conj(x, s) in sub for x in sub for s in g)


def normal_closure(elems, g: frozenset, n: int) -> frozenset:
    gens = {conj(x, s) for x in elems for s in g}
    return closure(gens, n) if gens else frozenset({ident(n)})


def core(h: frozenset, g: frozenset) -> frozenset:
    out = set(h)
    for s in g:
        out &= {conj(x, s) for x in h}
    return frozenset(out)


def normal_subgroups(g: frozenset, n: int) -> list[frozenset]:
    """Every normal subgroup, as joins of normal closures of single elements."""
    classes = {normal_closure([x], g, n) for x in g}
    found = set(classes) | {frozenset({ident(n)})}
    changed = True
    while changed:
        changed = False
        for a in list(found):
            for b in list(found):
                j = closure(a | b, n) if not (a <= b or b <= a) else (a | b)
                if j not in found:
                    found.add(j)
                    changed = True
    return sorted(found, key=len)


SIMPLE_BY_ORDER = {60: "A5", 168: "PSL(2,7)", 360: "A6", 504: "PSL(2,8)", 660: "PSL(2,11)"}


def _simple_name(order: int) -> str:
    if all(order % d for d in range(2, int(order ** 0.5) + 1)):
        return f"C{order}"
    return SIMPLE_BY_ORDER[order]


def composition_factors(g: frozenset, n: int) -> dict[str, int]:
    """Composition factors by repeatedly passing to a maximal proper normal subgroup."""
    out: dict[str, int] = {}
    cur = g
    while len(cur) > 1:
        normals = [x for x in normal_subgroups(cur, n) if len(x) < len(cur)]
        maximal = max(normals, key=len)
        name = _simple_name(len(cur) // len(maximal))
        out[name] = out.get(name, 0) + 1
        cur = maximal
    return out


def composition_factors_via_closure(gens, n: int) -> dict[str, int]:
    return composition_factors(closure(gens, n), n)


def subgroups_two_generated(g: frozenset, n: int) -> set[frozenset]:
    """Subgroups generated by at most two elements (every subgroup, for A5 and smaller)."""
    elems = sorted(g)
    subs = set()
    for i, a in enumerate(elems):
        for b in elems[i:]:
            subs.add(closure([a, b], n))
    return subs


def coset_action_images(g: frozenset, h: frozenset, gens, n: int):
    """Right cosets ``Hx`` and the permutation each generator induces on them."""
    cosets = []
    seen = set()
    for x in sorted(g):
        if x in seen:
            continue
        c = frozenset(mul(y, x) for y in h)
        seen |= c
        cosets.append(c)
    index = {}
    for i, c in enumerate(cosets):
        for y in c:
            index[y] = i
    images = []
    for s in gens:
        s = tuple(int(v) for v in s)
        images.append(tuple(index[mul(min(c), s)] for c in cosets))
    return cosets, images


def orbital(gens, n: int, u: int, v: int) -> set[tuple[int, int]]:
    arcs = {(u, v)}
    stack = [(u, v)]
    while stack:
        a, b = stack.pop()
        for g in gens:
            e = (g[a], g[b])
            if e not in arcs:
                arcs.add(e)
                stack.append(e)
    return arcs


def legendre(k: int, p: int) -> int:
    """Exponent of ``p`` in ``k!`` by dividing the factorial itself."""
    f = factorial(k)
    e = 0
    while f % p == 0:
        f //= p
        e += 1
    return e


def automorphism_count(g: frozenset, gens, n: int) -> int:
    """``|Aut(G)|`` for a two-generated group: pairs of images that extend to automorphisms."""
    a, b = (tuple(int(v) for v in s) for s in gens)
    elems = sorted(g)

    def order(x):
        k, y = 1, x
        while y != ident(n):
            y = mul(y, x)
            k += 1
        return k

    oa, ob, oab = order(a), order(b), order(mul(a, b))
    xs = [x for x in elems if order(x) == oa]
    ys = [y for y in elems if order(y) == ob]
    count = 0
    for x, y in product(xs, ys):
        if order(mul(x, y)) != oab:
            continue
        if _extends(a, b, x, y, n, len(g)):
            count += 1
    return count


def _extends(a, b, x, y, n: int, size: int) -> bool:
    """Whether ``a -> x, b -> y`` extends to an injective homomorphism onto ``<x, y>`` of order ``size``."""
    image = {ident(n): ident(n)}
    frontier = [ident(n)]
    while frontier:
        nxt = []
        for w in frontier:
            for s, t in ((a, x), (b, y)):
                ws = mul(w, s)
                img = mul(image[w], t)
                if ws in image:
                    if image[ws] != img:
                        return False
                else:
                    image[ws] = img
                    nxt.append(ws)
        frontier = nxt
    return len(set(image.values())) == size
