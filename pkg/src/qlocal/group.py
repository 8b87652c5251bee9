"""Permutation groups: order, membership, orbits, closures, stabilizers, intersections."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .chain import ChainBudgetError, ProductReplacement, StabChain
from .perm import Permutation, PermutationError, identity_array, inverse_array, point_dtype

ENUMERATION_LIMIT = 1_000_000


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class SiftResult:
    residue: Permutation
    depth: int


class PermGroup:
    """Group generated by permutations of a common degree.

    The stabilizer chain is built on first use (or explicitly with
    :func:`bsgs_build`) and cached; the cached chain never changes the value
    of the group.
    """

    def __init__(self, generators: Iterable[Permutation | Sequence[int] | np.ndarray] = (),
                 degree: int | None = None, *, order: int | None = None,
                 chain: StabChain | None = None, name: str | None = None):
        gens = []
        for g in generators:
            if not isinstance(g, Permutation):
                g = Permutation(g)
            gens.append(g)
        if degree is None:
            if not gens:
                raise GroupError("degree required for a group without generators")
            degree = gens[0].degree
        if degree < 1:
            raise GroupError("degree must be positive")
        for g in gens:
            if g.degree != degree:
                raise GroupError(f"generator of degree {g.degree} in a group of degree {degree}")
        self.degree = degree
        self.generators = tuple(gens)
        self.name = name
        self._known_order = order
        self._chain = chain

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_arrays(cls, arrays, degree: int, **kw) -> PermGroup:
        return cls([Permutation(a, check=False) for a in arrays], degree, **kw)

    @classmethod
    def from_cycles(cls, texts: Iterable[str], degree: int, **kw) -> PermGroup:
        return cls([Permutation.parse(t, degree) for t in texts], degree, **kw)

    @property
    def gen_arrays(self) -> list[np.ndarray]:
        return [g.images for g in self.generators]

    def with_chain(self, chain: StabChain) -> PermGroup:
        return PermGroup(self.generators, self.degree, chain=chain, name=self.name)

    def build_chain(self, base_prefix: Sequence[int] = (), seed: int = 0) -> StabChain:
        """Stabilizer chain with the given base prefix.

        When the order is already known the chain is built from seeded random
        elements and certified by the order; otherwise deterministic
        Schreier-Sims runs to completion.
        """
        order = self._known_order
        if order is None and self._chain is not None:
            order = self._chain.order()
        if order is not None:
            ch = StabChain(self.degree, [], base_prefix, complete=False)
            for g in self.gen_arrays:
                ch.add_generator(g, complete=False)
            if ch.order() < order:
                if self._chain is not None:
                    rng = random.Random(seed)
                    src = lambda: self._chain.random_element(rng)
                else:
                    src = ProductReplacement(self.gen_arrays, self.degree, seed)
                ch.fill_random(src, order)
            if ch.order() != order:
                raise GroupError(f"declared order {order} disagrees with chain order {ch.order()}")
            return ch
        return StabChain(self.degree, self.gen_arrays, base_prefix)

    @property
    def chain(self) -> StabChain:
        if self._chain is None:
            self._chain = self.build_chain()
        return self._chain

    # -- basic queries ---------------------------------------------------------

    def order(self) -> int:
        return self.chain.order()

    def __len__(self) -> int:
        return self.order()

    def is_trivial(self) -> bool:
        return all(g.is_identity() for g in self.generators)

    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def base(self) -> list[int]:
        return self.chain.base

    def strong_generators(self) -> list[Permutation]:
        return [Permutation(g, check=False) for g in self.chain.strong_gens]

    def sift(self, p: Permutation) -> SiftResult:
        if p.degree != self.degree:
            raise GroupError("degree mismatch")
        r, d = self.chain.strip(p.images)
        return SiftResult(Permutation(r, check=False), d)

    def contains_array(self, a: np.ndarray) -> bool:
        return self.chain.contains(a)

    def __contains__(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            return False
        return self.chain.contains(p.images)

    def orbits(self) -> list[list[int]]:
        return orbits_of(self.gen_arrays, self.degree)

    def orbit(self, pt: int) -> list[int]:
        for blk in self.orbits():
            if pt in blk:
                return blk
        raise GroupError(f"point {pt} outside degree {self.degree}")

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    def random_element(self, rng: random.Random) -> Permutation:
        return Permutation(self.chain.random_element(rng), check=False)

    def elements_array(self, limit: int = ENUMERATION_LIMIT) -> np.ndarray:
        return self.chain.elements(limit)

    def elements(self, limit: int = ENUMERATION_LIMIT) -> list[Permutation]:
        return [Permutation(r, check=False) for r in self.elements_array(limit)]

    def is_abelian(self) -> bool:
        gs = self.gen_arrays
        return all(np.array_equal(a[b], b[a]) for i, a in enumerate(gs) for b in gs[i + 1:])

    def __repr__(self) -> str:
        label = self.name or "PermGroup"
        gens = ", ".join(str(g) for g in self.generators[:4])
        more = ", ..." if len(self.generators) > 4 else ""
        return f"<{label} degree={self.degree} gens=[{gens}{more}]>"


def orbits_of(gens: list[np.ndarray], n: int) -> list[list[int]]:
    if not gens:
        return [[i] for i in range(n)]
    rows = np.concatenate([np.arange(n)] * len(gens))
    cols = np.concatenate([np.asarray(g, dtype=np.int64) for g in gens])
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    blocks: dict[int, list[int]] = {}
    for pt, lab in enumerate(labels.tolist()):
        blocks.setdefault(lab, []).append(pt)
    return sorted(blocks.values(), key=lambda b: b[0])


def trivial_group(n: int) -> PermGroup:
    return PermGroup([], n)


def _check_degree(a: PermGroup, b: PermGroup) -> None:
    if a.degree != b.degree:
        raise GroupError(f"degree mismatch: {a.degree} vs {b.degree}")


# -- operations on groups ------------------------------------------------------


def bsgs_build(g: PermGroup, seed: int = 0) -> PermGroup:
    """Return ``g`` with its stabilizer chain populated."""
    if g._chain is not None:
        return g
    return g.with_chain(g.build_chain(seed=seed))


def group_order(g: PermGroup) -> int:
    return g.order()


def membership(g: PermGroup, p: Permutation) -> tuple[bool, SiftResult]:
    res = g.sift(p)
    return res.residue.is_identity(), res


def orbits(g: PermGroup) -> list[list[int]]:
    return g.orbits()


def is_subgroup(a: PermGroup, b: PermGroup) -> bool:
    """Whether ``a`` is contained in ``b``."""
    _check_degree(a, b)
    return all(b.contains_array(x) for x in a.gen_arrays)


subgroup_of = is_subgroup


def subgroup_equal(a: PermGroup, b: PermGroup) -> bool:
    _check_degree(a, b)
    return a.order() == b.order() and is_subgroup(a, b)


def is_normal(n: PermGroup, g: PermGroup) -> bool:
    """Whether ``n`` is normalized by every generator of ``g``."""
    _check_degree(n, g)
    for s in g.gen_arrays:
        sinv = inverse_array(s)
        for x in n.gen_arrays:
            if not n.contains_array(s[x[sinv]]):
                return False
    return True


def conjugate_array(x: np.ndarray, s: np.ndarray, sinv: np.ndarray | None = None) -> np.ndarray:
    """``s^-1 * x * s`` as an image array."""
    if sinv is None:
        sinv = inverse_array(s)
    return s[x[sinv]]


def join(a: PermGroup, b: PermGroup) -> PermGroup:
    _check_degree(a, b)
    ch = StabChain(a.degree, a.chain.strong_gens if a._chain is not None else a.gen_arrays)
    extra = [x for x in b.gen_arrays if ch.add_generator(x)]
    gens = list(a.gen_arrays) + extra
    return PermGroup.from_arrays(gens, a.degree, chain=ch)


def subgroup(parent: PermGroup, elems: Iterable[Permutation | np.ndarray]) -> PermGroup:
    arrays = [e.images if isinstance(e, Permutation) else np.asarray(e) for e in elems]
    for a in arrays:
        if len(a) != parent.degree:
            raise GroupError("degree mismatch")
        if not parent.contains_array(a):
            raise GroupError("element not contained in the parent group")
    return PermGroup.from_arrays(arrays, parent.degree)


def normal_closure(g: PermGroup, elems: Iterable[Permutation | np.ndarray], *, check: bool = True) -> PermGroup:
    """Smallest normal subgroup of ``g`` containing ``elems``."""
    n = g.degree
    arrays = []
    for e in elems:
        a = e.images if isinstance(e, Permutation) else np.asarray(e, dtype=point_dtype(n))
        if len(a) != n:
            raise GroupError("degree mismatch")
        if check and not g.contains_array(a):
            raise GroupError("element not contained in the group")
        arrays.append(a)
    return normal_closure_arrays(g, arrays)


def normal_closure_arrays(g: PermGroup, arrays: list[np.ndarray], *,
                          order_below: int | None = None) -> PermGroup | None:
    """Normal closure of image arrays; None as soon as the order reaches ``order_below``.

    Conjugates are inserted into a chain that is only completed once the
    generating set looks closed; an incomplete chain can only fail to
    recognize members, and its order is a lower bound, so the early exit and
    the final closure test stay exact.
    """
    n = g.degree
    ch = StabChain(n, [])
    gens: list[np.ndarray] = []
    conj = [(s, inverse_array(s)) for s in g.gen_arrays]

    def too_big() -> bool:
        return order_below is not None and ch.order() >= order_below

    queue = [np.asarray(a, dtype=ch.ident.dtype) for a in arrays]
    while True:
        while queue:
            x = queue.pop()
            if ch.add_generator(x, complete=False):
                gens.append(x)
                if too_big():
                    return None
                for s, sinv in conj:
                    queue.append(s[x[sinv]])
        ch.complete()
        if too_big():
            return None
        queue = [s[x[sinv]] for x in gens for s, sinv in conj]
        queue = [y for y in queue if not ch.contains(y)]
        if not queue:
            break
    return PermGroup.from_arrays(gens or [ch.ident], n, chain=ch)


def pointwise_stabilizer(g: PermGroup, pts: Sequence[int], seed: int = 0) -> PermGroup:
    pts = [int(p) for p in pts]
    for p in pts:
        if not 0 <= p < g.degree:
            raise GroupError(f"invalid point {p}")
    if not pts:
        return g
    ch = g.build_chain(base_prefix=pts, seed=seed)
    k = len(pts)
    tail = ch.tail(k)
    gens = ch.levels[k].gens if len(ch.levels) > k else []
    return PermGroup.from_arrays(gens, g.degree, chain=tail)


def set_stabilizer_of_blocks(g: PermGroup, pts: Sequence[int]) -> PermGroup:
    return pointwise_stabilizer(g, pts)


def conjugate_group(g: PermGroup, x: Permutation) -> PermGroup:
    """The group ``x^-1 g x``."""
    if x.degree != g.degree:
        raise GroupError("degree mismatch")
    xi = inverse_array(x.images)
    gens = [x.images[s[xi]] for s in g.gen_arrays]
    order = g.order() if g._chain is not None or g._known_order is not None else None
    return PermGroup.from_arrays(gens, g.degree, order=order)


def intersection(a: PermGroup, b: PermGroup, *, enum_limit: int = ENUMERATION_LIMIT,
                 budget: int = 10_000_000) -> PermGroup:
    """``a`` intersected with ``b``.

    Enumerates the smaller group and filters by membership when it has at most
    ``enum_limit`` elements; otherwise runs a base-image backtrack.
    """
    _check_degree(a, b)
    if a.order() > b.order():
        a, b = b, a
    n = a.degree
    if a.order() <= enum_limit:
        ch = StabChain(n, [])
        gens = []
        for x in a.elements_array(enum_limit):
            if b.contains_array(x) and ch.add_generator(x):
                gens.append(x)
        return PermGroup.from_arrays(gens, n, chain=ch)
    return _intersection_backtrack(a, b, budget)


def _intersection_backtrack(a: PermGroup, b: PermGroup, budget: int) -> PermGroup:
    n = a.degree
    ach = a.chain
    base = ach.base
    bch = b.build_chain(base_prefix=base)
    result = StabChain(n, [], base)
    gens: list[np.ndarray] = []
    nodes = 0
    ident = identity_array(n)
    k = len(ach.levels)

    def rec(level: int, prefix: np.ndarray, q: np.ndarray) -> None:
        # prefix: product of chosen transversal elements of a; q: inverse of the
        # matching product in b, so q[img] must lie in the next basic orbit of b.
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise ChainBudgetError("intersection backtrack exceeded its budget")
        if level == k:
            if not result.is_identity(prefix) and bch.contains(prefix) and result.add_generator(prefix):
                gens.append(prefix)
            return
        lev = ach.levels[level]
        blev = bch.levels[level]
        for idx in range(len(lev.orbit)):
            u = lev.u(idx)
            cand = prefix[u]
            img = cand[lev.base]
            if blev.pos[q[img]] < 0:
                continue
            t_idx = int(blev.pos[q[img]])
            rec(level + 1, cand, _next_q(blev, t_idx, q))

    rec(0, ident, ident)
    return PermGroup.from_arrays(gens, n, chain=result)


def _next_q(blev, t_idx: int, q: np.ndarray) -> np.ndarray:
    # q holds the inverse of the accumulated b-transversal product.
    return blev.uinv(t_idx)[q]
