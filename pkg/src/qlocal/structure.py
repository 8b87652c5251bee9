"""Cores, minimal normal subgroups, socles, composition factors and simple quotients."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import simple as sg
from .actions import (DEFAULT_MAX_INDEX, ActionImage, IndexTooLarge, action_kernel, block_action,
                      block_system, coset_action, restriction)
from .arith import factorint, is_prime, prime_divisors
from .group import (GroupError, PermGroup, conjugate_group, intersection, is_normal, is_subgroup,
                    normal_closure_arrays, pointwise_stabilizer, subgroup_equal, trivial_group)
from .perm import Permutation, commutator_array, inverse_array, order_of_array, power_array
from .simple import SimpleGroupId
from .subgroups import TABLE_LIMIT, CayleyTable


class StructureError(GroupError):
    pass


class NotSimple(StructureError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Budget:
    """Search limits shared by the structural algorithms."""

    samples: int = 30
    enumeration_limit: int = 1_000_000
    entries_limit: int = 40_000_000
    max_index: int = DEFAULT_MAX_INDEX
    lattice_limit: int = 2000
    class_limit: int = 50_000
    seed: int = 0


DEFAULT_BUDGET = Budget()


@dataclass
class NormalWitness:
    subgroup: PermGroup
    generators_source: str
    minimality_evidence: list[Permutation] = field(default_factory=list)

    def order(self) -> int:
        return self.subgroup.order()


@dataclass
class MinimalNormalResult:
    witnesses: list[NormalWitness]
    complete: bool

    def __iter__(self):
        return iter(self.witnesses)

    def __len__(self) -> int:
        return len(self.witnesses)

    def __getitem__(self, i: int) -> NormalWitness:
        return self.witnesses[i]

    @property
    def groups(self) -> list[PermGroup]:
        return [w.subgroup for w in self.witnesses]


class CompositionMultiset:
    """Multiset of composition factors, with a flag for unverified simplicity claims."""

    def __init__(self, entries: dict[SimpleGroupId, int] | Counter | None = None, verified: bool = True):
        self.entries = Counter({k: v for k, v in (entries or {}).items() if v})
        self.verified = verified

    @classmethod
    def abelian(cls, order: int) -> CompositionMultiset:
        return cls({sg.cyclic(p): e for p, e in factorint(order).items()} if order > 1 else {})

    @classmethod
    def of(cls, *names: str) -> CompositionMultiset:
        return cls(Counter(sg.lookup(n) for n in names))

    def order(self) -> int:
        out = 1
        for ident, m in self.entries.items():
            out *= ident.order ** m
        return out

    def __add__(self, other: CompositionMultiset) -> CompositionMultiset:
        return CompositionMultiset(self.entries + other.entries, self.verified and other.verified)

    def __sub__(self, other: CompositionMultiset) -> CompositionMultiset:
        if not other <= self:
            raise StructureError(f"{other} is not contained in {self}")
        return CompositionMultiset(self.entries - other.entries, self.verified and other.verified)

    def __le__(self, other: CompositionMultiset) -> bool:
        return all(other.entries.get(k, 0) >= v for k, v in self.entries.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompositionMultiset):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def __len__(self) -> int:
        return sum(self.entries.values())

    def items(self) -> list[tuple[SimpleGroupId, int]]:
        return sorted(self.entries.items())

    def support(self) -> frozenset[SimpleGroupId]:
        return frozenset(self.entries)

    def multiplicity(self, name: str | SimpleGroupId) -> int:
        ident = sg.lookup(name) if isinstance(name, str) else name
        return self.entries.get(ident, 0)

    def is_soluble(self) -> bool:
        return all(k.is_abelian for k in self.entries)

    def to_dict(self) -> dict[str, int]:
        return {k.name: v for k, v in self.items()}

    def __str__(self) -> str:
        parts = [k.name if v == 1 else f"{k.name}:{v}" for k, v in self.items()]
        return "{" + ", ".join(parts) + "}"

    def __repr__(self) -> str:
        return f"CompositionMultiset({self})"


@dataclass(frozen=True)
class SectionSet:
    ids: frozenset[SimpleGroupId]
    complete: bool

    def names(self) -> list[str]:
        return [i.name for i in sorted(self.ids)]


@dataclass(frozen=True)
class QuotientSet:
    ids: frozenset[SimpleGroupId]
    complete: bool

    def names(self) -> list[str]:
        return [i.name for i in sorted(self.ids)]


# -- elementary constructions -------------------------------------------------------

def derived_subgroup(g: PermGroup) -> PermGroup:
    gens = g.gen_arrays
    comms = [commutator_array(a, b) for i, a in enumerate(gens) for b in gens[i + 1:]]
    return normal_closure_arrays(g, comms)


def derived_series(g: PermGroup) -> list[PermGroup]:
    series = [g]
    while True:
        d = derived_subgroup(series[-1])
        if d.order() == series[-1].order():
            return series
        series.append(d)


def core(g: PermGroup, h: PermGroup, budget: Budget = DEFAULT_BUDGET) -> PermGroup:
    """Largest normal subgroup of ``g`` contained in ``h``."""
    if not is_subgroup(h, g):
        raise StructureError("h is not a subgroup of g")
    index = g.order() // h.order()
    if index == 1:
        return g
    if index <= budget.max_index:
        img, _ = coset_action(g, h, budget.max_index, seed=budget.seed)
        return img.kernel
    c = h
    changed = True
    while changed:
        changed = False
        for s in g.generators:
            cs = conjugate_group(c, s)
            if not subgroup_equal(cs, c):
                c = intersection(c, cs)
                changed = True
    return c


# -- classes of elements ----------------------------------------------------------

@dataclass
class ElementClasses:
    """``g``-conjugacy classes of the elements of a normal subgroup ``k``."""

    group: PermGroup
    labels: np.ndarray
    reps: list[int]
    sizes: list[int]

    def element(self, idx: int) -> np.ndarray:
        return self.group.chain.element_at(idx)


def _row_lookup(ref: np.ndarray, queries: list[np.ndarray]) -> list[np.ndarray]:
    m = len(ref)
    allrows = np.concatenate([ref] + queries, axis=0)
    _, inv = np.unique(allrows, axis=0, return_inverse=True)
    inv = np.asarray(inv).ravel()
    pos = np.full(int(inv.max()) + 1, -1, dtype=np.int64)
    pos[inv[:m]] = np.arange(m)
    return [pos[inv[m + i * m: m + (i + 1) * m]] for i in range(len(queries))]


def element_classes(g: PermGroup, k: PermGroup, budget: Budget = DEFAULT_BUDGET) -> ElementClasses:
    ch = k.chain
    size = ch.order()
    if size > budget.enumeration_limit:
        raise BudgetExceeded(f"order {size} exceeds the enumeration limit")
    base = ch.base
    if not base:
        return ElementClasses(k, np.zeros(1, dtype=np.int64), [0], [1])
    sinvs = [inverse_array(s) for s in g.gen_arrays]
    cols = sorted(set(base) | {int(si[b]) for si in sinvs for b in base})
    if size * len(cols) > budget.entries_limit:
        raise BudgetExceeded("element table exceeds the entry limit")
    E = ch.elements(budget.enumeration_limit, cols).astype(np.int64)
    cp = {c: j for j, c in enumerate(cols)}
    ref = E[:, [cp[b] for b in base]]
    queries = [s.astype(np.int64)[E[:, [cp[int(si[b])] for b in base]]] for s, si in zip(g.gen_arrays, sinvs)]
    targets = _row_lookup(ref, queries)
    if any((t < 0).any() for t in targets):
        raise StructureError("subgroup is not normal")
    rows = np.tile(np.arange(size), len(targets))
    cols_ = np.concatenate(targets) if targets else np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols_)), shape=(size, size))
    _, labels = connected_components(graph, directed=True, connection="weak")
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    reps = first[order].tolist()
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    labels = relabel[labels]
    sizes = np.bincount(labels).tolist()
    return ElementClasses(k, labels, reps, sizes)


def element_spectrum(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> set[int]:
    """Set of element orders, by full enumeration."""
    if g.order() * g.degree > budget.entries_limit:
        raise BudgetExceeded("group too large for an exact element-order spectrum")
    E = g.chain.elements(budget.enumeration_limit).astype(np.int64)
    ident = np.arange(g.degree)
    orders = np.zeros(len(E), dtype=np.int64)
    cur = E
    idx = np.arange(len(E))
    k = 1
    while len(idx):
        hit = (cur == ident).all(axis=1)
        orders[idx[hit]] = k
        keep = ~hit
        idx = idx[keep]
        cur = np.take_along_axis(E[idx], cur[keep], axis=1)
        k += 1
    orders[0] = 1
    return set(orders.tolist())


# -- minimal normal subgroups ------------------------------------------------------

def _same_group(a: PermGroup, b: PermGroup) -> bool:
    return a.order() == b.order() and is_subgroup(a, b)


def _table_minimal(x: PermGroup, cls: ElementClasses) -> list[NormalWitness]:
    """Minimal normal subgroups inside a small ``x``, closing classes in its Cayley table."""
    t = CayleyTable(x, TABLE_LIMIT)
    closures: list[tuple[np.ndarray, list[Permutation], int]] = []
    for c in sorted(range(len(cls.reps)), key=lambda c: (cls.sizes[c], c)):
        idx = cls.reps[c]
        o = int(t.orders[idx])
        if idx == 0 or not is_prime(o):
            continue
        # the subgroup generated by a whole class is its normal closure
        members = t.closure(np.nonzero(cls.labels == c)[0])
        y_perm = Permutation(t.elements[idx].astype(x.gen_arrays[0].dtype), check=False)
        for mask, evidence, _ in closures:
            if np.array_equal(mask, members):
                evidence.append(y_perm)
                break
        else:
            closures.append((members, [y_perm], o))
    out = []
    for mask, evidence, o in closures:
        if any(m.sum() < mask.sum() and not (m & ~mask).any() for m, _, _ in closures):
            continue
        out.append(NormalWitness(t.subgroup(mask), f"class closure of an element of order {o}", evidence))
    return out


def _exhaustive_minimal(g: PermGroup, x: PermGroup, budget: Budget) -> list[NormalWitness]:
    cls = element_classes(g, x, budget)
    if x.order() <= TABLE_LIMIT:
        return _table_minimal(x, cls)
    closures: list[NormalWitness] = []
    for c in sorted(range(len(cls.reps)), key=lambda c: (cls.sizes[c], c)):
        idx = cls.reps[c]
        if idx == 0:
            continue
        y = cls.element(idx)
        o = order_of_array(y)
        if not is_prime(o):
            continue
        n = normal_closure_arrays(g, [y])
        y_perm = Permutation(y, check=False)
        for w in closures:
            if _same_group(w.subgroup, n):
                w.minimality_evidence.append(y_perm)
                break
        else:
            closures.append(NormalWitness(n, f"normal closure of a class representative of order {o}", [y_perm]))
    # every minimal normal subgroup is the closure of each of its prime-order elements
    return [w for w in closures
            if not any(v.order() < w.order() and is_subgroup(v.subgroup, w.subgroup) for v in closures)]


def _enumerable(x: PermGroup, g: PermGroup, budget: Budget) -> bool:
    cols = len(x.chain.base) * (1 + len(g.generators))
    return x.order() <= budget.enumeration_limit and x.order() * cols <= budget.entries_limit


def _shrink(g: PermGroup, start: PermGroup, rng: random.Random, samples: int,
            small_enough=None) -> PermGroup:
    """Random closure minimization: replace by smaller normal closures of prime-order elements.

    Stops after ``samples`` consecutive failures, or once ``small_enough(best)`` holds.
    """
    best = start
    fails = 0
    while fails < samples and best.order() > 1:
        if small_enough is not None and best is not start and small_enough(best):
            break
        x = best.chain.random_element(rng)
        o = order_of_array(x)
        improved = False
        if o > 1:
            for p in prime_divisors(o):
                y = power_array(x, o // p)
                n = normal_closure_arrays(g, [y], order_below=best.order())
                if n is not None:
                    best = n
                    improved = True
                    break
        fails = 0 if improved else fails + 1
    return best


def centralizing_permutations(k: PermGroup) -> np.ndarray:
    """Rows: all elements of the centralizer of a transitive group in the symmetric group."""
    n = k.degree
    if not k.is_transitive():
        raise GroupError("centralizer shortcut needs a transitive group")
    ch = k.build_chain(base_prefix=[0])
    lev0 = ch.levels[0]
    stab_gens = ch.levels[1].gens if len(ch.levels) > 1 else []
    fixed = np.ones(n, dtype=bool)
    for s in stab_gens:
        fixed &= s == np.arange(n)
    betas = np.nonzero(fixed)[0]
    U = ch.transversal_arrays(0)  # row i maps 0 to orbit[i]
    orbit = lev0.orbit_array
    C = np.empty((len(betas), n), dtype=np.int64)
    C[:, orbit] = U[:, betas].T
    return C


def centralizer_in(x: PermGroup, k: PermGroup, budget: Budget = DEFAULT_BUDGET) -> PermGroup | None:
    """``C_x(k)`` for ``k`` normalized by ``x``; None when the class budget is exceeded."""
    n = x.degree
    if k.order() == 1:
        return x
    if k.is_transitive():
        rows = [r for r in centralizing_permutations(k) if x.contains_array(r.astype(x.gen_arrays[0].dtype))]
        from .chain import StabChain
        ch = StabChain(n, [])
        gens = []
        for r in rows:
            r = r.astype(x.gen_arrays[0].dtype)
            if ch.add_generator(r):
                gens.append(r)
        return PermGroup.from_arrays(gens, n, chain=ch)
    # kernel of the conjugation action of x on the x-classes of generators of k
    elems: list[np.ndarray] = []
    index: dict[bytes, int] = {}
    for a in k.gen_arrays:
        if a.tobytes() not in index:
            index[a.tobytes()] = len(elems)
            elems.append(a)
    conj = [(s, inverse_array(s)) for s in x.gen_arrays]
    i = 0
    while i < len(elems):
        for s, si in conj:
            y = s[elems[i][si]]
            key = y.tobytes()
            if key not in index:
                index[key] = len(elems)
                elems.append(y)
                if len(elems) > budget.class_limit:
                    return None
        i += 1
    imgs = []
    for s, si in conj:
        imgs.append(np.array([index[s[e[si]].tobytes()] for e in elems], dtype=np.int64))
    return action_kernel(x, imgs, len(elems), seed=budget.seed)


def _merge(into: list[NormalWitness], more: Iterable[NormalWitness]) -> None:
    for w in more:
        if not any(_same_group(w.subgroup, v.subgroup) for v in into):
            into.append(w)


def _within(g: PermGroup, x: PermGroup, budget: Budget, rng: random.Random) -> tuple[list[NormalWitness], bool]:
    """Minimal normal subgroups of ``g`` contained in the normal subgroup ``x``."""
    if x.order() == 1:
        return [], True
    if _enumerable(x, g, budget):
        return _exhaustive_minimal(g, x, budget), True
    k = _shrink(g, x, rng, budget.samples, lambda y: _enumerable(y, g, budget))
    if k.order() == x.order():
        return [NormalWitness(x, "random closure minimization (no smaller closure sampled)")], False
    found, complete = _within(g, k, budget, rng)
    c = centralizer_in(x, k, budget)
    if c is None or c.order() >= x.order():
        return found, False
    more, complete_c = _within(g, c, budget, rng)
    _merge(found, more)
    return found, complete and complete_c


def minimal_normal_subgroups(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> MinimalNormalResult:
    """Minimal normal subgroups of ``g``.

    Small groups are scanned exhaustively over conjugacy classes.  Larger
    groups shrink a normal closure at random until it is small enough to scan
    and then recurse into its centralizer, which must contain every other
    minimal normal subgroup; the result is complete unless that reduction
    stalls.
    """
    if g.order() == 1:
        raise StructureError("the trivial group has no minimal normal subgroups")
    rng = random.Random(budget.seed)
    found, complete = _within(g, g, budget, rng)
    found.sort(key=lambda w: (w.order(), [s.to_list() for s in w.subgroup.generators[:1]]))
    return MinimalNormalResult(found, complete)


def socle(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> tuple[PermGroup, bool]:
    mins = minimal_normal_subgroups(g, budget)
    gens = [a for w in mins for a in w.subgroup.gen_arrays]
    soc = normal_closure_arrays(g, gens) if gens else trivial_group(g.degree)
    return soc, mins.complete


# -- quotients ------------------------------------------------------------------------

def quotient_group(g: PermGroup, n: PermGroup, budget: Budget = DEFAULT_BUDGET) -> ActionImage:
    """A faithful permutation representation of ``g/n`` (its kernel is exactly ``n``)."""
    if n.order() == 1:
        return ActionImage(g, g, trivial_group(g.degree), list(g.generators))
    orbs = n.orbits()
    if len(orbs) > 1:
        img = block_action(g, orbs, seed=budget.seed)
        if img.kernel.order() == n.order():
            return img
    index = g.order() // n.order()
    if index > budget.max_index:
        raise IndexTooLarge(f"quotient of order {index} exceeds the index limit")
    img, _ = coset_action(g, n, budget.max_index, seed=budget.seed)
    return img


# -- simple groups and composition factors ---------------------------------------

def _identify_by_order(g: PermGroup, budget: Budget) -> SimpleGroupId:
    o = g.order()
    if is_prime(o):
        return sg.cyclic(o)
    cands = sg.candidates_by_order(o)
    if not cands:
        raise StructureError(f"no simple group of order {o} in the catalog")
    if len(cands) == 1:
        return cands[0].ident
    spec = element_spectrum(g, budget)
    matches = [c for c in cands if c.spectrum is not None and set(c.spectrum) == spec]
    if len(matches) != 1:
        raise StructureError(f"element orders do not single out a simple group of order {o}")
    return matches[0].ident


def identify_simple(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> SimpleGroupId:
    o = g.order()
    if o == 1:
        raise NotSimple("the trivial group is not simple")
    if is_prime(o):
        return sg.cyclic(o)
    mins = minimal_normal_subgroups(g, budget)
    if len(mins) != 1 or mins[0].order() != o:
        raise NotSimple(f"group of order {o} has a proper nontrivial normal subgroup")
    if not mins.complete:
        raise BudgetExceeded("simplicity could not be certified within the budget")
    return _identify_by_order(g, budget)


def _composition(g: PermGroup, budget: Budget, rng: random.Random) -> CompositionMultiset:
    o = g.order()
    if o == 1:
        return CompositionMultiset()
    if is_prime(o):
        return CompositionMultiset({sg.cyclic(o): 1})
    if g.is_abelian():
        return CompositionMultiset.abelian(o)
    n = g.degree
    moved = [orb for orb in g.orbits() if len(orb) > 1]
    if len(moved) > 1 or len(moved[0]) < n:
        orb = max(moved, key=len)
        img = restriction(g, orb, seed=budget.seed)
        if img.kernel.order() == 1:
            return _composition(img.image, budget, rng)
        return _composition(img.kernel, budget, rng) + _composition(img.image, budget, rng)
    system = block_system(g)
    if system:
        img = block_action(g, system, seed=budget.seed)
        return _composition(img.kernel, budget, rng) + _composition(img.image, budget, rng)
    d = derived_subgroup(g)
    if d.order() < o:
        return _composition(d, budget, rng) + CompositionMultiset.abelian(o // d.order())
    # perfect and primitive
    mins = minimal_normal_subgroups(g, budget)
    m = mins[0].subgroup
    if m.order() == o:
        return CompositionMultiset({_identify_by_order(g, budget): 1}, verified=mins.complete)
    ga = pointwise_stabilizer(g, [0])
    ma = pointwise_stabilizer(m, [0])
    top = _composition(ga, budget, rng) - _composition(ma, budget, rng)
    return _composition(m, budget, rng) + top


def composition_multiset(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> CompositionMultiset:
    """Composition factors of ``g`` (with multiplicity)."""
    cm = _composition(g, budget, random.Random(budget.seed))
    if cm.order() != g.order():
        raise StructureError("composition factor orders do not multiply to the group order")
    return cm


def simple_sections(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> SectionSet:
    ids: set[SimpleGroupId] = set()
    complete = True
    cm = composition_multiset(g, budget)
    for ident in cm.support():
        secs, ok = sg.section_set(ident)
        ids |= secs
        complete = complete and ok
    return SectionSet(frozenset(ids), complete and cm.verified)


def is_soluble(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> bool:
    by_factors = composition_multiset(g, budget).is_soluble()
    by_series = derived_series(g)[-1].order() == 1
    if by_factors != by_series:
        raise StructureError("composition factors and derived series disagree on solubility")
    return by_factors


def normal_subgroups(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> tuple[list[PermGroup], bool]:
    """All normal subgroups, as joins of normal closures of class representatives."""
    cls = element_classes(g, g, budget)
    reps = [cls.element(i) for i in cls.reps]
    lattice: list[PermGroup] = []
    keys: dict[frozenset, int] = {}

    def key_of(n: PermGroup) -> frozenset:
        return frozenset(i for i, r in enumerate(reps) if n.contains_array(r))

    def add(n: PermGroup) -> bool:
        k = key_of(n)
        if k in keys:
            return False
        keys[k] = len(lattice)
        lattice.append(n)
        return True

    add(trivial_group(g.degree))
    for r in reps[1:]:
        add(normal_closure_arrays(g, [r]))
    i = 0
    complete = True
    while i < len(lattice):
        for j in range(i):
            a, b = lattice[i], lattice[j]
            if is_subgroup(a, b) or is_subgroup(b, a):
                continue
            add(normal_closure_arrays(g, list(a.gen_arrays) + list(b.gen_arrays)))
            if len(lattice) > budget.lattice_limit:
                complete = False
                break
        if not complete:
            break
        i += 1
    lattice.sort(key=lambda n: n.order())
    return lattice, complete


def simple_quotients(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> QuotientSet:
    """Simple groups ``g/N`` for ``N`` maximal normal in ``g``."""
    o = g.order()
    if o == 1:
        return QuotientSet(frozenset(), True)
    d = derived_subgroup(g)
    out = {sg.cyclic(p) for p in prime_divisors(o // d.order())} if d.order() < o else set()
    if d.order() == 1:
        return QuotientSet(frozenset(out), True)
    try:
        lattice, complete = normal_subgroups(g, budget)
    except BudgetExceeded:
        return QuotientSet(frozenset(out), False)
    proper = [n for n in lattice if n.order() < o]
    for n in proper:
        if any(m.order() > n.order() and is_subgroup(n, m) for m in proper):
            continue
        q = o // n.order()
        if is_prime(q):
            out.add(sg.cyclic(q))
            continue
        img = quotient_group(g, n, budget)
        out.add(_identify_by_order(img.image, budget))
    return QuotientSet(frozenset(out), complete)


def quotient_multiset_identity(g: PermGroup, n: PermGroup, budget: Budget = DEFAULT_BUDGET
                               ) -> tuple[CompositionMultiset, CompositionMultiset, bool]:
    """``[n]``, ``[g/n]`` (computed on a faithful image of the quotient) and whether ``[g] = [n][g/n]``."""
    if not is_subgroup(n, g) or not is_normal(n, g):
        raise StructureError("n is not a normal subgroup of g")
    cn = composition_multiset(n, budget)
    img = quotient_group(g, n, budget)
    cq = composition_multiset(img.image, budget)
    cg = composition_multiset(g, budget)
    return cn, cq, cg == cn + cq
