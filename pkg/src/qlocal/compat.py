"""Compatibility of permutation groups: necessary conditions, witnesses and constructions.

A compatibility problem is a group ``H`` with isomorphic subgroups ``A`` and
``B`` and an isomorphism ``phi: A -> B``.  ``H`` acts right-regularly on two
copies of itself (``2|H|`` points, copy ``c`` occupying ``c*|H| .. (c+1)*|H|-1``);
a witness is a permutation ``g`` of those points with ``A^g = B = H ∩ H^g``.
The group ``G = <H, g>`` then acts arc-transitively on the orbital digraph of
``(H, Hg)`` on the cosets of ``H``, with in- and out-local actions ``H`` on
``H/A`` and ``H/B``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .actions import DEFAULT_MAX_INDEX, ActionImage, IndexTooLarge, coset_action
from .digraphs import Digraph, LocalActionReport, PermIsoCertificate, local_action, orbital_digraph, perm_isomorphic
from .group import GroupError, PermGroup, is_normal, is_subgroup, subgroup_equal, trivial_group
from .perm import Permutation, inverse_array, point_dtype
from .regular import RegularGroup, from_table, regular_embedding
from .structure import (DEFAULT_BUDGET, Budget, BudgetExceeded, CompositionMultiset, composition_multiset,
                        is_soluble, quotient_group, simple_quotients, simple_sections)
from .arith import prime_divisors

PHI_TABLE_LIMIT = 5000
BACKTRACK_LIMIT = 24


class CompatError(GroupError):
    pass


class WitnessNotFound(CompatError):
    """The search for a conjugating element ran out of budget."""


class NotAHomomorphism(CompatError):
    pass


# -- isomorphisms between subgroups ------------------------------------------------------

@dataclass
class IsoTable:
    """A bijection ``A -> B`` between subgroups of a regular group, as element indices."""

    reg: RegularGroup
    domain: np.ndarray  # sorted element indices of A
    image: np.ndarray  # sorted element indices of B
    table: dict[int, int]

    def __call__(self, i: int) -> int:
        return self.table[i]

    def validate(self) -> None:
        """Exhaustive check that the table is a bijective homomorphism onto B."""
        if len(self.domain) != len(self.image):
            raise CompatError("subgroups have different orders")
        if sorted(self.table) != self.domain.tolist():
            raise CompatError("map is not defined on all of the domain")
        vals = sorted(self.table.values())
        if vals != self.image.tolist():
            raise CompatError("map is not a bijection onto the image subgroup")
        if len(self.domain) > PHI_TABLE_LIMIT:
            raise CompatError(f"subgroup order exceeds the validation limit {PHI_TABLE_LIMIT}")
        E = self.reg.elements
        dom = self.domain
        mapped = np.array([self.table[i] for i in dom.tolist()], dtype=np.int64)
        for a2, b2 in zip(dom.tolist(), mapped.tolist()):
            left = self.reg.index_rows(E[a2][E[dom]])  # a1 * a2
            right = self.reg.index_rows(E[b2][E[mapped]])  # phi(a1) * phi(a2)
            got = np.array([self.table[int(i)] for i in left], dtype=np.int64)
            if not np.array_equal(got, right):
                raise NotAHomomorphism("phi is not a homomorphism")

    @classmethod
    def from_pairs(cls, reg: RegularGroup, a: PermGroup, b: PermGroup,
                   pairs: Sequence[tuple[np.ndarray, np.ndarray]]) -> IsoTable:
        """Extend generator images (or a full table) by closure, then validate."""
        table: dict[int, int] = {0: 0}
        gens = []
        for x, y in pairs:
            i, j = reg.index_of(np.asarray(x)), reg.index_of(np.asarray(y))
            if i in table and table[i] != j:
                raise NotAHomomorphism("phi is not a homomorphism")
            table[i] = j
            gens.append((i, j))
        frontier = list(table.items())
        while frontier:
            new = []
            for x, y in frontier:
                for s, t in gens:
                    xs, yt = reg.product(x, s), reg.product(y, t)
                    if xs in table:
                        if table[xs] != yt:
                            raise NotAHomomorphism("phi is not a homomorphism")
                    else:
                        table[xs] = yt
                        new.append((xs, yt))
            frontier = new
        out = cls(reg, reg.member_indices(a), reg.member_indices(b), table)
        out.validate()
        return out

    @classmethod
    def identity(cls, reg: RegularGroup, a: PermGroup) -> IsoTable:
        dom = reg.member_indices(a)
        return cls(reg, dom, dom.copy(), {i: i for i in dom.tolist()})


def graph_isomorphism(a: PermGroup, b: PermGroup, pairs: Sequence[tuple]) -> bool:
    """Whether ``x -> y`` over ``pairs`` extends to an isomorphism from ``a`` onto ``b``.

    Works for groups too large for a regular representation: the pairs generate
    the graph ``{(x, phi(x))}`` on the disjoint union of the two point sets,
    which has order ``|a|`` exactly when ``phi`` is a well-defined homomorphism.
    """
    n, m = a.degree, b.degree
    if a.order() != b.order():
        return False
    xs = [_arr(x, n) for x, _ in pairs]
    ys = [_arr(y, m) for _, y in pairs]
    if not all(a.contains_array(x) for x in xs) or not all(b.contains_array(y) for y in ys):
        return False
    dt = point_dtype(n + m)
    graph = PermGroup.from_arrays([np.concatenate([x, y + n]).astype(dt) for x, y in zip(xs, ys)] or
                                  [np.arange(n + m, dtype=dt)], n + m)
    if graph.order() != a.order():
        return False
    return PermGroup.from_arrays(xs or [np.arange(n)], n).order() == a.order() and \
        PermGroup.from_arrays(ys or [np.arange(m)], m).order() == b.order()


@dataclass
class CompatProblem:
    h: PermGroup
    a: PermGroup
    b: PermGroup
    phi: IsoTable

    @property
    def reg(self) -> RegularGroup:
        return self.phi.reg

    @classmethod
    def create(cls, h: PermGroup, a: PermGroup, b: PermGroup,
               phi: Sequence[tuple] | None = None, *, reg: RegularGroup | None = None) -> CompatProblem:
        """Problem from generator images (or a full table) of ``phi``; None means the identity map."""
        if not is_subgroup(a, h) or not is_subgroup(b, h):
            raise CompatError("A and B must be subgroups of H")
        if a.order() != b.order():
            raise CompatError("A and B have different orders")
        reg = reg or regular_embedding(h)
        if phi is None:
            if not subgroup_equal(a, b):
                raise CompatError("an explicit isomorphism is needed when A differs from B")
            table = IsoTable.identity(reg, a)
        else:
            pairs = [(_arr(x, h.degree), _arr(y, h.degree)) for x, y in phi]
            table = IsoTable.from_pairs(reg, a, b, pairs)
        return cls(h, a, b, table)

    def to_json(self) -> dict:
        gens = [Permutation(x.images, check=False) for x in self.a.generators]
        pairs = []
        for x in gens:
            i = self.reg.index_of(x.images)
            y = Permutation(self.reg.elements[self.phi(i)], check=False)
            pairs.append([str(x), str(y)])
        return {"group": {"degree": self.h.degree, "generators": [str(s) for s in self.h.generators]},
                "subgroupA": [str(s) for s in self.a.generators],
                "subgroupB": [str(s) for s in self.b.generators],
                "phi": pairs}


def _arr(x, n: int) -> np.ndarray:
    if isinstance(x, Permutation):
        return x.images
    if isinstance(x, str):
        return Permutation.parse(x, n).images
    return np.asarray(x)


def problem_from_json(data: dict | str) -> CompatProblem:
    """Parse ``{group, subgroupA, subgroupB, phi}``; the group is a generator list or a Cayley table."""
    if isinstance(data, str):
        data = json.loads(data)
    for key in ("group", "subgroupA", "subgroupB"):
        if key not in data:
            raise CompatError(f"problem is missing {key!r}")
    grp = data["group"]
    if "table" in grp:
        h = from_table(grp["table"])
        n = h.degree
        table = np.asarray(grp["table"], dtype=np.int64)

        def elem(x) -> np.ndarray:
            return table[:, int(x)].astype(point_dtype(n))
    else:
        n = int(grp["degree"])
        h = PermGroup.from_cycles(grp["generators"], n)

        def elem(x) -> np.ndarray:
            return Permutation.parse(x, n).images
    a = PermGroup.from_arrays([elem(x) for x in data["subgroupA"]] or [np.arange(n)], n)
    b = PermGroup.from_arrays([elem(x) for x in data["subgroupB"]] or [np.arange(n)], n)
    phi = data.get("phi")
    pairs = [(elem(x), elem(y)) for x, y in phi] if phi is not None else None
    return CompatProblem.create(h, a, b, pairs)


# -- searching for g ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HnnBudget:
    samples: int = 100_000
    candidates: int = 8  # successes compared by |<H, g>| when the degree allows
    compare_degree: int = 64
    backtrack_nodes: int = 200_000


@dataclass
class HnnResult:
    g: Permutation | None
    strategy: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.g is not None


class _Doubled:
    """``H`` acting on two copies of itself, with the intersection test for ``H ∩ H^g``."""

    def __init__(self, problem: CompatProblem):
        self.p = problem
        reg = problem.reg
        self.m = m = reg.size
        self.reg = reg
        self._cache: dict[int, np.ndarray] = {}
        self._dcosets: list[tuple[int, int]] | None = None
        self.a_idx = problem.phi.domain
        self.b_idx = problem.phi.image
        self.in_a = np.zeros(m, dtype=bool)
        self.in_a[self.a_idx] = True

    def rho(self, h: int) -> np.ndarray:
        r = self._cache.get(h)
        if r is None:
            r = self.reg.translation(h)
            if self.m <= 4000:
                self._cache[h] = r
        return r

    def doubled(self, h: int) -> np.ndarray:
        r = self.rho(h)
        return np.concatenate([r, r + self.m])

    def conj_member(self, g: np.ndarray, ginv: np.ndarray, h: int) -> int | None:
        """The ``x`` with ``g^-1 rho_h g = rho_x``, or None if the conjugate is not in ``H``."""
        conj = g[self.doubled(h)[ginv]]
        x = int(conj[0])
        if x >= self.m:
            return None
        return x if np.array_equal(conj, self.doubled(x)) else None

    def intersection(self, g: np.ndarray) -> list[int]:
        """Element indices ``x`` with ``rho_x`` in ``H ∩ H^g``, by testing every element of ``H``."""
        ginv = inverse_array(g)
        out = [self.conj_member(g, ginv, h) for h in range(self.m)]
        return sorted(x for x in out if x is not None)

    def double_cosets(self) -> list[tuple[int, int]]:
        """A representative and the size of every double coset ``A h A`` other than ``A`` itself."""
        if self._dcosets is None:
            seen = np.zeros(self.m, dtype=bool)
            seen[self.a_idx] = True
            gens = [self.rho(self.reg.index_of(s)) for s in self.p.a.gen_arrays]
            out = []
            for h in range(self.m):
                if seen[h]:
                    continue
                block = np.zeros(self.m, dtype=bool)
                block[self.rho(h)[self.a_idx]] = True  # A h
                frontier = np.nonzero(block)[0]
                while len(frontier):
                    img = np.concatenate([r[frontier] for r in gens]) if gens else frontier[:0]
                    img = np.unique(img[~block[img]])
                    block[img] = True
                    frontier = img
                seen |= block
                out.append((h, int(block.sum())))
            self._dcosets = out
        return self._dcosets

    def kernel_order(self, g: np.ndarray, *, early: bool = False) -> int:
        """Order of ``K = {h : g^-1 rho_h g in H}`` for ``g`` conjugating ``A`` onto ``B``.

        ``K = H ∩ gHg^-1`` is a subgroup containing ``A``, hence a union of
        double cosets ``AhA``, and ``H ∩ H^g = K^g``; so ``H ∩ H^g = B``
        exactly when ``K = A``.  With ``early`` the count stops at the first
        double coset beyond ``A``.
        """
        ginv = inverse_array(g)
        size = len(self.a_idx)
        for h, n in self.double_cosets():
            if self.conj_member(g, ginv, h) is not None:
                size += n
                if early:
                    return size
        return size

    def group(self) -> PermGroup:
        gens = [self.doubled(self.reg.index_of(s)) for s in self.p.h.gen_arrays]
        dt = point_dtype(2 * self.m)
        return PermGroup.from_arrays([x.astype(dt) for x in gens], 2 * self.m, order=self.m)

    def transported(self, sub_idx_gens: list[int]) -> PermGroup:
        dt = point_dtype(2 * self.m)
        gens = [self.doubled(i).astype(dt) for i in sub_idx_gens] or [np.arange(2 * self.m, dtype=dt)]
        return PermGroup.from_arrays(gens, 2 * self.m)


def _left_cosets(d: _Doubled, idx: np.ndarray) -> list[np.ndarray]:
    """Left cosets ``u*S`` of the subgroup with element indices ``idx``: rows are ``u*s`` for s in idx."""
    labelled = np.zeros(d.m, dtype=bool)
    rows = []
    trans = [d.rho(int(s)) for s in idx]
    for u in range(d.m):
        if labelled[u]:
            continue
        row = np.array([t[u] for t in trans], dtype=np.int64)
        labelled[row] = True
        rows.append(row)
    return rows


def _fast_sigma(d: _Doubled, ucos, wcos, rng, pairing, a_trans, b_trans) -> np.ndarray:
    sigma = np.empty(d.m, dtype=np.int64)
    for j, urow in enumerate(ucos):
        wrow = wcos[pairing[j]]
        if rng is None:
            u0, w0 = int(urow[0]), int(wrow[0])
        else:
            u0, w0 = int(urow[rng.randrange(len(urow))]), int(wrow[rng.randrange(len(wrow))])
        sigma[a_trans[:, u0]] = b_trans[:, w0]
    return sigma


def _block_search(d: _Doubled, budget: HnnBudget, seed: int) -> tuple[list[np.ndarray], dict]:
    rng = random.Random(seed)
    m = d.m
    ucos = _left_cosets(d, d.a_idx)
    wcos = _left_cosets(d, d.b_idx)
    phi = d.p.phi
    # a_trans[k] is right translation by the k-th element of A; b_trans[k] by its phi-image
    a_trans = np.array([d.rho(int(a)) for a in d.a_idx.tolist()], dtype=np.int64)
    b_trans = np.array([d.rho(phi(int(a))) for a in d.a_idx.tolist()], dtype=np.int64)
    found: list[np.ndarray] = []
    best = None
    tried = 0
    r = len(ucos)
    for t in range(budget.samples):
        tried += 1
        canonical = t == 0
        pairs = []
        for c in range(2):
            pi = list(range(r))
            if not canonical:
                rng.shuffle(pi)
            pairs.append(_fast_sigma(d, ucos, wcos, None if canonical else rng, pi, a_trans, b_trans))
        if not canonical and rng.random() < 0.25:
            pairs[1] = pairs[0]
        g = np.concatenate([pairs[0], pairs[1] + m])
        size = d.kernel_order(g, early=True)
        if best is None or size < best:
            best = size
        if size == len(d.a_idx):
            found.append(g)
            if len(found) >= budget.candidates:
                break
    return found, {"samples": tried, "cosets": r, "successes": len(found),
                   "bestIntersection": best}


def _backtrack(d: _Doubled, budget: HnnBudget) -> tuple[np.ndarray | None, dict]:
    """Exhaustive search over ``g`` with ``g^-1 rho_a g = rho_phi(a)`` for the generators ``a`` of A."""
    m2 = 2 * d.m
    gens = [d.reg.index_of(s) for s in d.p.a.gen_arrays]
    xs = [d.doubled(i) for i in gens]
    ys = [d.doubled(d.p.phi(i)) for i in gens]
    nodes = 0

    def propagate(f, used) -> bool:
        changed = True
        while changed:
            changed = False
            for x, y in zip(xs, ys):
                dom = np.nonzero(f >= 0)[0]
                src, dst = x[dom], y[f[dom]]
                known = f[src]
                if ((known >= 0) & (known != dst)).any():
                    return False
                new = known < 0
                if new.any():
                    s, t = src[new], dst[new]
                    if len(np.unique(t)) != len(t) or used[t].any():
                        return False
                    f[s] = t
                    used[t] = True
                    changed = True
        return True

    def rec(f, used):
        nonlocal nodes
        free = np.nonzero(f < 0)[0]
        if not len(free):
            return f if d.kernel_order(f, early=True) == len(d.a_idx) else None
        p = int(free[0])
        for q in np.nonzero(~used)[0].tolist():
            nodes += 1
            if nodes > budget.backtrack_nodes:
                raise _Exhausted
            f2, u2 = f.copy(), used.copy()
            f2[p] = q
            u2[q] = True
            if propagate(f2, u2):
                res = rec(f2, u2)
                if res is not None:
                    return res
        return None

    f = np.full(m2, -1, dtype=np.int64)
    used = np.zeros(m2, dtype=bool)
    try:
        res = rec(f, used)
    except _Exhausted:
        return None, {"nodes": nodes, "exhausted": True}
    return res, {"nodes": nodes, "exhausted": False}


class _Exhausted(Exception):
    pass


def find_hnn_element(problem: CompatProblem, strategy: str = "auto", seed: int = 0,
                     budget: HnnBudget = HnnBudget()) -> HnnResult:
    """Search for ``g`` with ``A^g = B = H ∩ H^g`` on ``H`` x two copies.

    Failure is diagnostic only: it does not show that no such ``g`` exists.
    """
    if strategy not in ("auto", "block", "backtrack"):
        raise CompatError(f"unknown strategy {strategy!r}")
    d = _Doubled(problem)
    diag: dict = {"strategies": []}
    candidates: list[np.ndarray] = []
    if strategy in ("auto", "block"):
        found, info = _block_search(d, budget, seed)
        diag["strategies"].append({"name": "block", **info})
        candidates = found
    if not candidates and strategy in ("auto", "backtrack") and d.m <= BACKTRACK_LIMIT:
        g, info = _backtrack(d, budget)
        diag["strategies"].append({"name": "backtrack", **info})
        if g is not None:
            candidates = [g]
    if not candidates:
        return HnnResult(None, strategy, diag)
    chosen = candidates[0]
    if len(candidates) > 1 and 2 * d.m <= budget.compare_degree:
        base = d.group()
        orders = []
        for g in candidates:
            dt = point_dtype(2 * d.m)
            big = PermGroup.from_arrays(list(base.gen_arrays) + [g.astype(dt)], 2 * d.m)
            orders.append(big.order())
        k = min(range(len(candidates)), key=lambda i: (orders[i], i))
        chosen = candidates[k]
        diag["candidateOrders"] = orders
    name = diag["strategies"][-1]["name"]
    return HnnResult(Permutation(chosen.astype(point_dtype(2 * d.m)), check=False), name, diag)


# -- witnesses ----------------------------------------------------------------------------------

@dataclass
class Witness:
    problem: CompatProblem
    g: Permutation
    h2: PermGroup  # H on the two copies
    checks: dict[str, bool]
    l_minus: ActionImage
    l_plus: ActionImage
    strategy: str = ""
    _big: PermGroup | None = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return self.h2.degree

    @property
    def big_group(self) -> PermGroup:
        """``G = <H, g>``; its chain is only built when its order is requested."""
        if self._big is None:
            self._big = PermGroup.from_arrays(list(self.h2.gen_arrays) + [self.g.images], self.degree)
        return self._big

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self, with_order: bool = True) -> dict:
        out = {"g": str(self.g), "degree": self.degree, "hOrder": self.problem.h.order(),
               "strategy": self.strategy, "checks": dict(self.checks),
               "lMinus": {"degree": self.l_minus.degree, "order": self.l_minus.image.order()},
               "lPlus": {"degree": self.l_plus.degree, "order": self.l_plus.image.order()}}
        if with_order:
            out["bigGroupOrder"] = self.big_group.order()
        return out


EXHAUSTIVE_VERIFY = 2000


def verify_witness(problem: CompatProblem, g: Permutation, *, exhaustive: bool | None = None) -> dict[str, bool]:
    """Check ``(H_-)^g = H_+ = H ∩ H^g``.

    The intersection is computed element by element for ``|H|`` up to
    ``EXHAUSTIVE_VERIFY``, and otherwise through the double cosets of ``A``
    (valid once ``A^g = B`` is established).
    """
    d = _Doubled(problem)
    garr = g.images.astype(np.int64)
    if len(garr) != 2 * d.m:
        raise CompatError("g must act on two copies of H")
    ginv = inverse_array(garr)
    a_gens = [d.reg.index_of(s) for s in problem.a.gen_arrays]
    conj = [d.conj_member(garr, ginv, i) for i in a_gens]
    b_set = set(problem.phi.image.tolist())
    a_to_b = all(x is not None and x in b_set for x in conj)
    if exhaustive is None:
        exhaustive = d.m <= EXHAUSTIVE_VERIFY
    if exhaustive:
        inter_ok = d.intersection(garr) == sorted(b_set)
    else:
        inter_ok = a_to_b and d.kernel_order(garr) == len(d.a_idx)
    return {
        "conjugatesAintoB": a_to_b,
        # equal orders plus containment give (H_-)^g = H_+
        "conjugateEqualsB": a_to_b and len(problem.phi.domain) == len(problem.phi.image),
        "intersectionIsB": inter_ok,
        "degreeIsTwiceH": len(garr) == 2 * d.m,
    }


def build_witness(problem: CompatProblem, *, strategy: str = "auto", seed: int = 0,
                  budget: HnnBudget = HnnBudget(), max_index: int = DEFAULT_MAX_INDEX) -> Witness:
    res = find_hnn_element(problem, strategy, seed, budget)
    if not res.found:
        raise WitnessNotFound(f"no element g found within the search budget: {res.diagnostics}")
    checks = verify_witness(problem, res.g)
    if not all(checks.values()):
        raise CompatError(f"candidate g failed verification: {checks}")
    lm, _ = coset_action(problem.h, problem.a, max_index)
    lp, _ = coset_action(problem.h, problem.b, max_index)
    h2 = _Doubled(problem).group()
    return Witness(problem, res.g, h2, checks, lm, lp, res.strategy)


class DegenerateWitness(CompatError):
    pass


@dataclass
class WitnessDigraph:
    digraph: Digraph
    index: int
    out_report: LocalActionReport
    in_report: LocalActionReport
    out_certificate: PermIsoCertificate
    in_certificate: PermIsoCertificate

    @property
    def ok(self) -> bool:
        return self.out_certificate.verdict == "yes" and self.in_certificate.verdict == "yes"


def witness_digraph(w: Witness, max_index: int = DEFAULT_MAX_INDEX) -> WitnessDigraph:
    """Orbital digraph of ``(H, Hg)`` on the cosets of ``H`` in ``<H, g>``, with its local actions."""
    big = w.big_group
    index = big.order() // w.h2.order()
    if index == 1:
        raise DegenerateWitness("g lies in H: the coset digraph has a single vertex and no non-loop arc")
    if index > max_index:
        raise IndexTooLarge(f"[G:H] = {index} exceeds the limit {max_index}")
    img, space = coset_action(big, w.h2, max_index)
    target = space.locate(w.g)
    gamma = orbital_digraph(img.image, 0, target)
    out_r = local_action(gamma, 0, "out")
    in_r = local_action(gamma, 0, "in")
    out_c = perm_isomorphic(out_r.induced_group, w.l_plus.image)
    in_c = perm_isomorphic(in_r.induced_group, w.l_minus.image)
    return WitnessDigraph(gamma, index, out_r, in_r, out_c, in_c)


# -- regular constructions ----------------------------------------------------------------------

@dataclass
class RegularPairResult:
    problem: CompatProblem
    l_minus: ActionImage
    l_plus: ActionImage
    witness: Witness | None
    checks: dict[str, bool]


def regular_pair_witness(h: PermGroup, a: PermGroup, b: PermGroup, phi: Sequence[tuple] | None = None, *,
                         seed: int = 0, with_witness: bool = True,
                         budget: HnnBudget = HnnBudget(candidates=1)) -> RegularPairResult:
    """Regular groups ``h/a`` and ``h/b`` for isomorphic normal subgroups ``a``, ``b``."""
    if not is_normal(a, h) or not is_normal(b, h):
        raise CompatError("A and B must be normal in H")
    problem = CompatProblem.create(h, a, b, phi)
    lm, _ = coset_action(h, a)
    lp, _ = coset_action(h, b)
    checks = {
        "lMinusRegular": lm.image.order() == lm.degree and lm.image.is_transitive(),
        "lPlusRegular": lp.image.order() == lp.degree and lp.image.is_transitive(),
        "coreMinusIsA": subgroup_equal(lm.kernel, a),
        "corePlusIsB": subgroup_equal(lp.kernel, b),
    }
    witness = None
    if with_witness:
        witness = build_witness(problem, seed=seed, budget=budget)
        checks.update(witness.checks)
    return RegularPairResult(problem, lm, lp, witness, checks)


@dataclass
class SubnormalResult:
    problem: CompatProblem
    predicted: CompositionMultiset  # union of the series factors
    quotient_minus: CompositionMultiset
    quotient_plus: CompositionMultiset
    checks: dict[str, bool]


def subnormal_series_witness(l: PermGroup, series: Sequence[PermGroup],
                             budget: Budget = DEFAULT_BUDGET) -> SubnormalResult:
    """``H = X_1 x ... x X_n`` with ``H_- = X_1 x ... x X_(n-1) x 1`` and ``H_+ = 1 x X_1 x ... x X_(n-1)``.

    ``series`` runs ``1 = X_0 <= X_1 <= ... <= X_n = L``, each normal in the next.
    """
    from .catalog import block_embed
    xs = list(series)
    if len(xs) < 2:
        raise CompatError("a series needs at least the trivial group and L")
    if xs[0].order() != 1 or not subgroup_equal(xs[-1], l):
        raise CompatError("series must start at the trivial group and end at L")
    for lo, hi in zip(xs, xs[1:]):
        if not is_subgroup(lo, hi) or not is_normal(lo, hi):
            raise CompatError("series is not subnormal")
    n = len(xs) - 1
    deg = l.degree
    total = n * deg
    h_gens = [block_embed(s, i, deg, total) for i in range(n) for s in xs[i + 1].gen_arrays]
    order = 1
    for x in xs[1:]:
        order *= x.order()
    h = PermGroup.from_arrays(h_gens or [np.arange(total)], total, order=order)
    minus_gens = [block_embed(s, i, deg, total) for i in range(n - 1) for s in xs[i + 1].gen_arrays]
    plus_gens = [block_embed(s, i + 1, deg, total) for i in range(n - 1) for s in xs[i + 1].gen_arrays]
    sub_order = order // l.order()
    ident = [np.arange(total, dtype=point_dtype(total))]
    a = PermGroup.from_arrays(minus_gens or ident, total, order=sub_order)
    b = PermGroup.from_arrays(plus_gens or ident, total, order=sub_order)
    phi = list(zip(minus_gens, plus_gens))
    problem = CompatProblem.create(h, a, b, phi)
    qm = quotient_group(h, a, budget)
    qp_ = quotient_group(h, b, budget)
    cm = composition_multiset(qm.image, budget)
    cp = composition_multiset(qp_.image, budget)
    predicted = CompositionMultiset()
    factor_order = 1
    for lo, hi in zip(xs, xs[1:]):
        predicted = predicted + (composition_multiset(hi, budget) - composition_multiset(lo, budget))
        factor_order *= hi.order() // lo.order()
    checks = {
        "minusQuotientOrder": qm.image.order() == l.order(),
        "minusQuotientFactors": cm == composition_multiset(l, budget),
        "plusQuotientOrder": qp_.image.order() == factor_order,
        "plusQuotientFactors": cp == predicted,
        "phiValid": True,  # IsoTable validation raises otherwise
    }
    return SubnormalResult(problem, predicted, cm, cp, checks)


# -- necessary conditions --------------------------------------------------------------------------

@dataclass
class Verdict:
    ok: bool
    complete: bool = True
    applicable: bool = True
    evidence: dict = field(default_factory=dict)


@dataclass
class NecessaryReport:
    degree_equal: Verdict
    orbit_count_equal: Verdict
    sections_equal: Verdict
    primes_equal: Verdict
    soluble_agree: Verdict
    common_simple_quotient: Verdict

    def verdicts(self) -> dict[str, Verdict]:
        return {"degreeEqual": self.degree_equal, "orbitCountEqual": self.orbit_count_equal,
                "sectionsEqual": self.sections_equal, "primesEqual": self.primes_equal,
                "solubleAgree": self.soluble_agree, "commonSimpleQuotient": self.common_simple_quotient}

    @property
    def passed(self) -> bool:
        return all(v.ok for v in self.verdicts().values())

    @property
    def certified_incompatible(self) -> bool:
        return any(not v.ok and v.complete for v in self.verdicts().values())

    def failures(self) -> list[str]:
        return [k for k, v in self.verdicts().items() if not v.ok]

    def to_json(self) -> dict:
        return {k: {"ok": v.ok, "complete": v.complete, "applicable": v.applicable, **v.evidence}
                for k, v in self.verdicts().items()} | {"passed": self.passed,
                                                         "certifiedIncompatible": self.certified_incompatible}


def necessary_compat_check(l_minus: PermGroup, l_plus: PermGroup,
                           budget: Budget = DEFAULT_BUDGET) -> NecessaryReport:
    """Conditions every compatible pair satisfies; a failed complete condition certifies incompatibility."""
    deg = Verdict(l_minus.degree == l_plus.degree, evidence={"values": [l_minus.degree, l_plus.degree]})
    om, op = len(l_minus.orbits()), len(l_plus.orbits())
    orb = Verdict(om == op, evidence={"values": [om, op]})
    sm, sp = simple_sections(l_minus, budget), simple_sections(l_plus, budget)
    sec_complete = sm.complete and sp.complete
    sec = Verdict(sm.ids == sp.ids, sec_complete or sm.ids == sp.ids,
                  evidence={"values": [sm.names(), sp.names()]})
    pm, pp = prime_divisors(l_minus.order()) if l_minus.order() > 1 else [], \
        prime_divisors(l_plus.order()) if l_plus.order() > 1 else []
    pri = Verdict(pm == pp, evidence={"values": [pm, pp]})
    solm, solp = is_soluble(l_minus, budget), is_soluble(l_plus, budget)
    sol = Verdict(solm == solp, evidence={"values": [solm, solp]})
    applicable = (l_minus.is_transitive() and l_plus.is_transitive()
                  and l_minus.order() > 1 and l_plus.order() > 1)
    if applicable:
        try:
            qm, qp_ = simple_quotients(l_minus, budget), simple_quotients(l_plus, budget)
        except BudgetExceeded:
            csq = Verdict(True, complete=False, evidence={"reason": "budget exceeded"})
        else:
            common = qm.ids & qp_.ids
            complete = qm.complete and qp_.complete
            csq = Verdict(bool(common) or not complete, complete or bool(common),
                          evidence={"values": [qm.names(), qp_.names()],
                                    "common": sorted(i.name for i in common)})
    else:
        csq = Verdict(True, applicable=False, evidence={"reason": "needs two nontrivial transitive groups"})
    return NecessaryReport(deg, orb, sec, pri, sol, csq)
