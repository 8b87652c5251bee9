"""Quasiprimitive groups: recognition, the eight quasiprimitive types and their degree rules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actions import coset_action
from .arith import is_prime, prime_power
from .group import GroupError, PermGroup, join, pointwise_stabilizer
from .perm import point_dtype
from .simple import SimpleGroupId, UnknownSimpleGroup, catalog_rows, lookup, out_order
from .structure import (DEFAULT_BUDGET, Budget, CompositionMultiset, composition_multiset, core,
                        minimal_normal_subgroups)

QP_TYPES = ("HA", "HS", "HC", "TW", "AS", "SD", "CD", "PA")

QUOTIENT_ONLY = frozenset({("HS", "AS"), ("HC", "TW"), ("HA", "AS"), ("HA", "PA")})
COMPATIBLE_QUOTIENT = frozenset({("HS", "AS"), ("HC", "TW")})


class QPError(GroupError):
    pass


@dataclass
class QPVerdict:
    quasiprimitive: bool
    complete: bool  # the minimal normal search was complete
    intransitive_normal: PermGroup | None = None

    def __bool__(self) -> bool:
        return self.quasiprimitive


def is_quasiprimitive(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> QPVerdict:
    """Every nontrivial normal subgroup contains a minimal one, so checking those suffices."""
    if not g.is_transitive():
        raise QPError("quasiprimitivity needs a transitive group")
    if g.order() == 1:
        return QPVerdict(True, True)
    return _verdict(minimal_normal_subgroups(g, budget))


def _verdict(mins) -> QPVerdict:
    for w in mins:
        if not w.subgroup.is_transitive():
            return QPVerdict(False, True, w.subgroup)
    return QPVerdict(True, mins.complete)


@dataclass
class TypeEvidence:
    socle: PermGroup
    factor: SimpleGroupId | None
    k: int
    minimal_normal_count: int
    socle_regular: bool
    stab_projections: list[int] = field(default_factory=list)  # |pi_i(M_w)| per simple factor
    stab_order: int | None = None  # |M_w| for a unique nonabelian minimal normal M
    provisional: bool = False

    def report(self, tag: str) -> dict:
        return {"type": tag, "socleOrder": self.socle.order(),
                "T": self.factor.name if self.factor else None, "k": self.k,
                "minimalNormalCount": self.minimal_normal_count, "regularSocle": self.socle_regular,
                "provisional": self.provisional}


def _power_of(cm: CompositionMultiset) -> tuple[SimpleGroupId, int]:
    items = cm.items()
    if len(items) != 1:
        raise QPError(f"minimal normal subgroup has mixed composition factors {cm}")
    return items[0]


def classify_qp(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> tuple[str, TypeEvidence]:
    if not g.is_transitive():
        raise QPError("quasiprimitivity needs a transitive group")
    if g.order() == 1:
        raise QPError("the trivial group has no type")
    mins = minimal_normal_subgroups(g, budget)
    if not _verdict(mins):
        raise QPError("group is not quasiprimitive")
    provisional = not mins.complete
    n = g.degree
    if len(mins) == 2:
        m1, m2 = mins[0].subgroup, mins[1].subgroup
        cm = composition_multiset(m1, budget)
        t, j = _power_of(cm)
        soc = join(m1, m2)
        ev = TypeEvidence(soc, t, 2 * j, 2, soc.order() == n,
                          provisional=provisional or not cm.verified)
        return ("HS" if j == 1 else "HC"), ev
    if len(mins) != 1:
        raise QPError(f"a quasiprimitive group has one or two minimal normal subgroups, found {len(mins)}")
    m = mins[0].subgroup
    if m.is_abelian():
        p, e = prime_power(m.order())
        ev = TypeEvidence(m, lookup(f"C{p}"), e, 1, m.order() == n, provisional=provisional)
        return "HA", ev
    cm = composition_multiset(m, budget)
    t, k = _power_of(cm)
    provisional = provisional or not cm.verified
    regular = m.order() == n
    if k == 1:
        return "AS", TypeEvidence(m, t, 1, 1, regular, provisional=provisional)
    if regular:
        return "TW", TypeEvidence(m, t, k, 1, True, provisional=provisional)
    factors = minimal_normal_subgroups(m, budget)
    if len(factors) != k:
        raise QPError(f"socle {t.name}^{k} split into {len(factors)} simple factors")
    provisional = provisional or not factors.complete
    m_w = pointwise_stabilizer(m, [0])
    stab = m_w.order()
    proj = []
    for i in range(k):
        others = [f.subgroup for j, f in enumerate(factors) if j != i]
        c = others[0]
        for o in others[1:]:
            c = join(c, o)
        # pi_i(M_w) = M_w C_i / C_i, of order |M_w| / |M_w ∩ C_i| and M_w ∩ C_i = (C_i)_w
        proj.append(stab // pointwise_stabilizer(c, [0]).order())
    ev = TypeEvidence(m, t, k, 1, False, proj, stab, provisional)
    if all(p == t.order for p in proj):
        return ("SD" if stab == t.order else "CD"), ev
    return "PA", ev


def classification_report(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> dict:
    tag, ev = classify_qp(g, budget)
    return ev.report(tag)


# -- degree rules --------------------------------------------------------------------------------

@dataclass
class Feasibility:
    feasible: bool
    params: list[dict]
    note: str = ""


def _simple_powers(n: int, min_exp: int = 1) -> list[tuple[SimpleGroupId, int]]:
    out = []
    for row in catalog_rows():
        t = row.ident.order
        if t ** min_exp > n:
            break
        e, p = 1, t
        while p < n:
            p *= t
            e += 1
        if p == n and e >= min_exp:
            out.append((row.ident, e))
    return out


def degree_feasible(tag: str, n: int, max_params: int = 20) -> Feasibility:
    """Whether degree ``n`` fits the degree rule of type ``tag``, with witnessing parameters.

    Rules (socle ``T^k``): HA ``p^k``; HS ``|T|``; HC ``|T|^(k/2)``, ``k >= 4``;
    TW ``|T|^k``, ``k >= 2``; AS unconstrained; SD ``|T|^(k-1)``, ``k >= 2``;
    CD ``|T|^(k-k/l)``, ``2 <= l | k``; PA ``m*x^k``, ``m >= 1``, ``x >= 5``, ``k >= 2``.
    """
    if tag not in QP_TYPES:
        raise QPError(f"unknown type {tag!r}")
    if n < 1:
        return Feasibility(False, [])
    params: list[dict] = []
    if tag == "HA":
        pp = prime_power(n)
        if pp:
            params.append({"p": pp[0], "k": pp[1]})
    elif tag == "AS":
        return Feasibility(True, [], "unconstrained")
    elif tag == "HS":
        params = [{"T": t.name, "k": 2} for t, e in _simple_powers(n) if e == 1]
    elif tag == "HC":
        params = [{"T": t.name, "k": 2 * e} for t, e in _simple_powers(n, 2)]
    elif tag == "TW":
        params = [{"T": t.name, "k": e} for t, e in _simple_powers(n, 2)]
    elif tag == "SD":
        params = [{"T": t.name, "k": e + 1} for t, e in _simple_powers(n)]
    elif tag == "CD":
        for t, e in _simple_powers(n):
            # e = k - k/l = s(l - 1) with k = l*s
            for l in range(2, e + 2):
                if e % (l - 1) == 0:
                    s = e // (l - 1)
                    params.append({"T": t.name, "k": l * s, "l": l})
    elif tag == "PA":
        x = 5
        while x * x <= n and len(params) < max_params:
            k, p = 2, x * x
            while p <= n:
                if n % p == 0:
                    params.append({"m": n // p, "x": x, "k": k})
                k += 1
                p *= x
            x += 1
    return Feasibility(bool(params), params[:max_params])


def evidence_degree_consistent(tag: str, ev: TypeEvidence, n: int) -> bool:
    """The degree rule for ``tag`` evaluated at the evidence's own ``(T, k)``."""
    t = ev.factor.order if ev.factor else None
    k = ev.k
    if tag == "HA":
        return n == t ** k and ev.socle_regular
    if tag == "HS":
        return k == 2 and n == t
    if tag == "HC":
        return k >= 4 and k % 2 == 0 and n == t ** (k // 2)
    if tag == "TW":
        return k >= 2 and n == t ** k
    if tag == "AS":
        return k == 1
    if tag == "SD":
        return k >= 2 and n == t ** (k - 1)
    if tag == "CD":
        return k >= 2 and any(k % l == 0 and n == t ** (k - k // l) for l in range(2, k + 1))
    if tag == "PA":
        return k >= 2 and any(n % x ** k == 0 for x in range(5, int(round(n ** (1 / k))) + 2))
    raise QPError(f"unknown type {tag!r}")


def pair_type_allowed(t_g: str, t_h: str, context: str) -> bool:
    """Type pairs permitted for a group and a quotient of it of the same degree.

    ``quotient-only``: ``H`` is a proper quotient of ``G``.
    ``compatible-quotient``: additionally ``G`` and ``H`` are compatible.
    """
    for t in (t_g, t_h):
        if t not in QP_TYPES:
            raise QPError(f"unknown type {t!r}")
    if context == "quotient-only":
        return (t_g, t_h) in QUOTIENT_ONLY
    if context == "compatible-quotient":
        return (t_g, t_h) in COMPATIBLE_QUOTIENT
    raise QPError(f"unknown context {context!r}")


def out_bound_check(t: SimpleGroupId | str, n: int) -> bool:
    """Whether ``n > |Out(T)|``."""
    ident = lookup(t) if isinstance(t, str) else t
    if ident.is_abelian:
        raise QPError("the bound concerns nonabelian simple groups")
    return n > out_order(ident)


@dataclass
class SocleStabilizer:
    socle: CompositionMultiset
    stabilizer: CompositionMultiset

    @property
    def holds(self) -> bool:
        return not self.socle <= self.stabilizer


def socle_stabilizer_multisets(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> SocleStabilizer:
    tag, ev = classify_qp(g, budget)
    if tag not in ("AS", "PA"):
        raise QPError(f"expected a group of type AS or PA, got {tag}")
    return SocleStabilizer(composition_multiset(ev.socle, budget),
                           composition_multiset(pointwise_stabilizer(g, [0]), budget))


def socle_in_stabilizer_check(g: PermGroup, budget: Budget = DEFAULT_BUDGET) -> bool:
    """Whether ``[soc(G)]`` is not contained in ``[G_v]``."""
    return socle_stabilizer_multisets(g, budget).holds


# -- pairs of groups ------------------------------------------------------------------------------

@dataclass
class QuotientTypes:
    g_type: str
    h_type: str
    kernel_order: int
    allowed: bool
    provisional: bool


def quotient_pair_types(g: PermGroup, x: PermGroup, budget: Budget = DEFAULT_BUDGET) -> QuotientTypes | None:
    """Types of ``G`` and of its coset image on ``G/X`` when both are quasiprimitive of the same degree.

    Returns None when the pair is out of scope: ``X`` core-free, a different
    degree, or a non-quasiprimitive side.
    """
    if g.order() // x.order() != g.degree:
        return None
    img, _ = coset_action(g, x, budget.max_index, seed=budget.seed)
    if img.kernel.order() == 1:
        return None
    h = img.image
    vg, vh = is_quasiprimitive(g, budget), is_quasiprimitive(h, budget)
    if not vg or not vh:
        return None
    tg, eg = classify_qp(g, budget)
    th, eh = classify_qp(h, budget)
    return QuotientTypes(tg, th, img.kernel.order(), pair_type_allowed(tg, th, "quotient-only"),
                         eg.provisional or eh.provisional or not vg.complete or not vh.complete)


def quotient_pairs_in(g: PermGroup, budget: Budget = DEFAULT_BUDGET, limit: int = 6000) -> list[QuotientTypes]:
    """Every subgroup class of index ``deg(G)`` with nontrivial core, as a quotient pair."""
    from .subgroups import subgroup_classes
    target = g.order() // g.degree
    out = []
    for cls in subgroup_classes(g, limit):
        if cls.order != target:
            continue
        if core(g, cls.group, budget).order() == 1:
            continue
        res = quotient_pair_types(g, cls.group, budget)
        if res is not None:
            out.append(res)
    return out


@dataclass
class CompatibleTypes:
    applicable: bool
    minus_type: str | None = None
    plus_type: str | None = None
    allowed: bool | None = None
    reason: str = ""


def compatible_pair_types(l_minus: PermGroup, l_plus: PermGroup, budget: Budget = DEFAULT_BUDGET) -> CompatibleTypes:
    """Types of a compatible pair of quasiprimitive groups that are certainly not isomorphic.

    Non-isomorphism is only certified through different orders; the larger
    group plays the role of the group with the other as a proper quotient.
    """
    for l in (l_minus, l_plus):
        if not l.is_transitive() or not is_quasiprimitive(l, budget):
            return CompatibleTypes(False, reason="not quasiprimitive")
    if l_minus.order() == l_plus.order():
        return CompatibleTypes(False, reason="equal orders: non-isomorphism not certified")
    tm, _ = classify_qp(l_minus, budget)
    tp, _ = classify_qp(l_plus, budget)
    big, small = (tm, tp) if l_minus.order() > l_plus.order() else (tp, tm)
    return CompatibleTypes(True, tm, tp, pair_type_allowed(big, small, "compatible-quotient"))


# -- linear groups -------------------------------------------------------------------------------------

def _vectors(d: int, p: int) -> np.ndarray:
    """Nonzero vectors of GF(p)^d, vector ``i`` having digits of ``i + 1`` in base ``p``."""
    idx = np.arange(1, p ** d)
    return np.stack([(idx // p ** j) % p for j in range(d)], axis=1)


def _index_of(vecs: np.ndarray, p: int) -> np.ndarray:
    d = vecs.shape[1]
    return (vecs * (p ** np.arange(d))).sum(axis=1) - 1


def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    from .arith import prime_divisors
    for w in range(2, p):
        if all(pow(w, (p - 1) // q, p) != 1 for q in prime_divisors(p - 1)):
            return w
    raise QPError(f"no primitive root modulo {p}")


def general_linear_group(d: int, p: int) -> PermGroup:
    """GL(d, p) acting on the ``p^d - 1`` nonzero vectors (row vectors times matrices)."""
    if not is_prime(p):
        raise QPError(f"{p} is not prime")
    vecs = _vectors(d, p)
    n = len(vecs)
    mats = []
    for i in range(d):
        for j in range(d):
            if i != j:
                m = np.eye(d, dtype=np.int64)
                m[i, j] = 1
                mats.append(m)
    w = _primitive_root(p)
    if w != 1:
        m = np.eye(d, dtype=np.int64)
        m[0, 0] = w
        mats.append(m)
    dt = point_dtype(n)
    gens = [_index_of((vecs @ m) % p, p).astype(dt) for m in mats] or [np.arange(n, dtype=dt)]
    order = 1
    for i in range(d):
        order *= p ** d - p ** i
    return PermGroup.from_arrays(gens, n, order=order, name=f"GL({d},{p})")


def is_irreducible(x: PermGroup, d: int, p: int) -> bool:
    """No proper nonzero invariant subspace: the span of every orbit is the whole space."""
    vecs = _vectors(d, p)
    full = p ** d
    for orb in x.orbits():
        span = {tuple([0] * d)}
        frontier = [tuple(int(c) for c in vecs[i]) for i in orb]
        gens = list(frontier)
        while frontier:
            new = []
            for v in frontier:
                if v in span:
                    continue
                span.add(v)
                for u in gens:
                    s = tuple((a + b) % p for a, b in zip(v, u))
                    if s not in span:
                        new.append(s)
            frontier = new
        if len(span) < full:
            return False
    return True


@dataclass
class CompFactorProbe:
    d: int
    p: int
    max_count: int
    irreducible_classes: int
    counts: dict[int, int]  # order of subgroup -> count of C_p factors (max over classes of that order)

    @property
    def holds(self) -> bool:
        return self.max_count <= self.d - 1


def compfactors_bound_probe(d: int, p: int, budget: Budget = DEFAULT_BUDGET, limit: int = 6000) -> CompFactorProbe:
    """Largest number of composition factors of order ``p`` over irreducible subgroups of GL(d, p)."""
    from .subgroups import subgroup_classes
    gl = general_linear_group(d, p)
    if gl.order() > limit:
        raise QPError(f"|GL({d},{p})| = {gl.order()} exceeds the enumeration limit {limit}")
    cp = lookup(f"C{p}")
    best = 0
    count = 0
    counts: dict[int, int] = {}
    for cls in subgroup_classes(gl, limit):
        if cls.order == 1 or not is_irreducible(cls.group, d, p):
            continue
        count += 1
        c = composition_multiset(cls.group, budget).multiplicity(cp)
        counts[cls.order] = max(counts.get(cls.order, 0), c)
        best = max(best, c)
    return CompFactorProbe(d, p, best, count, counts)


__all__ = [
    "QP_TYPES", "QPError", "QPVerdict", "TypeEvidence", "is_quasiprimitive", "classify_qp",
    "classification_report", "degree_feasible", "evidence_degree_consistent", "pair_type_allowed",
    "out_bound_check", "socle_in_stabilizer_check", "socle_stabilizer_multisets", "quotient_pair_types",
    "quotient_pairs_in", "compatible_pair_types", "general_linear_group", "is_irreducible",
    "compfactors_bound_probe", "CompFactorProbe", "Feasibility", "UnknownSimpleGroup",
]
