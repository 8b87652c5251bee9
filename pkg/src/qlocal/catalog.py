"""Named permutation groups and constructions: products, wreath products, holomorph-type groups.

Point numbering is deterministic.  Products and imprimitive wreath products
place factor ``i`` on the block ``i*d .. (i+1)*d - 1``.  Product-action wreath
products act on tuples in mixed radix, most significant coordinate first:
``(x_0, ..., x_(k-1))`` is point ``sum(x_i * d**(k-1-i))``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from math import factorial
from typing import Callable, Sequence

import numpy as np

from .actions import coset_action
from .group import GroupError, PermGroup, is_subgroup
from .perm import Permutation, point_dtype
from .regular import RegularGroup
from .simple import SimpleGroupId, catalog_rows

DEGREE_LIMIT = 50_000
SPEC_VERSION = 1


class CatalogError(GroupError):
    pass


# -- elementary families --------------------------------------------------------------------

def cyclic_group(n: int) -> PermGroup:
    return PermGroup.from_arrays([np.roll(np.arange(n), -1)], n, order=n, name=f"C{n}")


def symmetric_group(n: int) -> PermGroup:
    if n == 1:
        return PermGroup.from_arrays([np.arange(1)], 1, order=1, name="S1")
    gens = [Permutation.from_cycles([[0, 1]], n).images, np.roll(np.arange(n), -1)]
    return PermGroup.from_arrays(gens, n, order=factorial(n), name=f"S{n}")


def alternating_group(n: int) -> PermGroup:
    if n < 3:
        return PermGroup.from_arrays([np.arange(n)], n, order=1, name=f"A{n}")
    cyc = list(range(n)) if n % 2 else list(range(1, n))
    gens = [Permutation.from_cycles([[0, 1, 2]], n), Permutation.from_cycles([cyc], n)]
    return PermGroup(gens, n, order=factorial(n) // 2, name=f"A{n}")


def dihedral_group(n: int) -> PermGroup:
    """Symmetries of an ``n``-gon acting on its ``n`` vertices (order ``2n``)."""
    if n < 3:
        raise CatalogError("dihedral groups need at least 3 points")
    rot = np.roll(np.arange(n), -1)
    ref = (-np.arange(n)) % n
    return PermGroup.from_arrays([rot, ref], n, order=2 * n, name=f"D{n}")


@lru_cache(maxsize=1)
def _named_table() -> dict[str, dict]:
    data = json.loads(resources.files("qlocal").joinpath("data/named_groups.json").read_text())
    out = {}
    for row in data["groups"]:
        for key in [row["name"], *row.get("aliases", [])]:
            out[key] = row
    return out


def named_group(name: str) -> PermGroup:
    """``A<n>``, ``S<n>``, ``C<n>``, ``D<n>`` or an entry of the shipped generator table."""
    m = re.fullmatch(r"([ASCD])(\d+)", name)
    if m:
        kind, n = m.group(1), int(m.group(2))
        if n < 1 or n > DEGREE_LIMIT:
            raise CatalogError(f"degree {n} out of range")
        return {"A": alternating_group, "S": symmetric_group, "C": cyclic_group, "D": dihedral_group}[kind](n)
    row = _named_table().get(name)
    if row is None:
        raise CatalogError(f"unknown group name {name!r}")
    return PermGroup.from_cycles(row["generators"], row["degree"], order=row["order"], name=row["name"])


# -- products ----------------------------------------------------------------------------------

def block_embed(x: np.ndarray, block: int, deg: int, total: int) -> np.ndarray:
    """Permutation of ``total`` points acting as ``x`` on block ``block`` of size ``deg``."""
    out = np.arange(total, dtype=point_dtype(total))
    off = block * deg
    out[off:off + deg] = np.asarray(x) + off
    return out


def direct_product(groups: Sequence[PermGroup]) -> PermGroup:
    """Intransitive direct product, factors on consecutive blocks."""
    total = sum(g.degree for g in groups)
    if total > DEGREE_LIMIT:
        raise CatalogError(f"degree {total} exceeds {DEGREE_LIMIT}")
    dt = point_dtype(total)
    gens = []
    off = 0
    order = 1
    for g in groups:
        for s in g.gen_arrays:
            a = np.arange(total, dtype=dt)
            a[off:off + g.degree] = s + off
            gens.append(a)
        off += g.degree
        order *= g.order()
    name = "x".join(g.name or "?" for g in groups)
    return PermGroup.from_arrays(gens or [np.arange(total, dtype=dt)], total, order=order, name=name)


def wreath_imprimitive(base: PermGroup, top: PermGroup) -> PermGroup:
    """``base wr top`` on ``k*d`` points, ``top`` permuting the ``k`` blocks."""
    d, k = base.degree, top.degree
    total = d * k
    if total > DEGREE_LIMIT:
        raise CatalogError(f"degree {total} exceeds {DEGREE_LIMIT}")
    gens = [block_embed(s, i, d, total) for i in range(k) for s in base.gen_arrays]
    pts = np.arange(total)
    blk, off = pts // d, pts % d
    for t in top.gen_arrays:
        gens.append((t[blk] * d + off).astype(point_dtype(total)))
    order = base.order() ** k * top.order()
    return PermGroup.from_arrays(gens, total, order=order, name=f"{base.name}wr{top.name}")


def _digits(d: int, k: int) -> np.ndarray:
    pts = np.arange(d ** k)
    return np.stack([(pts // d ** (k - 1 - i)) % d for i in range(k)])


def _undigits(cols: np.ndarray, d: int) -> np.ndarray:
    k = len(cols)
    return sum(cols[i] * d ** (k - 1 - i) for i in range(k))


def wreath_product_action(base: PermGroup, top: PermGroup) -> PermGroup:
    """``base wr top`` acting on ``d**k`` tuples (mixed radix, most significant first)."""
    d, k = base.degree, top.degree
    total = d ** k
    if total > DEGREE_LIMIT:
        raise CatalogError(f"degree {total} exceeds {DEGREE_LIMIT}")
    dt = point_dtype(total)
    dig = _digits(d, k)
    gens = []
    for i in range(k):
        for s in base.gen_arrays:
            cols = dig.copy()
            cols[i] = s[cols[i]]
            gens.append(_undigits(cols, d).astype(dt))
    for t in top.gen_arrays:
        # coordinate i moves to position t[i]
        cols = np.empty_like(dig)
        cols[t] = dig
        gens.append(_undigits(cols, d).astype(dt))
    order = base.order() ** k * top.order()
    return PermGroup.from_arrays(gens, total, order=order, name=f"{base.name}wr{top.name}:product")


def product_action_subgroup(sub: PermGroup, top: PermGroup, d: int) -> PermGroup:
    """``sub wr top`` inside the product action of a group of degree ``d`` containing ``sub``."""
    k = top.degree
    dt = point_dtype(d ** k)
    dig = _digits(d, k)
    gens = []
    for i in range(k):
        for s in sub.gen_arrays:
            cols = dig.copy()
            cols[i] = s[cols[i]]
            gens.append(_undigits(cols, d).astype(dt))
    for t in top.gen_arrays:
        cols = np.empty_like(dig)
        cols[t] = dig
        gens.append(_undigits(cols, d).astype(dt))
    return PermGroup.from_arrays(gens, d ** k, order=sub.order() ** k * top.order())


def regular_group(g: PermGroup) -> PermGroup:
    r = RegularGroup(g).group
    r.name = f"{g.name}:regular" if g.name else None
    return r


def coset_image(g: PermGroup, x: PermGroup) -> PermGroup:
    img, _ = coset_action(g, x, DEGREE_LIMIT)
    return img.image


# -- holomorph-type construction ------------------------------------------------------------------

@dataclass
class HolomorphSym:
    """``H = N ⋊ (Inn(N) ⋊ S)`` on the ``|T|^k`` elements of ``N = T^k``.

    ``N`` acts by right translations, ``Inn(N)`` by coordinatewise conjugation
    and ``S`` (a group on ``k`` points) by permuting coordinates.
    ``minus = Inn(N) ⋊ S`` is the stabilizer of the identity tuple and
    ``plus = N ⋊ S``; the two are isomorphic, and ``phi_pairs`` sends each
    conjugation generator to the translation by the same element and fixes ``S``.
    """

    t: PermGroup
    k: int
    group: PermGroup
    minus: PermGroup
    plus: PermGroup
    translations: PermGroup  # N acting regularly
    phi_pairs: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return self.group.degree


def holomorph_sym(t: PermGroup, k: int, top: PermGroup | None = None) -> HolomorphSym:
    if k < 1:
        raise CatalogError("k must be positive")
    if top is None:
        top = symmetric_group(k)
    if top.degree != k:
        raise CatalogError("top group must act on k points")
    reg = RegularGroup(t)
    m = reg.size
    if m ** k > DEGREE_LIMIT:
        raise CatalogError(f"degree {m ** k} exceeds {DEGREE_LIMIT}")
    if t.is_abelian() or m == 1:
        raise CatalogError("T must be nonabelian (Inn(T) is identified with T)")
    mul = np.stack([reg.translation(j) for j in range(m)], axis=1)  # mul[i, j] = e_i * e_j
    inv = np.array([reg.inverse(i) for i in range(m)])
    gi = [reg.index_of(s) for s in t.gen_arrays]
    total = m ** k
    dt = point_dtype(total)
    dig = _digits(m, k)

    def coord_map(c: int, f: np.ndarray) -> np.ndarray:
        cols = dig.copy()
        cols[c] = f[cols[c]]
        return _undigits(cols, m).astype(dt)

    rho = [coord_map(c, mul[:, j]) for c in range(k) for j in gi]
    conj = [coord_map(c, mul[mul[inv[j], :], j]) for c in range(k) for j in gi]
    swaps = []
    if k > 1:
        for p in top.gen_arrays:
            cols = np.empty_like(dig)
            cols[p] = dig
            swaps.append(_undigits(cols, m).astype(dt))
    s_order = top.order() if k > 1 else 1
    order = m ** (2 * k) * s_order
    h = PermGroup.from_arrays(rho + conj + swaps, total, order=order, name=f"HolSym({t.name},{k})")
    minus = PermGroup.from_arrays(conj + swaps, total, order=m ** k * s_order)
    plus = PermGroup.from_arrays(rho + swaps, total, order=m ** k * s_order)
    trans = PermGroup.from_arrays(rho, total, order=m ** k)
    pairs = list(zip(conj + swaps, rho + swaps))
    return HolomorphSym(t, k, h, minus, plus, trans, pairs)


# -- affine examples ---------------------------------------------------------------------------------

def affine_point_stabilizer(agl: PermGroup) -> PermGroup:
    from .group import pointwise_stabilizer
    return pointwise_stabilizer(agl, [0])


def agl_translations(agl: PermGroup) -> PermGroup:
    """The regular elementary abelian normal subgroup of an affine group."""
    from .structure import socle
    soc, _ = socle(agl)
    return soc


def agl_quotient_subgroup(agl: PermGroup) -> PermGroup:
    """``X = N ⋊ F`` with ``N`` the translations and ``F`` an index-``d`` subgroup of a point stabilizer.

    For AGL(3,2), ``F`` has order 21 and the coset action of AGL(3,2) on ``X``
    is PSL(2,7) on 8 points, with kernel ``N``.
    """
    from .subgroups import subgroup_classes
    g0 = affine_point_stabilizer(agl)
    target = g0.order() // agl.degree
    for cls in subgroup_classes(g0):
        if cls.order == target:
            sub = cls.group
            gens = list(agl_translations(agl).gen_arrays) + list(sub.gen_arrays)
            return PermGroup.from_arrays(gens, agl.degree, order=agl.degree * target)
    raise CatalogError("no subgroup of the required index in the point stabilizer")


# -- specs --------------------------------------------------------------------------------------------

CONSTRUCTORS = ("named", "generators", "direct-product", "wreath-imprimitive", "wreath-product-action",
                "holomorph-sym", "regular", "coset-image")


@dataclass
class GroupSpec:
    """A JSON-serializable group description.

    Forms (``groundTruth`` optional everywhere, keys ``expectedOrder`` and ``expectedQPType``):

    * ``{"constructor": "named", "name": "AGL(3,2)"}``
    * ``{"constructor": "generators", "degree": 3, "generators": ["(0 1 2)"]}``
    * ``{"constructor": "direct-product", "factors": [spec, ...]}``
    * ``{"constructor": "wreath-imprimitive" | "wreath-product-action", "base": spec, "top": spec}``
    * ``{"constructor": "holomorph-sym", "T": spec, "k": 2, "part": "group" | "minus" | "plus"}``
    * ``{"constructor": "regular", "group": spec}``
    * ``{"constructor": "coset-image", "group": spec, "subgroup": spec}`` (subgroup given on the same points)
    """

    constructor: str
    args: dict = field(default_factory=dict)
    ground_truth: dict | None = None

    @classmethod
    def from_json(cls, data: dict | str) -> GroupSpec:
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, dict) or "constructor" not in data:
            raise CatalogError("group spec must be an object with a 'constructor' key")
        c = data["constructor"]
        if c not in CONSTRUCTORS:
            raise CatalogError(f"unknown constructor {c!r}")
        args = {k: v for k, v in data.items() if k not in ("constructor", "groundTruth", "version")}
        required = {"named": ["name"], "generators": ["degree", "generators"], "direct-product": ["factors"],
                    "wreath-imprimitive": ["base", "top"], "wreath-product-action": ["base", "top"],
                    "holomorph-sym": ["T", "k"], "regular": ["group"], "coset-image": ["group", "subgroup"]}[c]
        missing = [k for k in required if k not in args]
        if missing:
            raise CatalogError(f"constructor {c!r} is missing {', '.join(missing)}")
        return cls(c, args, data.get("groundTruth"))

    def to_json(self) -> dict:
        out = {"version": SPEC_VERSION, "constructor": self.constructor, **self.args}
        if self.ground_truth:
            out["groundTruth"] = self.ground_truth
        return out


def _sub(x) -> PermGroup:
    return make_group(x if isinstance(x, GroupSpec) else GroupSpec.from_json(x))


def make_group(spec: GroupSpec) -> PermGroup:
    c, a = spec.constructor, spec.args
    if c == "named":
        g = build_named(a["name"])
    elif c == "generators":
        n = int(a["degree"])
        if not 1 <= n <= DEGREE_LIMIT:
            raise CatalogError(f"degree {n} out of range")
        gens = a["generators"]
        g = PermGroup.from_cycles(gens, n) if gens else PermGroup.from_arrays([np.arange(n)], n)
    elif c == "direct-product":
        g = direct_product([_sub(f) for f in a["factors"]])
    elif c == "wreath-imprimitive":
        g = wreath_imprimitive(_sub(a["base"]), _sub(a["top"]))
    elif c == "wreath-product-action":
        g = wreath_product_action(_sub(a["base"]), _sub(a["top"]))
    elif c == "holomorph-sym":
        hs = holomorph_sym(_sub(a["T"]), int(a["k"]))
        g = {"group": hs.group, "minus": hs.minus, "plus": hs.plus}[a.get("part", "group")]
    elif c == "regular":
        g = regular_group(_sub(a["group"]))
    elif c == "coset-image":
        big, x = _sub(a["group"]), _sub(a["subgroup"])
        if not is_subgroup(x, big):
            raise CatalogError("coset-image subgroup is not contained in the group")
        g = coset_image(big, x)
    else:
        raise CatalogError(f"unknown constructor {c!r}")
    _check_truth(g, spec.ground_truth)
    return g


def _check_truth(g: PermGroup, truth: dict | None) -> None:
    if not truth:
        return
    if "expectedOrder" in truth and g.order() != int(truth["expectedOrder"]):
        raise CatalogError(f"order {g.order()} differs from the expected {truth['expectedOrder']}")
    if "expectedQPType" in truth:
        from .qp import classify_qp
        tag, _ = classify_qp(g)
        if tag != truth["expectedQPType"]:
            raise CatalogError(f"type {tag} differs from the expected {truth['expectedQPType']}")


# -- names ---------------------------------------------------------------------------------------

def _split_top(name: str, sep: str) -> list[str]:
    parts, depth, cur, i = [], 0, "", 0
    while i < len(name):
        ch = name[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and name.startswith(sep, i):
            parts.append(cur)
            cur = ""
            i += len(sep)
            continue
        cur += ch
        i += 1
    parts.append(cur)
    return parts


def build_named(name: str) -> PermGroup:
    """Group from a catalog name.

    Grammar: ``A5``, ``S5``, ``C4``, ``D4`` (dihedral on 4 points), table names
    such as ``AGL(3,2)``; ``X:regular`` for the right-regular action;
    ``XxY`` for direct products; ``XwrY`` (imprimitive) and ``XwrY:product``;
    and the corpus entries listed by :func:`corpus_names`.
    """
    name = name.replace(" ", "").replace("×", "x")
    if not name:
        raise CatalogError("empty group name")
    if name in _CORPUS:
        return _CORPUS[name].build()
    if name.endswith(":regular"):
        return regular_group(build_named(name[: -len(":regular")]))
    product = name.endswith(":product")
    core_name = name[: -len(":product")] if product else name
    parts = _split_top(core_name, "x")
    if len(parts) > 1:
        if product:
            raise CatalogError(":product applies to wreath products only")
        return direct_product([build_named(p) for p in parts])
    parts = _split_top(core_name, "wr")
    if len(parts) == 2:
        base, top = build_named(parts[0]), build_named(parts[1])
        return wreath_product_action(base, top) if product else wreath_imprimitive(base, top)
    if product:
        raise CatalogError(":product applies to wreath products only")
    return named_group(name)


# -- labeled corpus ---------------------------------------------------------------------------------

@dataclass
class CorpusEntry:
    name: str
    builder: Callable[[], PermGroup]
    order: int
    qp_type: str | None  # None for groups that are not quasiprimitive
    degree: int
    note: str = ""

    def build(self) -> PermGroup:
        g = self.builder()
        g.name = self.name
        if g.order() != self.order:
            raise CatalogError(f"{self.name}: order {g.order()} differs from the expected {self.order}")
        return g


def _a5wrc2_diagonal() -> PermGroup:
    """``A5 wr C2`` on the 60 cosets of ``<diagonal A5, swap>``."""
    w = wreath_imprimitive(alternating_group(5), cyclic_group(2))
    diag = [np.concatenate([s, s + 5]) for s in alternating_group(5).gen_arrays]
    swap = np.concatenate([np.arange(5, 10), np.arange(5)])
    x = PermGroup.from_arrays(diag + [swap], 10, order=120)
    return coset_image(w, x)


def _hol_plus(k: int) -> PermGroup:
    hs = holomorph_sym(alternating_group(5), k)
    return coset_image(hs.group, hs.plus)


def _agl_quotient() -> PermGroup:
    g = build_named("AGL(3,2)")
    return coset_image(g, agl_quotient_subgroup(g))


def _build_corpus() -> dict[str, CorpusEntry]:
    e = [
        CorpusEntry("AGL(3,2)", lambda: named_group("AGL(3,2)"), 1344, "HA", 8),
        CorpusEntry("C5", lambda: cyclic_group(5), 5, "HA", 5),
        CorpusEntry("S4", lambda: symmetric_group(4), 24, "HA", 4),
        CorpusEntry("A5", lambda: alternating_group(5), 60, "AS", 5),
        CorpusEntry("S5", lambda: symmetric_group(5), 120, "AS", 5),
        CorpusEntry("A6", lambda: alternating_group(6), 360, "AS", 6),
        CorpusEntry("PSL(2,7)", lambda: named_group("PSL(2,7)"), 168, "AS", 8),
        CorpusEntry("GL(3,2)", lambda: named_group("GL(3,2)"), 168, "AS", 7),
        CorpusEntry("PSL(2,11)", lambda: named_group("PSL(2,11)"), 660, "AS", 12),
        CorpusEntry("M11", lambda: named_group("M11"), 7920, "AS", 11),
        CorpusEntry("D6", lambda: dihedral_group(6), 12, None, 6, "normal C3 is intransitive"),
        CorpusEntry("HolSym(A5,1)", lambda: holomorph_sym(alternating_group(5), 1).group, 3600, "HS", 60),
        CorpusEntry("HolSym(A5,1):plus", lambda: _hol_plus(1), 60, "AS", 60),
        CorpusEntry("HolSym(A5,2)", lambda: holomorph_sym(alternating_group(5), 2).group, 25_920_000, "HC", 3600),
        CorpusEntry("HolSym(A5,2):plus", lambda: _hol_plus(2), 7200, "TW", 3600),
        CorpusEntry("A5wrC2:diagonal", _a5wrc2_diagonal, 7200, "SD", 60),
        CorpusEntry("PSL(2,7)wrC2:product", lambda: wreath_product_action(named_group("PSL(2,7)"), cyclic_group(2)),
                    168 ** 2 * 2, "PA", 64),
        CorpusEntry("AGL(3,2):quotient", _agl_quotient, 168, "AS", 8),
        CorpusEntry("AGL(3,2)wrC2:product", lambda: wreath_product_action(named_group("AGL(3,2)"), cyclic_group(2)),
                    1344 ** 2 * 2, "HA", 64),
    ]
    return {x.name: x for x in e}


_CORPUS = _build_corpus()


def corpus_names() -> list[str]:
    return list(_CORPUS)


def corpus_entry(name: str) -> CorpusEntry:
    try:
        return _CORPUS[name]
    except KeyError:
        raise CatalogError(f"{name!r} is not a corpus entry") from None


@dataclass
class QuotientPair:
    """A group ``G`` with a subgroup ``X`` whose coset action realizes ``G/core(G,X)`` on ``[G:X]`` points."""

    name: str
    group: PermGroup
    subgroup: PermGroup
    expected: tuple[str, str]


def quotient_pairs() -> list[QuotientPair]:
    """Constructed pairs whose group and quotient are quasiprimitive of the same degree."""
    out = []
    for k, exp in ((1, ("HS", "AS")), (2, ("HC", "TW"))):
        hs = holomorph_sym(alternating_group(5), k)
        out.append(QuotientPair(f"HolSym(A5,{k})", hs.group, hs.plus, exp))
    agl = named_group("AGL(3,2)")
    x1 = agl_quotient_subgroup(agl)
    out.append(QuotientPair("AGL(3,2)", agl, x1, ("HA", "AS")))
    c2 = cyclic_group(2)
    w = wreath_product_action(agl, c2)
    x = product_action_subgroup(x1, c2, agl.degree)
    out.append(QuotientPair("AGL(3,2)wrC2:product", w, x, ("HA", "PA")))
    return out


# -- arithmetic over the simple-group table --------------------------------------------------------

def simple_power_degree(n: int) -> list[tuple[SimpleGroupId, int]]:
    """All nonabelian simple ``T`` (order at most 10^8) and ``m >= 1`` with ``|T|^m = n``."""
    if n < 60:
        return []
    out = []
    for row in catalog_rows():
        t = row.ident.order
        if t > n:
            break
        m = 1
        p = t
        while p < n:
            p *= t
            m += 1
        if p == n:
            out.append((row.ident, m))
    return out


__all__ = [
    "CatalogError", "GroupSpec", "make_group", "build_named", "named_group", "cyclic_group", "symmetric_group",
    "alternating_group", "dihedral_group", "direct_product", "wreath_imprimitive", "wreath_product_action",
    "product_action_subgroup", "regular_group", "coset_image", "holomorph_sym", "HolomorphSym", "block_embed",
    "corpus_names", "corpus_entry", "quotient_pairs", "QuotientPair", "simple_power_degree",
    "agl_quotient_subgroup",
]
