"""Digraphs with a group of automorphisms: orbital digraphs, local actions, stabilizer series."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .actions import induced_group
from .group import GroupError, PermGroup, is_normal, is_subgroup, pointwise_stabilizer, subgroup
from .perm import Permutation, cycle_lengths, inverse_array, point_dtype

ISO_BUDGET = 10_000_000


class DigraphError(GroupError):
    pass


class Digraph:
    """Vertices ``0..n-1`` and a set of arcs, optionally with an acting group."""

    def __init__(self, vertex_count: int, arcs, group: PermGroup | None = None, *, check: bool = True):
        if vertex_count < 1:
            raise DigraphError("a digraph needs at least one vertex")
        arr = np.asarray(arcs, dtype=np.int64).reshape(-1, 2)
        if len(arr):
            arr = np.unique(arr, axis=0)
            if arr.min() < 0 or arr.max() >= vertex_count:
                raise DigraphError("arc endpoint out of range")
        self.vertex_count = vertex_count
        self.arcs = arr
        self.group = group
        if group is not None and group.degree != vertex_count:
            raise DigraphError("group degree differs from the vertex count")
        if check and group is not None and len(arr):
            keys = set(self._keys(arr).tolist())
            for s in group.gen_arrays:
                moved = self._keys(s[arr])
                if not all(int(k) in keys for k in moved):
                    raise DigraphError("arc set is not invariant under the group")
        self._out: list[list[int]] | None = None
        self._in: list[list[int]] | None = None

    def _keys(self, arr: np.ndarray) -> np.ndarray:
        return arr[:, 0].astype(np.int64) * self.vertex_count + arr[:, 1]

    def __len__(self) -> int:
        return len(self.arcs)

    def _adjacency(self):
        if self._out is None:
            out: list[list[int]] = [[] for _ in range(self.vertex_count)]
            inn: list[list[int]] = [[] for _ in range(self.vertex_count)]
            for u, v in self.arcs.tolist():
                out[u].append(v)
                inn[v].append(u)
            self._out = [sorted(x) for x in out]
            self._in = [sorted(x) for x in inn]
        return self._out, self._in

    def out_neighbours(self, v: int) -> list[int]:
        return list(self._adjacency()[0][v])

    def in_neighbours(self, v: int) -> list[int]:
        return list(self._adjacency()[1][v])

    def neighbours(self, v: int, direction: str) -> list[int]:
        if direction == "out":
            return self.out_neighbours(v)
        if direction == "in":
            return self.in_neighbours(v)
        raise DigraphError(f"direction must be 'in' or 'out', not {direction!r}")

    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.arcs[:, 0], minlength=self.vertex_count) if len(self.arcs) else \
            np.zeros(self.vertex_count, dtype=np.int64)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.arcs[:, 1], minlength=self.vertex_count) if len(self.arcs) else \
            np.zeros(self.vertex_count, dtype=np.int64)

    # -- export ------------------------------------------------------------------

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{"]
        lines += [f"  {v};" for v in range(self.vertex_count)]
        lines += [f"  {u} -> {v};" for u, v in self.arcs.tolist()]
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        out = {"vertexCount": self.vertex_count, "arcs": self.arcs.tolist()}
        if self.group is not None:
            out["group"] = [str(g) for g in self.group.generators]
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> Digraph:
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["vertexCount"])
        group = None
        if data.get("group"):
            group = PermGroup.from_cycles(data["group"], n)
        return cls(n, data.get("arcs", []), group)

    def __repr__(self) -> str:
        return f"Digraph(vertices={self.vertex_count}, arcs={len(self.arcs)})"


def arc_orbit(g: PermGroup, u: int, v: int) -> np.ndarray:
    """Orbit of the ordered pair ``(u, v)`` under ``g``, as an array of pairs."""
    n = g.degree
    seen = np.zeros(n * n, dtype=bool) if n <= 20_000 else None
    start = np.array([[u, v]], dtype=np.int64)
    found = [start]
    keys = {u * n + v} if seen is None else None
    if seen is not None:
        seen[u * n + v] = True
    frontier = start
    gens = [s.astype(np.int64) for s in g.gen_arrays]
    while len(frontier):
        new = []
        for s in gens:
            im = s[frontier]
            k = im[:, 0] * n + im[:, 1]
            if seen is not None:
                k, first = np.unique(k, return_index=True)
                im = im[first]
                fresh = ~seen[k]
                seen[k[fresh]] = True
                new.append(im[fresh])
            else:
                rows = [r for r, kk in zip(im, k.tolist()) if kk not in keys]
                for r in rows:
                    keys.add(int(r[0]) * n + int(r[1]))
                if rows:
                    new.append(np.unique(np.array(rows), axis=0))
        frontier = np.concatenate(new) if new else np.zeros((0, 2), dtype=np.int64)
        if len(frontier):
            found.append(frontier)
    return np.concatenate(found)


def orbital_digraph(g: PermGroup, u: int, v: int) -> Digraph:
    """The digraph whose arcs are the ``g``-orbit of ``(u, v)``."""
    n = g.degree
    if not (0 <= u < n and 0 <= v < n):
        raise DigraphError("vertex out of range")
    if u == v:
        raise DigraphError("loops are excluded: u and v must differ")
    if not g.is_transitive():
        raise DigraphError("orbital digraphs need a transitive group")
    return Digraph(n, arc_orbit(g, u, v), g, check=False)


# -- local actions -------------------------------------------------------------------

@dataclass
class LocalActionReport:
    vertex: int
    direction: str
    neighbours: list[int]
    induced_group: PermGroup | None  # None when the vertex has no neighbours in this direction
    stabilizer: PermGroup

    @property
    def degree(self) -> int:
        return len(self.neighbours)

    def order(self) -> int:
        return self.induced_group.order() if self.induced_group is not None else 1

    def orbit_count(self) -> int:
        return len(self.induced_group.orbits()) if self.induced_group is not None else 0


def local_action(gamma: Digraph, v: int, direction: str) -> LocalActionReport:
    """Group induced by the vertex stabilizer on the in- or out-neighbours of ``v``."""
    if gamma.group is None:
        raise DigraphError("local actions need a digraph with a group")
    nbrs = gamma.neighbours(v, direction)
    stab = pointwise_stabilizer(gamma.group, [v])
    induced = induced_group(stab, nbrs) if nbrs else None
    return LocalActionReport(v, direction, nbrs, induced, stab)


# -- connectivity ----------------------------------------------------------------------

def strongly_connected(gamma: Digraph) -> tuple[bool, np.ndarray]:
    """Verdict and the strong component label of every vertex."""
    n = gamma.vertex_count
    a = gamma.arcs
    graph = coo_matrix((np.ones(len(a), dtype=np.int8), (a[:, 0], a[:, 1])), shape=(n, n))
    count, labels = connected_components(graph, directed=True, connection="strong")
    return count == 1, labels


def weakly_connected(gamma: Digraph) -> bool:
    n = gamma.vertex_count
    a = gamma.arcs
    graph = coo_matrix((np.ones(len(a), dtype=np.int8), (a[:, 0], a[:, 1])), shape=(n, n))
    count, _ = connected_components(graph, directed=True, connection="weak")
    return count == 1


def is_arc_transitive(gamma: Digraph) -> bool:
    if gamma.group is None or not len(gamma.arcs):
        return False
    u, v = gamma.arcs[0].tolist()
    return len(arc_orbit(gamma.group, u, v)) == len(gamma.arcs)


# -- the vertex-ordering subnormal series ---------------------------------------------

@dataclass
class SeriesReport:
    ordering: list[int]
    series: list[PermGroup]  # G_v1 = series[0] >= G_1 >= G_2 >= ...; stops at the trivial group
    orders: list[int]
    out_local_order: int
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def factor_orders(self) -> list[int]:
        return [a // b for a, b in zip(self.orders, self.orders[1:])]


def _bfs_ordering(gamma: Digraph) -> list[int]:
    order = [0]
    seen = {0}
    i = 0
    while i < len(order):
        for w in gamma.out_neighbours(order[i]):
            if w not in seen:
                seen.add(w)
                order.append(w)
        i += 1
    return order


def stabilizer_series(gamma: Digraph) -> SeriesReport:
    """Series ``G_i`` fixing ``v_1..v_i`` and their out-neighbours, with its verification.

    Vertices are ordered breadth-first from vertex 0, out-neighbours in
    ascending order, so each ``v_i`` is an out-neighbour of an earlier vertex.
    """
    g = gamma.group
    if g is None:
        raise DigraphError("stabilizer series needs a digraph with a group")
    connected, _ = strongly_connected(gamma)
    if not connected:
        raise DigraphError("digraph is not strongly connected")
    if not g.is_transitive() or not is_arc_transitive(gamma):
        raise DigraphError("group must be vertex- and arc-transitive")
    ordering = _bfs_ordering(gamma)
    top = pointwise_stabilizer(g, [ordering[0]])
    out_local = local_action(gamma, ordering[0], "out")
    series = [top]
    checks = {"normal": True, "vertexFixed": True, "imageContained": True, "factorDividesLocal": True}
    cur = top
    for i, v in enumerate(ordering):
        if cur.order() == 1:
            break
        nbrs = gamma.out_neighbours(v)
        if i > 0 and any(int(s[v]) != v for s in cur.gen_arrays):
            checks["vertexFixed"] = False
        nxt = pointwise_stabilizer(cur, [v] + nbrs)
        if not is_normal(nxt, cur):
            checks["normal"] = False
        if i > 0:
            img = induced_group(cur, nbrs)
            ref = induced_group(pointwise_stabilizer(g, [v]), nbrs)
            if not is_subgroup(img, ref):
                checks["imageContained"] = False
        if out_local.order() % (cur.order() // nxt.order()):
            checks["factorDividesLocal"] = False
        series.append(nxt)
        cur = nxt
    orders = [s.order() for s in series]
    checks["reachesTrivial"] = orders[-1] == 1
    return SeriesReport(ordering, series, orders, out_local.order(), checks)


# -- permutation isomorphism -------------------------------------------------------------

@dataclass
class PermIsoCertificate:
    verdict: str  # "yes", "no" or "unknown"
    point_bijection: list[int] | None = None
    generator_images: list[Permutation] | None = None
    nodes: int = 0
    reason: str = ""

    def verify(self, a: PermGroup, b: PermGroup) -> bool:
        if self.verdict != "yes":
            return False
        f = np.asarray(self.point_bijection, dtype=np.int64)
        for x, y in zip(a.gen_arrays, self.generator_images):
            if not np.array_equal(f[x], y.images[f]):
                return False
        return subgroup(b, self.generator_images).order() == b.order()


def _point_invariants(g: PermGroup) -> list[tuple]:
    """Per point: orbit length and the sorted orbit lengths of its stabilizer."""
    out: list[tuple] = [()] * g.degree
    for orb in g.orbits():
        stab = pointwise_stabilizer(g, [orb[0]])
        sig = (len(orb), tuple(sorted(len(o) for o in stab.orbits())))
        for p in orb:
            out[p] = sig
    return out


class _Search:
    def __init__(self, a: PermGroup, b: PermGroup, budget: int):
        self.a, self.b = a, b
        self.n = a.degree
        self.budget = budget
        self.nodes = 0
        self.xs = [x.astype(np.int64) for x in a.gen_arrays]
        self.inv_a = _point_invariants(a)
        self.inv_b = _point_invariants(b)
        elems = b.elements_array().astype(np.int64)
        types_b: dict[tuple, list[np.ndarray]] = {}
        for e in elems:
            types_b.setdefault(tuple(sorted(cycle_lengths(e))), []).append(e)
        self.cands = [types_b.get(tuple(sorted(cycle_lengths(x))), []) for x in self.xs]

    def run(self) -> tuple[np.ndarray, list[np.ndarray]] | None:
        f = np.full(self.n, -1, dtype=np.int64)
        used = np.zeros(self.n, dtype=bool)
        return self._choose_gen(0, [], f, used)

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetOut

    def _propagate(self, f, used, ys) -> bool:
        """Extend ``f`` by ``f(p^x) = f(p)^y``; False on a contradiction."""
        changed = True
        while changed:
            changed = False
            for x, y in zip(self.xs, ys):
                dom = np.nonzero(f >= 0)[0]
                src, dst = x[dom], y[f[dom]]
                known = f[src]
                if ((known >= 0) & (known != dst)).any():
                    return False
                new = known < 0
                if new.any():
                    s, d = src[new], dst[new]
                    if len(np.unique(d)) != len(d) or used[d].any():
                        return False
                    f[s] = d
                    used[d] = True
                    changed = True
        return True

    def _consistent(self, f) -> bool:
        dom = np.nonzero(f >= 0)[0]
        return all(self.inv_a[p] == self.inv_b[f[p]] for p in dom.tolist())

    def _choose_gen(self, i, ys, f, used):
        if i == len(self.xs):
            return self._choose_points(ys, f, used)
        for y in self.cands[i]:
            self._tick()
            f2, u2 = f.copy(), used.copy()
            if self._propagate(f2, u2, ys + [y]):
                res = self._choose_gen(i + 1, ys + [y], f2, u2)
                if res is not None:
                    return res
        return None

    def _choose_points(self, ys, f, used):
        free = np.nonzero(f < 0)[0]
        if not len(free):
            if subgroup(self.b, [Permutation(y, check=False) for y in ys]).order() == self.b.order():
                return f, ys
            return None
        p = int(free[0])
        for q in np.nonzero(~used)[0].tolist():
            if self.inv_a[p] != self.inv_b[q]:
                continue
            self._tick()
            f2, u2 = f.copy(), used.copy()
            f2[p] = q
            u2[q] = True
            if self._propagate(f2, u2, ys) and self._consistent(f2):
                res = self._choose_points(ys, f2, u2)
                if res is not None:
                    return res
        return None


class _BudgetOut(Exception):
    pass


def perm_isomorphic(a: PermGroup, b: PermGroup, budget: int = ISO_BUDGET) -> PermIsoCertificate:
    """Decide whether ``a`` and ``b`` are permutation isomorphic, with a checkable certificate."""
    if a.degree != b.degree:
        return PermIsoCertificate("no", reason="degrees differ")
    if a.order() != b.order():
        return PermIsoCertificate("no", reason="orders differ")
    if sorted(map(len, a.orbits())) != sorted(map(len, b.orbits())):
        return PermIsoCertificate("no", reason="orbit lengths differ")
    if a.order() == 1:
        return PermIsoCertificate("yes", list(range(a.degree)), [], reason="both trivial")
    if subgroup_equal_fast(a, b):
        return PermIsoCertificate("yes", list(range(a.degree)), list(a.generators), reason="equal groups")
    search = _Search(a, b, budget)
    if sorted(search.inv_a) != sorted(search.inv_b):
        return PermIsoCertificate("no", nodes=0, reason="point invariants differ")
    try:
        res = search.run()
    except _BudgetOut:
        return PermIsoCertificate("unknown", nodes=search.nodes, reason="search budget exhausted")
    if res is None:
        return PermIsoCertificate("no", nodes=search.nodes, reason="exhaustive search found no bijection")
    f, ys = res
    cert = PermIsoCertificate("yes", f.tolist(), [Permutation(y, check=False) for y in ys], search.nodes)
    if not cert.verify(a, b):
        raise DigraphError("internal error: isomorphism certificate failed verification")
    return cert


def subgroup_equal_fast(a: PermGroup, b: PermGroup) -> bool:
    return a.order() == b.order() and is_subgroup(a, b)


def relabel(g: PermGroup, bijection: Sequence[int]) -> PermGroup:
    """The group ``f^-1 g f`` for the point map ``p -> bijection[p]``."""
    f = np.asarray(bijection, dtype=np.int64)
    finv = inverse_array(f)
    dt = point_dtype(g.degree)
    return PermGroup.from_arrays([f[s.astype(np.int64)[finv]].astype(dt) for s in g.gen_arrays], g.degree)
