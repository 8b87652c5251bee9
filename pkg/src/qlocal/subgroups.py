"""Conjugacy classes of subgroups of small groups, through a Cayley table.

Subgroups are held as boolean membership vectors over the chain-ordered
element list.  Classes are found by cyclic extension: every subgroup is
reached from a smaller one (up to conjugacy) by adjoining one element of
prime-power order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arith import prime_power
from .group import PermGroup

TABLE_LIMIT = 6000


class TableTooLarge(RuntimeError):
    pass


def _keys(rows: np.ndarray, n: int) -> np.ndarray:
    """Injective integer keys for rows of points below ``n``."""
    if n ** rows.shape[1] >= 2 ** 62:
        raise TableTooLarge("base too long for integer keys")
    weights = n ** np.arange(rows.shape[1], dtype=np.int64)
    return rows.astype(np.int64) @ weights


class CayleyTable:
    """Multiplication table of a permutation group, elements in chain order."""

    def __init__(self, g: PermGroup, limit: int = TABLE_LIMIT):
        if g.order() > limit:
            raise TableTooLarge(f"order {g.order()} exceeds the table limit {limit}")
        self.group = g
        ch = g.chain
        self.elements = ch.elements(limit).astype(np.int64)
        size = len(self.elements)
        self.size = size
        base = ch.base
        n = g.degree
        if base:
            keys = _keys(self.elements[:, base], n)
            order = np.argsort(keys)
            sorted_keys = keys[order]
            ref = self.elements[:, base]
            mult = np.empty((size, size), dtype=np.int64)
            for j in range(size):
                # row i, column j: the product E[i] * E[j]
                k = _keys(self.elements[j][ref], n)
                mult[:, j] = order[np.searchsorted(sorted_keys, k)]
        else:
            mult = np.zeros((1, 1), dtype=np.int64)
        self.mult = mult
        self.inv = np.argmax(mult == 0, axis=1)
        orders = np.ones(size, dtype=np.int64)
        cur = np.arange(size)
        k = 1
        pending = cur != 0
        while pending.any():
            cur = mult[cur, np.arange(size)]
            k += 1
            hit = pending & (cur == 0)
            orders[hit] = k
            pending &= ~hit
        self.orders = orders

    def closure(self, gens) -> np.ndarray:
        members = np.zeros(self.size, dtype=bool)
        members[0] = True
        gens = np.asarray(sorted(set(int(x) for x in gens)), dtype=np.int64)
        if len(gens) == 0:
            return members
        frontier = np.array([0], dtype=np.int64)
        while len(frontier):
            new = np.unique(self.mult[np.ix_(frontier, gens)].ravel())
            new = new[~members[new]]
            members[new] = True
            frontier = new
        return members

    def conjugates(self, members: np.ndarray) -> np.ndarray:
        """Boolean matrix whose row ``g`` is the conjugate ``S^g``."""
        s = np.nonzero(members)[0]
        gs = np.arange(self.size)
        left = self.mult[self.inv[:, None], s[None, :]]
        images = self.mult[left, gs[:, None]]
        out = np.zeros((self.size, self.size), dtype=bool)
        out[np.repeat(gs, len(s)), images.ravel()] = True
        return out

    def subgroup(self, members: np.ndarray) -> PermGroup:
        idx = np.nonzero(members)[0]
        gens = _small_generating_set(self, idx)
        dt = self.group.gen_arrays[0].dtype if self.group.generators else np.uint8
        return PermGroup.from_arrays([self.elements[i].astype(dt) for i in gens], self.group.degree,
                                     order=int(len(idx)))


def _small_generating_set(t: CayleyTable, idx: np.ndarray) -> list[int]:
    target = len(idx)
    gens: list[int] = []
    have = t.closure([])
    for i in sorted(idx.tolist(), key=lambda i: (-t.orders[i], i)):
        if have.sum() == target:
            break
        if not have[i]:
            gens.append(i)
            have = t.closure(gens)
    return gens


@dataclass
class SubgroupClass:
    members: np.ndarray  # boolean vector of one representative
    length: int  # number of conjugates
    order: int
    group: PermGroup


def subgroup_classes(g: PermGroup, limit: int = TABLE_LIMIT) -> list[SubgroupClass]:
    """One representative of every conjugacy class of subgroups of ``g``, sorted by order."""
    t = CayleyTable(g, limit)
    registry: dict[bytes, int] = {}
    reps: list[tuple[np.ndarray, int]] = []

    def register(members: np.ndarray) -> bool:
        key = np.packbits(members).tobytes()
        if key in registry:
            return False
        conj = t.conjugates(members)
        packed = np.unique(np.packbits(conj, axis=1), axis=0)
        for row in packed:
            registry[row.tobytes()] = len(reps)
        reps.append((members, len(packed)))
        return True

    ppower = [i for i in range(t.size) if i and prime_power(int(t.orders[i]))]
    register(t.closure([]))
    queue = [0]
    while queue:
        c = queue.pop(0)
        members = reps[c][0]
        gens = _small_generating_set(t, np.nonzero(members)[0])
        seen = members.copy()
        s = np.nonzero(members)[0]
        for i in ppower:
            if seen[i]:
                continue
            # <S, i> only depends on the double coset S i S
            seen[t.mult[t.mult[s[:, None], i], s[None, :]].ravel()] = True
            if register(t.closure(gens + [i])):
                queue.append(len(reps) - 1)
    out = [SubgroupClass(m, length, int(m.sum()), t.subgroup(m)) for m, length in reps]
    out.sort(key=lambda c: (c.order, -c.length))
    return out
