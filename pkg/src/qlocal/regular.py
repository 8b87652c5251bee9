"""Right-regular representations: a group acting on its own elements by right multiplication."""

from __future__ import annotations

import numpy as np

from .group import GroupError, PermGroup
from .perm import point_dtype
from .subgroups import TableTooLarge, _keys

REGULAR_LIMIT = 25_000


class RegularGroup:
    """Elements of ``h`` in chain order (identity first) with vectorized index lookup.

    Point ``i`` of the regular action is element ``E[i]``; right translation by
    ``x`` sends ``i`` to the index of ``E[i] * x``.
    """

    def __init__(self, h: PermGroup, limit: int = REGULAR_LIMIT):
        size = h.order()
        if size > limit:
            raise GroupError(f"order {size} exceeds the regular-representation limit {limit}")
        self.source = h
        self.size = size
        ch = h.chain
        self.base = list(ch.base)
        self.elements = ch.elements(limit).astype(np.int64)
        n = h.degree
        self._n = n
        if self.base:
            keys = _keys(self.elements[:, self.base], n)
        else:
            keys = np.zeros(1, dtype=np.int64)
        self._order = np.argsort(keys)
        self._sorted = keys[self._order]
        self.dtype = point_dtype(size)
        self._group: PermGroup | None = None

    def index_rows(self, rows: np.ndarray) -> np.ndarray:
        """Indices of elements given by their full image arrays (one per row)."""
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, self._n)
        if not self.base:
            return np.zeros(len(rows), dtype=np.int64)
        k = _keys(rows[:, self.base], self._n)
        pos = np.searchsorted(self._sorted, k)
        pos = np.minimum(pos, len(self._sorted) - 1)
        if (self._sorted[pos] != k).any():
            raise GroupError("element is not in the group")
        return self._order[pos]

    def index_of(self, x: np.ndarray) -> int:
        return int(self.index_rows(np.asarray(x)[None, :])[0])

    def translation(self, j: int) -> np.ndarray:
        """Right translation by ``E[j]``: ``i -> index(E[i] * E[j])``."""
        if not self.base:
            return np.zeros(1, dtype=np.int64)
        x = self.elements[j]
        k = _keys(x[self.elements[:, self.base]], self._n)
        return self._order[np.searchsorted(self._sorted, k)]

    def translation_by(self, x: np.ndarray) -> np.ndarray:
        return self.translation(self.index_of(x))

    def product(self, i: int, j: int) -> int:
        return self.index_of(self.elements[j][self.elements[i]])

    def inverse(self, i: int) -> int:
        inv = np.empty(self._n, dtype=np.int64)
        inv[self.elements[i]] = np.arange(self._n)
        return self.index_of(inv)

    @property
    def group(self) -> PermGroup:
        """The right-regular permutation group on ``|h|`` points."""
        if self._group is None:
            gens = [self.translation_by(s).astype(self.dtype) for s in self.source.gen_arrays]
            self._group = PermGroup.from_arrays(gens, self.size, order=self.size)
        return self._group

    def transport(self, sub: PermGroup) -> PermGroup:
        """Image of a subgroup of ``h`` in the regular representation."""
        gens = [self.translation_by(s).astype(self.dtype) for s in sub.gen_arrays]
        return PermGroup.from_arrays(gens, self.size, order=sub.order())

    def member_indices(self, sub: PermGroup) -> np.ndarray:
        """Sorted element indices of a subgroup of ``h``."""
        if sub.degree != self._n:
            raise GroupError("degree mismatch")
        return np.sort(self.index_rows(sub.chain.elements(self.size)))


def regular_embedding(h: PermGroup, limit: int = REGULAR_LIMIT) -> RegularGroup:
    """Right-regular model of ``h``; raises if ``|h|`` exceeds ``limit``."""
    try:
        return RegularGroup(h, limit)
    except TableTooLarge as exc:
        raise GroupError(str(exc)) from exc


def from_table(table) -> PermGroup:
    """Right-regular permutation group of a Cayley table whose element 0 is the identity."""
    t = np.asarray(table, dtype=np.int64)
    m = len(t)
    if t.shape != (m, m):
        raise GroupError("Cayley table must be square")
    if not (t[0] == np.arange(m)).all() or not (t[:, 0] == np.arange(m)).all():
        raise GroupError("element 0 must be the identity of the table")
    for row in t:
        if sorted(row.tolist()) != list(range(m)):
            raise GroupError("table rows must be permutations")
    for col in t.T:
        if sorted(col.tolist()) != list(range(m)):
            raise GroupError("table columns must be permutations")
    # associativity, checked exhaustively: (ij)k = i(jk)
    for j in range(m):
        if not (t[t[:, j], :] == t[:, t[j, :]]).all():
            raise GroupError("table is not associative")
    dt = point_dtype(m)
    return PermGroup.from_arrays([t[:, j].astype(dt) for j in range(1, m)] or [np.arange(m, dtype=dt)], m)
