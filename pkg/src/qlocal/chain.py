"""Stabilizer chains (base and strong generating set) over numpy image arrays.

Transversals are kept as Schreier trees: each orbit point records the point
it was reached from and the generator used.  Inverse transversal elements are
cached explicitly while the orbit is short; beyond that they are traced on
demand.  Orbits only ever grow by appending, so a transversal element never
changes once assigned and Schreier generators checked earlier stay checked.
"""

from __future__ import annotations

import random

import numpy as np

from .perm import identity_array, inverse_array, point_dtype

EXPLICIT_ORBIT = 4096
EXPLICIT_ENTRIES = 1 << 24


class ChainBudgetError(RuntimeError):
    pass


class _Level:
    __slots__ = ("base", "gens", "orbit", "pos", "parent", "pgen", "cache", "ucache", "done", "n")

    def __init__(self, base: int, n: int):
        self.base = base
        self.n = n
        self.gens: list[np.ndarray] = []
        self.orbit = [base]
        self.pos = np.full(n, -1, dtype=np.int32)
        self.pos[base] = 0
        self.parent = [-1]
        self.pgen = [-1]
        ident = identity_array(n)
        ident.flags.writeable = False
        # explicit transversal: cache[i] = u_i^-1 and ucache[i] = u_i, both read-only
        self.cache: list[np.ndarray] | None = [ident]
        self.ucache: list[np.ndarray] | None = [ident]
        self.done: list[int] = []

    def _explicit_ok(self) -> bool:
        m = len(self.orbit)
        return m <= EXPLICIT_ORBIT and m * self.n <= EXPLICIT_ENTRIES

    def u(self, idx: int) -> np.ndarray:
        """Transversal element mapping the base point to ``orbit[idx]``."""
        if self.cache is not None:
            return self.ucache[idx]
        path = []
        while idx > 0:
            path.append(self.pgen[idx])
            idx = self.parent[idx]
        u = identity_array(self.n)
        for j in reversed(path):
            u = self.gens[j][u]
        return u

    def uinv(self, idx: int) -> np.ndarray:
        if self.cache is not None:
            return self.cache[idx]
        return inverse_array(self.u(idx))

    def _append_batch(self, pts: np.ndarray, parents: np.ndarray, gen_idx: int) -> None:
        """Add orbit points ``pts`` reached from orbit positions ``parents`` by generator ``gen_idx``."""
        start = len(self.orbit)
        self.pos[pts] = np.arange(start, start + len(pts), dtype=np.int32)
        self.orbit.extend(pts.tolist())
        self.parent.extend(parents.tolist())
        self.pgen.extend([gen_idx] * len(pts))
        if self.cache is None:
            return
        if not self._explicit_ok():
            self.cache = None
            self.ucache = None
            return
        gen = self.gens[gen_idx]
        plist = parents.tolist()
        new_u = gen[np.stack([self.ucache[p] for p in plist])]
        # u_new = u_parent * s, so u_new^-1 = s^-1 * u_parent^-1
        inv = np.stack([self.cache[p] for p in plist])[:, inverse_array(gen)]
        new_u.flags.writeable = False
        inv.flags.writeable = False
        self.ucache.extend(new_u)
        self.cache.extend(inv)

    def add_gen(self, s: np.ndarray) -> None:
        self.gens.append(s)
        self.done.append(0)
        j = len(self.gens) - 1
        old = len(self.orbit)
        imgs = s[np.asarray(self.orbit, dtype=np.int64)]
        fresh = np.nonzero(self.pos[imgs] < 0)[0]
        if len(fresh):
            self._append_batch(imgs[fresh].astype(np.int64), fresh, j)
        q = old
        while q < len(self.orbit):
            end = len(self.orbit)
            frontier = np.asarray(self.orbit[q:end], dtype=np.int64)
            for jj, t in enumerate(self.gens):
                imgs = t[frontier].astype(np.int64)
                fresh = np.nonzero(self.pos[imgs] < 0)[0]
                if len(fresh):
                    self._append_batch(imgs[fresh], fresh + q, jj)
            q = end

    @property
    def orbit_array(self) -> np.ndarray:
        return np.asarray(self.orbit, dtype=np.int64)

    def restricted(self, n: int) -> _Level:
        lev = _Level.__new__(_Level)
        lev.base = self.base
        lev.n = n
        lev.gens = [g[:n].copy() for g in self.gens]
        lev.orbit = list(self.orbit)
        lev.pos = self.pos[:n].copy()
        lev.parent = list(self.parent)
        lev.pgen = list(self.pgen)
        lev.cache = None if self.cache is None else [c[:n].astype(point_dtype(n)) for c in self.cache]
        lev.ucache = None if self.ucache is None else [c[:n].astype(point_dtype(n)) for c in self.ucache]
        lev.done = list(self.done)
        for i, g in enumerate(lev.gens):
            lev.gens[i] = g.astype(point_dtype(n))
        return lev


class StabChain:
    """A base and strong generating set for the group generated by ``gens``."""

    def __init__(self, n: int, gens: list[np.ndarray] = (), base_prefix=(), *, complete: bool = True):
        self.n = n
        self.ident = identity_array(n)
        self.levels: list[_Level] = []
        for b in base_prefix:
            self.levels.append(_Level(int(b), n))
        gens = [np.asarray(g, dtype=self.ident.dtype) for g in gens]
        gens = [g for g in gens if not np.array_equal(g, self.ident)]
        for g in gens:
            self._insert(g, 0, len(self._fixed_prefix(g)))
        if complete:
            self.complete()

    # -- basic queries -------------------------------------------------------

    @property
    def base(self) -> list[int]:
        return [lev.base for lev in self.levels]

    def order(self) -> int:
        o = 1
        for lev in self.levels:
            o *= len(lev.orbit)
        return o

    @property
    def strong_gens(self) -> list[np.ndarray]:
        return list(self.levels[0].gens) if self.levels else []

    def is_identity(self, h: np.ndarray) -> bool:
        return np.array_equal(h, self.ident)

    def strip(self, h: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        for i in range(start, len(self.levels)):
            lev = self.levels[i]
            idx = lev.pos[h[lev.base]]
            if idx < 0:
                return h, i
            h = lev.uinv(int(idx))[h]
        return h, len(self.levels)

    def contains(self, h: np.ndarray) -> bool:
        r, _ = self.strip(h)
        return self.is_identity(r)

    # -- construction --------------------------------------------------------

    def _fixed_prefix(self, g: np.ndarray) -> list[int]:
        out = []
        for lev in self.levels:
            if g[lev.base] != lev.base:
                break
            out.append(lev.base)
        return out

    def _insert(self, r: np.ndarray, start: int, depth: int) -> int:
        """Add ``r`` (fixing base points before ``depth``) to levels start..depth."""
        if depth >= len(self.levels):
            moved = np.nonzero(r != self.ident)[0]
            self.levels.append(_Level(int(moved[0]), self.n))
            depth = len(self.levels) - 1
        for lev in self.levels[start:depth + 1]:
            lev.add_gen(r)
        return depth

    def add_generator(self, g: np.ndarray, *, complete: bool = True) -> bool:
        """Extend the chain by ``g``; return False when ``g`` was already a member."""
        g = np.asarray(g, dtype=self.ident.dtype)
        r, d = self.strip(g)
        if self.is_identity(r):
            return False
        self._insert(r, 0, d)
        if complete:
            self.complete()
        return True

    def complete(self) -> None:
        """Schreier-Sims: sift every Schreier generator until all reduce to identity."""
        i = len(self.levels) - 1
        while i >= 0:
            lev = self.levels[i]
            jumped = False
            idx = min(lev.done) if lev.done else len(lev.orbit)
            while idx < len(lev.orbit) and not jumped:
                beta = lev.orbit[idx]
                u_beta = None
                for j in range(len(lev.gens)):
                    if lev.done[j] > idx:
                        continue
                    lev.done[j] = idx + 1
                    s = lev.gens[j]
                    gi = int(lev.pos[s[beta]])
                    if lev.parent[gi] == idx and lev.pgen[gi] == j:
                        continue
                    if u_beta is None:
                        u_beta = lev.u(idx)
                    h = lev.uinv(gi)[s[u_beta]]
                    r, d = self.strip(h, i + 1)
                    if not self.is_identity(r):
                        i = self._insert(r, i + 1, d)
                        jumped = True
                        break
                idx += 1
            if not jumped:
                i -= 1

    def fill_random(self, source, target_order: int, max_tries: int = 100000) -> None:
        """Randomized build: sift elements from ``source()`` until the order is reached."""
        tries = 0
        while self.order() < target_order:
            tries += 1
            if tries > max_tries:
                raise ChainBudgetError("random Schreier-Sims did not reach the target order")
            g = source()
            r, d = self.strip(g)
            if not self.is_identity(r):
                self._insert(r, 0, d)
        if self.order() != target_order:
            raise ChainBudgetError("chain order overshoots the target order")

    # -- derived data -------------------------------------------------------

    def tail(self, start: int, n: int | None = None) -> StabChain:
        """Chain for the stabilizer of the first ``start`` base points, optionally cut to ``n`` points."""
        n = self.n if n is None else n
        ch = StabChain.__new__(StabChain)
        ch.n = n
        ch.ident = identity_array(n)
        if n == self.n:
            ch.levels = self.levels[start:]
        else:
            ch.levels = [lev.restricted(n) for lev in self.levels[start:]]
        ch.levels = [lev for lev in ch.levels if len(lev.orbit) > 1 or lev.gens]
        return ch

    def random_element(self, rng: random.Random) -> np.ndarray:
        g = self.ident
        for lev in reversed(self.levels):
            idx = rng.randrange(len(lev.orbit))
            if idx:
                g = lev.u(idx)[g]
        return g

    def transversal_arrays(self, i: int) -> np.ndarray:
        lev = self.levels[i]
        return np.stack([lev.u(k) for k in range(len(lev.orbit))])

    def elements(self, limit: int = 2_000_000, cols=None) -> np.ndarray:
        """All group elements as rows, ordered by the chain (identity first).

        With ``cols`` only those image columns are produced, which is enough
        to address elements by their base images without materializing them.
        """
        if self.order() > limit:
            raise ChainBudgetError(f"group order {self.order()} exceeds enumeration limit {limit}")
        E = self.ident[None, :] if cols is None else self.ident[None, np.asarray(cols, dtype=np.int64)]
        for i in reversed(range(len(self.levels))):
            U = self.transversal_arrays(i)
            E = U[:, E].reshape(-1, E.shape[1])
        return E

    def element_at(self, index: int) -> np.ndarray:
        """The element in row ``index`` of :meth:`elements`."""
        sizes = [len(lev.orbit) for lev in self.levels]
        digits = []
        for m in reversed(sizes):
            index, d = divmod(index, m)
            digits.append(d)
        digits.reverse()
        if index:
            raise IndexError("element index out of range")
        g = self.ident
        for i in reversed(range(len(self.levels))):
            if digits[i]:
                g = self.levels[i].u(digits[i])[g]
        return g

    def coset_key(self, x: np.ndarray) -> bytes:
        """Key of the right coset H*x: its canonical element, least base images level by level."""
        for lev in self.levels:
            vals = x[lev.orbit_array]
            k = int(vals.argmin())
            if k:
                x = x[lev.u(k)]
        return np.ascontiguousarray(x).tobytes()


class ProductReplacement:
    """Seeded product-replacement random elements of the group generated by ``gens``."""

    def __init__(self, gens: list[np.ndarray], n: int, seed: int = 0, warmup: int = 50):
        self.rng = random.Random(seed)
        ident = identity_array(n)
        gens = [np.asarray(g) for g in gens] or [ident]
        state = list(gens)
        while len(state) < 10:
            state.extend(gens)
        self.state = state
        self.acc = ident
        for _ in range(warmup):
            self()

    def __call__(self) -> np.ndarray:
        rng = self.rng
        s = self.state
        i = rng.randrange(len(s))
        j = rng.randrange(len(s) - 1)
        if j >= i:
            j += 1
        if rng.random() < 0.5:
            s[i] = s[j][s[i]]
        else:
            s[i] = s[i][s[j]]
        self.acc = s[i][self.acc]
        return self.acc
