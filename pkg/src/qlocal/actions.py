"""Coset actions, action kernels, and restrictions to invariant sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chain import ProductReplacement, StabChain
from .group import GroupError, PermGroup, is_subgroup
from .perm import Permutation, point_dtype

DEFAULT_MAX_INDEX = 20_000


class IndexTooLarge(GroupError):
    pass


@dataclass
class CosetSpace:
    parent: PermGroup
    subgroup: PermGroup
    reps: list[np.ndarray]
    index: int
    keys: dict[bytes, int] = field(default_factory=dict, repr=False)

    def rep(self, i: int) -> Permutation:
        return Permutation(self.reps[i], check=False)

    def locate(self, x: np.ndarray | Permutation) -> int:
        """Index of the coset ``h*x``."""
        arr = x.images if isinstance(x, Permutation) else np.asarray(x)
        key = self.subgroup.chain.coset_key(arr.astype(self.reps[0].dtype))
        if key not in self.keys:
            raise GroupError("element is not in the parent group")
        return self.keys[key]


@dataclass
class ActionImage:
    source: PermGroup
    image: PermGroup
    kernel: PermGroup
    generator_map: list[Permutation]

    @property
    def degree(self) -> int:
        return self.image.degree

    def is_faithful(self) -> bool:
        return self.kernel.order() == 1


def action_image(g: PermGroup, images: Sequence[np.ndarray], m: int, *, seed: int = 0) -> ActionImage:
    """Image and kernel of the action of ``g`` given by generator images on ``m`` points."""
    dt = point_dtype(m)
    imgs = [np.asarray(a, dtype=dt) for a in images]
    image = PermGroup.from_arrays(imgs, m)
    kernel = action_kernel(g, imgs, m, image_base=image.chain.base, seed=seed)
    image._known_order = g.order() // kernel.order()
    if image.order() * kernel.order() != g.order():
        raise GroupError("image and kernel orders are inconsistent")
    return ActionImage(g, image, kernel, [Permutation(a, check=False) for a in imgs])


def action_kernel(g: PermGroup, images: Sequence[np.ndarray], m: int, *,
                  image_base: Sequence[int] | None = None, seed: int = 0) -> PermGroup:
    """Kernel of the homomorphism sending the generators of ``g`` to ``images``.

    The diagonal group on ``n + m`` points is isomorphic to ``g``; the kernel is
    its pointwise stabilizer of a base of the image, cut back to ``n`` points.
    """
    n = g.degree
    if len(images) != len(g.generators):
        raise GroupError("one image per generator required")
    if image_base is None:
        image_base = PermGroup.from_arrays(images, m).chain.base
    dt = point_dtype(n + m)
    diag = [np.concatenate([np.asarray(s, dtype=np.int64), np.asarray(t, dtype=np.int64) + n]).astype(dt)
            for s, t in zip(g.gen_arrays, images)]
    prefix = [n + int(b) for b in image_base]
    ch = StabChain(n + m, [], prefix, complete=False)
    for d in diag:
        ch.add_generator(d, complete=False)
    target = g.order()
    if ch.order() < target:
        ch.fill_random(ProductReplacement(diag, n + m, seed), target)
    k = len(prefix)
    tail = ch.tail(k, n)
    gens = [x[:n].astype(point_dtype(n)) for x in ch.levels[k].gens] if len(ch.levels) > k else []
    return PermGroup.from_arrays(gens, n, chain=tail)


def coset_space(g: PermGroup, h: PermGroup, max_index: int = DEFAULT_MAX_INDEX,
                *, check: bool = True) -> tuple[CosetSpace, list[np.ndarray]]:
    """Right cosets ``h*x`` and the action of the generators of ``g`` on them."""
    if check and not is_subgroup(h, g):
        raise GroupError("h is not a subgroup of g")
    index = g.order() // h.order()
    if index > max_index:
        raise IndexTooLarge(f"index {index} exceeds the limit {max_index}")
    hch = h.chain
    ident = np.arange(g.degree, dtype=point_dtype(g.degree))
    reps = [ident]
    keys = {hch.coset_key(ident): 0}
    gens = g.gen_arrays
    imgs = [np.zeros(index, dtype=np.int64) for _ in gens]
    i = 0
    while i < len(reps):
        r = reps[i]
        for j, s in enumerate(gens):
            x = s[r]
            key = hch.coset_key(x)
            c = keys.get(key)
            if c is None:
                c = len(reps)
                keys[key] = c
                reps.append(x)
            imgs[j][i] = c
        i += 1
    if len(reps) != index:
        raise GroupError(f"found {len(reps)} cosets, expected {index}")
    dt = point_dtype(index)
    return CosetSpace(g, h, reps, index, keys), [a.astype(dt) for a in imgs]


def coset_action(g: PermGroup, h: PermGroup, max_index: int = DEFAULT_MAX_INDEX,
                 *, seed: int = 0) -> tuple[ActionImage, CosetSpace]:
    space, imgs = coset_space(g, h, max_index)
    return action_image(g, imgs, space.index, seed=seed), space


def restriction(g: PermGroup, pts: Sequence[int], *, seed: int = 0) -> ActionImage:
    """Action of ``g`` on a ``g``-invariant set of points, relabelled 0..len-1."""
    pts = [int(p) for p in pts]
    where = np.full(g.degree, -1, dtype=np.int64)
    where[pts] = np.arange(len(pts))
    imgs = []
    for s in g.gen_arrays:
        im = where[s[pts]]
        if (im < 0).any():
            raise GroupError("point set is not invariant")
        imgs.append(im)
    return action_image(g, imgs, len(pts), seed=seed)


def induced_group(g: PermGroup, pts: Sequence[int]) -> PermGroup:
    """The permutation group induced on an invariant set, without the kernel."""
    pts = [int(p) for p in pts]
    where = np.full(g.degree, -1, dtype=np.int64)
    where[pts] = np.arange(len(pts))
    dt = point_dtype(len(pts))
    imgs = []
    for s in g.gen_arrays:
        im = where[s[pts]]
        if (im < 0).any():
            raise GroupError("point set is not invariant")
        imgs.append(im.astype(dt))
    return PermGroup.from_arrays(imgs, len(pts))


def _block_of_pair(gens: list[list[int]], n: int, alpha: int, beta: int) -> list[int]:
    """Finest block system in which ``alpha`` and ``beta`` share a block (union-find)."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    parent[find(beta)] = find(alpha)
    queue = [(alpha, beta)]
    while queue:
        x, y = queue.pop()
        for s in gens:
            a, b = find(s[x]), find(s[y])
            if a != b:
                parent[b] = a
                queue.append((s[x], s[y]))
    return [find(x) for x in range(n)]


def block_system(g: PermGroup) -> list[list[int]] | None:
    """Some nontrivial block system of a transitive group, or ``None`` if it is primitive."""
    systems = _block_systems(g, first=True)
    return systems[0] if systems else None


def block_systems_minimal(g: PermGroup) -> list[list[list[int]]]:
    """Nontrivial block systems of a transitive group, one per stabilizer orbit that yields one.

    Each system is a list of blocks, ordered by smallest point; systems with
    the smallest blocks come first.
    """
    return _block_systems(g)


def _block_systems(g: PermGroup, first: bool = False) -> list[list[list[int]]]:
    if not g.is_transitive():
        raise GroupError("block systems need a transitive group")
    n = g.degree
    if n < 4:
        return []
    from .group import orbits_of, pointwise_stabilizer
    alpha = 0
    stab = pointwise_stabilizer(g, [alpha])
    gens = [s.tolist() for s in g.gen_arrays]
    found = {}
    for orb in orbits_of(stab.gen_arrays, n):
        beta = min(orb)
        if beta == alpha:
            continue
        labels = _block_of_pair(gens, n, alpha, beta)
        blocks: dict[int, list[int]] = {}
        for x, lab in enumerate(labels):
            blocks.setdefault(lab, []).append(x)
        if 1 < len(blocks) < n:
            system = sorted(blocks.values())
            found[tuple(map(tuple, system))] = system
            if first:
                break
    return sorted(found.values(), key=lambda s: (len(s[0]), s))


def block_action(g: PermGroup, blocks: list[list[int]], *, seed: int = 0) -> ActionImage:
    where = np.empty(g.degree, dtype=np.int64)
    for i, blk in enumerate(blocks):
        where[blk] = i
    reps = np.array([blk[0] for blk in blocks], dtype=np.int64)
    imgs = [where[s[reps]] for s in g.gen_arrays]
    return action_image(g, imgs, len(blocks), seed=seed)
