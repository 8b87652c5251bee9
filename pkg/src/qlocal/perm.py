"""Permutations on the points 0..n-1.

Permutations act on the right: ``i ^ (p * q) == (i ^ p) ^ q``.  Images are
stored as a read-only numpy array using the narrowest unsigned dtype that
fits the degree.
"""

from __future__ import annotations

import json
import re
from math import lcm
from typing import Iterable, Sequence

import numpy as np


class PermutationError(ValueError):
    pass


def point_dtype(n: int) -> np.dtype:
    if n <= 256:
        return np.dtype(np.uint8)
    if n <= 65536:
        return np.dtype(np.uint16)
    return np.dtype(np.int32)


def as_array(images: Sequence[int] | np.ndarray, n: int | None = None) -> np.ndarray:
    arr = np.asarray(images)
    if n is None:
        n = len(arr)
    return arr.astype(point_dtype(n), copy=False)


def identity_array(n: int) -> np.ndarray:
    return np.arange(n, dtype=point_dtype(n))


def inverse_array(arr: np.ndarray) -> np.ndarray:
    inv = np.empty_like(arr)
    inv[arr] = np.arange(len(arr), dtype=arr.dtype)
    return inv


def is_identity_array(arr: np.ndarray) -> bool:
    return bool((arr == np.arange(len(arr))).all())


def order_of_array(arr: np.ndarray) -> int:
    return lcm(1, *cycle_lengths(arr))


def cycle_lengths(arr: np.ndarray) -> list[int]:
    n = len(arr)
    seen = np.zeros(n, dtype=bool)
    lengths = []
    a = arr.tolist()
    for i in range(n):
        if seen[i]:
            continue
        j, k = i, 0
        while not seen[j]:
            seen[j] = True
            j = a[j]
            k += 1
        lengths.append(k)
    return lengths


class Permutation:
    """A bijection of ``range(degree)``."""

    __slots__ = ("_a", "_hash")

    def __init__(self, images: Sequence[int] | np.ndarray, *, check: bool = True):
        arr = as_array(images)
        if check:
            n = len(arr)
            if n == 0:
                raise PermutationError("degree must be positive")
            if not np.array_equal(np.sort(arr.astype(np.int64)), np.arange(n)):
                raise PermutationError("images do not form a bijection")
        arr = arr.copy() if arr.flags.writeable else arr
        arr.flags.writeable = False
        self._a = arr
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(identity_array(n), check=False)

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> Permutation:
        arr = list(range(n))
        for cyc in cycles:
            cyc = list(cyc)
            if len(set(cyc)) != len(cyc):
                raise PermutationError(f"repeated point in cycle {cyc}")
            for i, x in enumerate(cyc):
                if not 0 <= x < n:
                    raise PermutationError(f"point {x} outside 0..{n - 1}")
                arr[x] = cyc[(i + 1) % len(cyc)]
        return cls(arr)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> Permutation:
        """Parse disjoint-cycle text such as ``"(0 1 2)(3 4)"``; ``"()"`` is the identity."""
        cycles = parse_cycles(text)
        top = max((max(c) for c in cycles if c), default=-1) + 1
        if n is None:
            n = max(top, 1)
        elif top > n:
            raise PermutationError(f"point {top - 1} outside degree {n}")
        return cls.from_cycles(cycles, n)

    @classmethod
    def from_json(cls, text: str) -> Permutation:
        return cls(json.loads(text))

    @property
    def images(self) -> np.ndarray:
        return self._a

    @property
    def degree(self) -> int:
        return len(self._a)

    def __len__(self) -> int:
        return len(self._a)

    def __call__(self, i: int) -> int:
        return int(self._a[i])

    def __rxor__(self, i: int) -> int:
        return int(self._a[i])

    def __mul__(self, other: Permutation) -> Permutation:
        if other.degree != self.degree:
            raise PermutationError("degree mismatch")
        return Permutation(other._a[self._a], check=False)

    def __invert__(self) -> Permutation:
        return Permutation(inverse_array(self._a), check=False)

    def inverse(self) -> Permutation:
        return ~self

    def __pow__(self, k: int) -> Permutation:
        base = self if k >= 0 else ~self
        k = abs(k)
        result = identity_array(self.degree)
        arr = base._a
        while k:
            if k & 1:
                result = arr[result]
            arr = arr[arr]
            k >>= 1
        return Permutation(result, check=False)

    def conjugate(self, x: Permutation) -> Permutation:
        """Return ``x^-1 * self * x``."""
        return ~x * self * x

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self._a, other._a)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._a.tobytes())
        return self._hash

    def is_identity(self) -> bool:
        return is_identity_array(self._a)

    def order(self) -> int:
        return order_of_array(self._a)

    def cycles(self) -> list[tuple[int, ...]]:
        a = self._a.tolist()
        seen = set()
        out = []
        for i in range(len(a)):
            if i in seen or a[i] == i:
                continue
            cyc = [i]
            seen.add(i)
            j = a[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = a[j]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted(cycle_lengths(self._a), reverse=True))

    def support(self) -> list[int]:
        return np.nonzero(self._a != np.arange(self.degree))[0].tolist()

    def to_list(self) -> list[int]:
        return self._a.tolist()

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def __repr__(self) -> str:
        return f"Permutation({self}, degree={self.degree})"


_CYCLE_RE = re.compile(r"\(\s*(\d+(?:\s*[, ]\s*\d+)*)?\s*\)")


def _bad_position(s: str, pos: int) -> int:
    """First character of an unparseable cycle that cannot belong to it."""
    if s[pos] != "(":
        return pos
    for i in range(pos + 1, len(s)):
        if s[i] == ")":
            return i
        if not (s[i].isdigit() or s[i] in " ,"):
            return i
    return len(s)


def parse_cycles(text: str) -> list[list[int]]:
    """Split cycle text into integer lists; raise with the offending position."""
    cycles = []
    pos = 0
    s = text.strip()
    while pos < len(s):
        if s[pos].isspace():
            pos += 1
            continue
        m = _CYCLE_RE.match(s, pos)
        if m is None:
            raise PermutationError(f"cannot parse permutation {text!r} at position {_bad_position(s, pos)}")
        if m.group(1):
            cycles.append([int(x) for x in re.split(r"\s*[, ]\s*", m.group(1).strip())])
        pos = m.end()
    if not s:
        raise PermutationError("empty permutation text")
    return cycles


def power_array(arr: np.ndarray, k: int) -> np.ndarray:
    """``arr ** k`` for image arrays (negative ``k`` allowed)."""
    if k < 0:
        arr, k = inverse_array(arr), -k
    result = np.arange(len(arr), dtype=arr.dtype)
    while k:
        if k & 1:
            result = arr[result]
        arr = arr[arr]
        k >>= 1
    return result


def commutator_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a^-1 b^-1 a b`` for image arrays."""
    return b[a[inverse_array(b)[inverse_array(a)]]]
