"""Integer helpers: factorization, prime powers, factorial valuations."""

from __future__ import annotations

from math import isqrt


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for i in range(3, isqrt(n) + 1, 2):
        if n % i == 0:
            return False
    return True


def factorint(n: int) -> dict[int, int]:
    """Prime factorization by trial division (fine for the orders used here)."""
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> list[int]:
    return sorted(factorint(n))


def prime_power(q: int) -> tuple[int, int] | None:
    """``(p, f)`` with ``q == p**f`` for a prime ``p``, else None."""
    if q < 2:
        return None
    f = factorint(q)
    if len(f) != 1:
        return None
    (p, e), = f.items()
    return p, e


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorint(n).items():
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def vp_factorial(k: int, p: int) -> int:
    """Exponent of the prime ``p`` in ``k!`` (Legendre's formula)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if k < 0:
        raise ValueError("k must be non-negative")
    total = 0
    pk = p
    while pk <= k:
        total += k // pk
        pk *= p
    return total


def divides_factorial(m: int, k: int) -> bool:
    """Whether ``m`` divides ``k!``, decided prime by prime."""
    return all(vp_factorial(k, p) >= e for p, e in factorint(m).items())


def l1_check_a(x: int, k: int) -> bool:
    """Whether ``x**k`` divides ``k!`` (expected never, for x, k > 1)."""
    if x < 2 or k < 2:
        raise ValueError("x and k must exceed 1")
    return all(vp_factorial(k, p) >= e * k for p, e in factorint(x).items())


def l1_check_b(k: int, ell: int) -> bool:
    """Whether ``4**(k - k/ell)`` divides ``k!`` (expected never)."""
    if k < 2 or ell < 2:
        raise ValueError("k and ell must exceed 1")
    if k % ell:
        raise ValueError(f"{ell} does not divide {k}")
    return vp_factorial(k, 2) >= 2 * (k - k // ell)


def integer_root(n: int, m: int) -> int | None:
    """The integer ``r`` with ``r**m == n``, if any."""
    if n < 0 or m < 1:
        return None
    r = round(n ** (1.0 / m))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** m == n:
            return c
    return None
