"""Finite simple groups of order at most 10^8: identifiers, order formulas, catalog data.

The catalog ships as ``data/simple_groups.json``.  On load every row is
checked against the order formulas below, and the set of rows must agree
with the set generated from the formulas.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from math import factorial, gcd, prod

from .arith import divisors, is_prime, prime_power

ORDER_LIMIT = 10 ** 8

SPORADIC_ORDERS = {
    "M11": 7920,
    "M12": 95040,
    "J1": 175560,
    "M22": 443520,
    "J2": 604800,
    "M23": 10200960,
    "HS": 44352000,
    "J3": 50232960,
}

# (tag, n, q) -> canonical name of an isomorphic group listed elsewhere
_COINCIDENCES = {
    ("L", 2, 4): "A5",
    ("L", 2, 5): "A5",
    ("L", 2, 9): "A6",
    ("L", 3, 2): "PSL(2,7)",
    ("L", 4, 2): "A8",
    ("S", 4, 3): "PSU(4,2)",
}

EXTRA_ALIASES = {
    "PSL(2,7)": ["GL(3,2)", "SL(3,2)", "L2(7)", "L3(2)"],
    "A5": ["PSL(2,4)", "PSL(2,5)", "SL(2,4)"],
    "A6": ["PSL(2,9)", "PSp(4,2)'"],
    "A8": ["PSL(4,2)", "GL(4,2)"],
    "PSU(4,2)": ["PSp(4,3)"],
    "PSU(3,3)": ["G2(2)'"],
}


class UnknownSimpleGroup(LookupError):
    pass


@dataclass(frozen=True, order=True)
class SimpleGroupId:
    """A finite simple group up to isomorphism; ordered by (order, name)."""

    order: int
    name: str
    kind: str = field(compare=False)
    params: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind == "cyclic" and not is_prime(self.order):
            raise ValueError(f"cyclic simple group of non-prime order {self.order}")
        if self.kind != "cyclic" and self.order < 60:
            raise ValueError(f"nonabelian simple group of order {self.order}")

    @property
    def is_abelian(self) -> bool:
        return self.kind == "cyclic"

    def __str__(self) -> str:
        return self.name


def cyclic(p: int) -> SimpleGroupId:
    return SimpleGroupId(p, f"C{p}", "cyclic", (p,))


def alternating(n: int) -> SimpleGroupId:
    return lookup(f"A{n}")


# -- order and Out formulas -----------------------------------------------------

def order_psl(n: int, q: int) -> int:
    return q ** (n * (n - 1) // 2) * prod(q ** i - 1 for i in range(2, n + 1)) // gcd(n, q - 1)


def order_psu(n: int, q: int) -> int:
    return q ** (n * (n - 1) // 2) * prod(q ** i - (-1) ** i for i in range(2, n + 1)) // gcd(n, q + 1)


def order_psp(n: int, q: int) -> int:
    m = n // 2
    return q ** (m * m) * prod(q ** (2 * i) - 1 for i in range(1, m + 1)) // gcd(2, q - 1)


def order_g2(q: int) -> int:
    return q ** 6 * (q ** 6 - 1) * (q ** 2 - 1)


def order_sz(q: int) -> int:
    return q ** 2 * (q ** 2 + 1) * (q - 1)


TITS_ORDER = 17971200


def family_order(tag: str, params: tuple) -> int:
    if tag == "A":
        return factorial(params[0]) // 2
    if tag == "L":
        return order_psl(*params)
    if tag == "U":
        return order_psu(*params)
    if tag == "S":
        return order_psp(*params)
    if tag == "G2":
        return order_g2(params[0])
    if tag == "Sz":
        return order_sz(params[0])
    if tag == "2F4":
        return TITS_ORDER
    if tag == "spor":
        return SPORADIC_ORDERS[params[0]]
    raise ValueError(f"unknown family {tag}")


def family_out_order(tag: str, params: tuple) -> int:
    """Order of the outer automorphism group."""
    if tag == "A":
        return 4 if params[0] == 6 else 2
    if tag in ("L", "U", "S", "G2", "Sz"):
        q = params[-1]
        p, f = prime_power(q)
    if tag == "L":
        n = params[0]
        return gcd(2, q - 1) * f if n == 2 else 2 * gcd(n, q - 1) * f
    if tag == "U":
        return gcd(params[0], q + 1) * 2 * f
    if tag == "S":
        n = params[0]
        if n == 4 and p == 2:
            return 2 * f
        return gcd(2, q - 1) * f
    if tag == "G2":
        return 2 * f if p == 3 else f
    if tag == "Sz":
        return f
    if tag == "2F4":
        return 2
    if tag == "spor":
        return {"M11": 1, "M12": 2, "J1": 1, "M22": 2, "J2": 2, "M23": 1, "HS": 2, "J3": 2}[params[0]]
    raise ValueError(f"unknown family {tag}")


def family_name(tag: str, params: tuple) -> str:
    if tag == "A":
        return f"A{params[0]}"
    if tag == "L":
        return f"PSL({params[0]},{params[1]})"
    if tag == "U":
        return f"PSU({params[0]},{params[1]})"
    if tag == "S":
        return f"PSp({params[0]},{params[1]})"
    if tag == "G2":
        return f"G2({params[0]})"
    if tag == "Sz":
        return f"Sz({params[0]})"
    if tag == "2F4":
        return "2F4(2)'"
    return params[0]


def family_kind(tag: str) -> str:
    return {"A": "alternating", "spor": "sporadic"}.get(tag, "classical")


def _prime_powers(lo: int, hi: int):
    return [q for q in range(lo, hi + 1) if prime_power(q)]


def formula_rows(limit: int = ORDER_LIMIT) -> list[tuple[str, tuple]]:
    """All (tag, params) of nonabelian simple groups of order <= limit, one per isomorphism type."""
    rows: list[tuple[str, tuple]] = []
    n = 5
    while factorial(n) // 2 <= limit:
        rows.append(("A", (n,)))
        n += 1
    for dim, fn, qmin in ((2, order_psl, 4), (3, order_psl, 2), (4, order_psl, 2), (5, order_psl, 2),
                          (6, order_psl, 2), (3, order_psu, 3), (4, order_psu, 2), (5, order_psu, 2),
                          (6, order_psu, 2)):
        tag = "L" if fn is order_psl else "U"
        q = qmin
        while fn(dim, q) <= limit * 64:
            if prime_power(q) and fn(dim, q) <= limit and (tag, dim, q) not in _COINCIDENCES:
                rows.append((tag, (dim, q)))
            q += 1
    for dim in (4, 6, 8):
        q = 2
        while order_psp(dim, q) <= limit * 64:
            simple = not (dim == 4 and q == 2)
            if prime_power(q) and simple and order_psp(dim, q) <= limit and ("S", dim, q) not in _COINCIDENCES:
                rows.append(("S", (dim, q)))
            q += 1
    q = 3
    while order_g2(q) <= limit * 64:
        if prime_power(q) and order_g2(q) <= limit:
            rows.append(("G2", (q,)))
        q += 1
    f = 3
    while order_sz(2 ** f) <= limit:
        rows.append(("Sz", (2 ** f,)))
        f += 2
    if TITS_ORDER <= limit:
        rows.append(("2F4", ("2",)))
    for name, o in SPORADIC_ORDERS.items():
        if o <= limit:
            rows.append(("spor", (name,)))
    return rows


# -- spectra ----------------------------------------------------------------------

def _partitions(n: int, maxpart: int | None = None):
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def alternating_spectrum(n: int) -> list[int]:
    from math import lcm
    out = set()
    for part in _partitions(n):
        if sum(1 for x in part if x % 2 == 0) % 2 == 0:
            out.add(lcm(*part))
    return sorted(out)


def psl2_spectrum(q: int) -> list[int]:
    p, _ = prime_power(q)
    d = gcd(2, q - 1)
    out = {1, p} | set(divisors((q - 1) // d)) | set(divisors((q + 1) // d))
    return sorted(out)


# -- catalog data -----------------------------------------------------------------

@dataclass(frozen=True)
class SimpleRow:
    ident: SimpleGroupId
    tag: str
    out_order: int
    aliases: tuple[str, ...]
    spectrum: tuple[int, ...] | None
    sections: tuple[str, ...] | None
    oracles: dict


@lru_cache(maxsize=None)
def _load() -> tuple[dict[str, SimpleRow], dict[int, list[SimpleRow]]]:
    text = resources.files("qlocal").joinpath("data/simple_groups.json").read_text()
    data = json.loads(text)
    by_name: dict[str, SimpleRow] = {}
    by_order: dict[int, list[SimpleRow]] = {}
    seen = set()
    for r in data["rows"]:
        tag = r["tag"]
        params = tuple(r["params"])
        order = family_order(tag, params)
        if order != r["order"]:
            raise RuntimeError(f"catalog order for {r['name']} disagrees with its formula")
        seen.add((tag, params))
        ident = SimpleGroupId(order, r["name"], family_kind(tag), params)
        row = SimpleRow(ident, tag, r["out_order"], tuple(r.get("aliases", ())),
                        tuple(r["spectrum"]) if r.get("spectrum") else None,
                        tuple(r["sections"]) if r.get("sections") else None,
                        r.get("oracle", {}))
        for key in (r["name"],) + row.aliases:
            by_name[key] = row
        by_order.setdefault(order, []).append(row)
    expected = set(formula_rows(data.get("order_limit", ORDER_LIMIT)))
    if seen != expected:
        raise RuntimeError("catalog rows do not match the order formulas")
    return by_name, by_order


def catalog_rows() -> list[SimpleRow]:
    by_name, _ = _load()
    rows = {r.ident.name: r for r in by_name.values()}
    return sorted(rows.values(), key=lambda r: r.ident)


def row_for(ident: SimpleGroupId | str) -> SimpleRow:
    name = ident if isinstance(ident, str) else ident.name
    by_name, _ = _load()
    if name not in by_name:
        raise UnknownSimpleGroup(f"{name} is not in the simple group catalog")
    return by_name[name]


def lookup(name: str) -> SimpleGroupId:
    if name.startswith("C") and name[1:].isdigit() and is_prime(int(name[1:])):
        return cyclic(int(name[1:]))
    return row_for(name).ident


def candidates_by_order(order: int) -> list[SimpleRow]:
    _, by_order = _load()
    return list(by_order.get(order, []))


def out_order(ident: SimpleGroupId | str) -> int:
    return row_for(ident).out_order


def simple_orders() -> list[int]:
    _, by_order = _load()
    return sorted(by_order)


def section_set(ident: SimpleGroupId) -> tuple[frozenset[SimpleGroupId], bool]:
    """Simple sections of a simple group and whether the set is known to be complete."""
    if ident.is_abelian:
        return frozenset({ident}), True
    row = row_for(ident)
    if row.sections is not None:
        return frozenset(lookup(s) for s in row.sections), True
    from .arith import prime_divisors
    approx = {cyclic(p) for p in prime_divisors(ident.order)} | {ident}
    return frozenset(approx), False
