"""Subgroup choice: tranches of candidate subgroups ``U <= W``.

Tranches are produced lazily in order of increasing index, so the
deduction loop forms the smallest useful resolvent it can find.

``OrbitIndex`` tranches are built from subgroup partitions: partitions of
the points that occur as the orbits of some subgroup.  The partitions of a
given index are enumerated from the shape of ``W`` (symmetric, direct
product, wreath product), falling back to the full subgroup lattice for
explicit groups.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from . import perm as P
from .errors import InputError
from .model import shape_group

Partition = tuple  # tuple of sorted point tuples, sorted


def divisors(n: int) -> list[int]:
    small = [k for k in range(1, math.isqrt(n) + 1) if n % k == 0]
    return sorted(set(small + [n // k for k in small]))


def vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def orbit_partition(G: P.PermGroup) -> Partition:
    return tuple(sorted(tuple(sorted(o)) for o in G.orbits()))


# ------------------------------------------------------------------ chooser

@dataclass(frozen=True)
class Chooser:
    """``All``, ``Index`` or ``OrbitIndex[val<=k]`` (``k=None``: no filter)."""
    kind: str
    max_val: int | None = None

    def format(self) -> str:
        if self.kind == "OrbitIndex":
            return f"OrbitIndex[val<={'inf' if self.max_val is None else self.max_val}]"
        return self.kind


def parse_chooser(text: str) -> Chooser:
    """Bare ``OrbitIndex`` keeps remaining orbit indices with ``v_p(r) <= 1``."""
    t = text.strip()
    if t in ("All", "Index"):
        return Chooser(t)
    if t == "OrbitIndex":
        return Chooser("OrbitIndex", 1)
    m = re.fullmatch(r"OrbitIndex\[\s*val\s*<=\s*(\d+|inf)\s*\]", t)
    if m:
        return Chooser("OrbitIndex", None if m.group(1) == "inf" else int(m.group(1)))
    raise InputError(f"unknown subgroup choice {text!r}")


@dataclass
class Tranche:
    descriptor: tuple
    _realize: object = field(repr=False)
    _groups: list | None = field(default=None, repr=False)

    @property
    def groups(self) -> list[P.PermGroup]:
        if self._groups is None:
            self._groups = list(self._realize())
        return self._groups

    def format(self) -> str:
        kind, *args = self.descriptor
        return kind + ("(" + ",".join(map(str, args)) + ")" if args else "")


def tranches(W: P.PermGroup, shape, chooser: Chooser, p: int) -> Iterator[Tranche]:
    """Tranches of subgroups of ``W`` (each up to ``W``-conjugacy)."""
    if chooser.kind == "All":
        yield Tranche(("all",), lambda: sorted(W.subgroup_classes(), key=lambda U: -U.order()))
        return
    N = W.order()
    for n in divisors(N):
        if chooser.kind == "Index":
            yield Tranche(("index", n), lambda n=n: W.subgroups_of_index(n))
            continue
        for r in divisors(n):
            if chooser.max_val is not None and vp_int(r, p) > chooser.max_val:
                continue
            yield Tranche(("orbit-index", n, r),
                          lambda n=n, r=r: realize_orbit_index_tranche(W, shape, n, r))


# ------------------------------------------------------- subgroup partitions

@dataclass(frozen=True)
class SubgroupPartition:
    blocks: Partition
    index: int


def shape_key(shape):
    kind, data = shape
    if kind == "sym":
        return shape
    if kind == "group":
        return ("group", data.format())
    return (kind, tuple(shape_key(s) for s in data))


def _shape_of_key(key, groups: dict):
    kind, data = key
    if kind == "sym":
        return key
    if kind == "group":
        return ("group", groups[data])
    return (kind, [_shape_of_key(k, groups) for k in data])


def shape_degree(shape) -> int:
    kind, data = shape
    if kind == "sym":
        return data
    if kind == "group":
        return data.degree
    degs = [shape_degree(s) for s in data]
    return math.prod(degs) if kind == "wreath" else sum(degs)


def shape_order(shape) -> int:
    kind, data = shape
    if kind == "sym":
        return math.factorial(data)
    if kind == "group":
        return data.order()
    if kind == "direct":
        return math.prod(shape_order(s) for s in data)
    # wreath: innermost first
    total = 1
    for s in reversed(data):
        total = total ** shape_degree(s) * shape_order(s)
    return total


_GROUPS: dict[str, P.PermGroup] = {}


def subgroup_partitions(shape, m: int) -> list[SubgroupPartition]:
    """Subgroup partitions of index ``m`` for the group of ``shape``, up to conjugacy."""
    return list(_partitions(_register(shape), m))


def _register(shape):
    kind, data = shape
    if kind == "group":
        _GROUPS.setdefault(data.format(), data)
    elif kind in ("wreath", "direct"):
        for s in data:
            _register(s)
    return shape_key(shape)


@lru_cache(maxsize=None)
def _partitions(key, m: int) -> tuple[SubgroupPartition, ...]:
    shape = _shape_of_key(key, _GROUPS)
    kind, data = shape
    if shape_order(shape) % m:
        return ()
    if kind == "sym":
        return tuple(_sym_partitions(data, m))
    if kind == "group":
        return tuple(x for x in _explicit_partitions(key) if x.index == m)
    if kind == "direct":
        return tuple(_direct_partitions(list(data), m))
    return tuple(_wreath_partitions(list(data), m))


def _sym_partitions(d: int, m: int) -> list[SubgroupPartition]:
    out = []

    def rec(rem, mx, sizes):
        if rem == 0:
            idx = math.factorial(d) // math.prod(math.factorial(s) for s in sizes)
            if idx == m:
                out.append(SubgroupPartition(_blocks_from_sizes(sizes), idx))
            return
        for s in range(min(rem, mx), 0, -1):
            rec(rem - s, s, sizes + [s])
    rec(d, d, [])
    return out


def _blocks_from_sizes(sizes: Sequence[int]) -> Partition:
    blocks, k = [], 0
    for s in sizes:
        blocks.append(tuple(range(k, k + s)))
        k += s
    return tuple(sorted(blocks))


@lru_cache(maxsize=None)
def _explicit_partitions(key) -> tuple[SubgroupPartition, ...]:
    G = _GROUPS[key[1]]
    seen: dict[Partition, int] = {}
    for U in G.subgroup_classes():
        X = orbit_partition(U)
        if X not in seen:
            seen[X] = G.order() // G.partition_stabilizer(X).order()
    return tuple(_dedupe(G, [SubgroupPartition(X, i) for X, i in seen.items()]))


def _dedupe(G: P.PermGroup, parts: Sequence[SubgroupPartition]) -> list[SubgroupPartition]:
    """One partition per ``G``-conjugacy class (compared through stabilisers)."""
    if G.order() > P.TABLE_CAP:
        return list(parts)
    kept: list[tuple[SubgroupPartition, P.PermGroup]] = []
    for X in parts:
        S = G.partition_stabilizer(X.blocks)
        sizes = sorted(len(b) for b in X.blocks)
        if any(sorted(len(b) for b in Y.blocks) == sizes and T.order() == S.order()
               and G.is_conjugate(S, T) for Y, T in kept):
            continue
        kept.append((X, S))
    return [X for X, _ in kept]


def _direct_partitions(shapes: list, m: int) -> list[SubgroupPartition]:
    if not shapes:
        return [SubgroupPartition((), 1)] if m == 1 else []
    first, rest = shapes[0], shapes[1:]
    d1 = shape_degree(first)
    out = []
    for m1 in divisors(math.gcd(m, shape_order(first))):
        S1 = _partitions(shape_key(first), m1)
        if not S1:
            continue
        S2 = _direct_partitions(rest, m // m1)
        for X1 in S1:
            for X2 in S2:
                shifted = tuple(tuple(x + d1 for x in b) for b in X2.blocks)
                out.append(SubgroupPartition(tuple(sorted(X1.blocks + shifted)), m))
    return out


def _wreath_partitions(shapes: list, m: int) -> list[SubgroupPartition]:
    B = shapes[0]
    A = shapes[1] if len(shapes) == 2 else ("wreath", shapes[1:])
    a, e = shape_degree(A), shape_degree(B)
    nA = shape_order(A)
    out = []
    for m1 in divisors(m):
        for X in _partitions(shape_key(B), m1):
            for fac in _factorizations(m // m1, [len(b) for b in X.blocks], nA):
                options = [_partitions(shape_key(A), mx) for mx in fac]
                if any(not o for o in options):
                    continue
                for choice in itertools.product(*options):
                    blocks = []
                    for xb, Y in zip(X.blocks, choice):
                        for yb in Y.blocks:
                            blocks.append(tuple(sorted(x * a + y for x in xb for y in yb)))
                    out.append(SubgroupPartition(tuple(sorted(blocks)), m))
    W = shape_group(("wreath", shapes))
    return _dedupe(W, _unique(out))


def _factorizations(n: int, sizes: Sequence[int], bound_order: int) -> list[tuple]:
    """Tuples ``(m_X)`` with ``prod m_X^{sizes[X]} = n`` and ``m_X | bound_order``."""
    out = []

    def rec(i, rem, acc):
        if i == len(sizes):
            if rem == 1:
                out.append(tuple(acc))
            return
        for mx in divisors(bound_order):
            q = mx ** sizes[i]
            if rem % q == 0:
                rec(i + 1, rem // q, acc + [mx])
    rec(0, n, [])
    return out


def _unique(parts):
    seen, out = set(), []
    for X in parts:
        if X.blocks not in seen:
            seen.add(X.blocks)
            out.append(X)
    return out


# -------------------------------------------------------- tranche realisation

_TRANCHES: dict[tuple, list[P.PermGroup]] = {}


def realize_orbit_index_tranche(W: P.PermGroup, shape, n: int, r: int) -> list[P.PermGroup]:
    """Subgroups of index ``n`` and remaining orbit index ``r``, up to conjugacy."""
    if n % r:
        return []
    key = (W.format(), shape_key(shape), n, r)
    if key not in _TRANCHES:
        if "_lattice" in W.__dict__:
            found = _tranche_from_lattice(W, n, r)
        else:
            found = _tranche_from_partitions(W, shape, n, r)
        _TRANCHES[key] = found
    return _TRANCHES[key]


def _tranche_from_lattice(W: P.PermGroup, n: int, r: int) -> list[P.PermGroup]:
    """Filter an already computed subgroup lattice by orbit index."""
    m = n // r
    return [U for U in W.subgroups_of_index(n)
            if W.order() // W.partition_stabilizer(orbit_partition(U)).order() == m]


def _tranche_from_partitions(W: P.PermGroup, shape, n: int, r: int) -> list[P.PermGroup]:
    m = n // r
    found: list[P.PermGroup] = []
    for X in subgroup_partitions(shape, m):
        S = W.partition_stabilizer(X.blocks)
        for U in S.subgroups_of_index(r):
            if orbit_partition(U) != X.blocks:
                continue
            if any(V.order() == U.order() and W.is_conjugate(U, V) for V in found):
                continue
            found.append(U)
    return found
