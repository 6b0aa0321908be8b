"""Brute-force reference enumerators shared by the unit and acceptance tests."""

from __future__ import annotations

import itertools
from collections import Counter

from padicgal import perm as P
from padicgal.choice import orbit_partition


def multiset(xs):
    return tuple(sorted(xs, reverse=True))


def integer_partitions(n, max_part=None):
    """Partitions of ``n`` as descending tuples."""
    max_part = n if max_part is None else max_part
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in integer_partitions(n - k, k):
            yield (k,) + rest


def brute_linear_divisions(n, N):
    """Distinct sub-multisets of ``N`` with sum ``n``."""
    N = list(N)
    out = set()
    for k in range(len(N) + 1):
        for idx in itertools.combinations(range(len(N)), k):
            pick = [N[i] for i in idx]
            if sum(pick) == n:
                out.add(multiset(pick))
    return out


def all_rectangle_divisions(w, h, max_cells):
    """Map area multiset -> set of divisions of a ``w`` by ``h`` rectangle."""
    columns = [(wi, hs) for wi in range(1, w + 1) for hs in integer_partitions(h)]
    out: dict[tuple, set] = {}

    def rec(rem, start, cells, chosen):
        if rem == 0:
            areas = multiset(wi * x for wi, hs in chosen for x in hs)
            out.setdefault(areas, set()).add(tuple(sorted(chosen, reverse=True)))
            return
        for k in range(start, len(columns)):
            wi, hs = columns[k]
            if wi <= rem and cells + len(hs) <= max_cells:
                rec(rem - wi, k, cells + len(hs), chosen + [(wi, hs)])
    rec(w, 0, 0, [])
    return out


def canonical_division(div):
    return tuple(sorted(((wi, tuple(sorted(hs, reverse=True))) for wi, hs in div), reverse=True))


def brute_binnings(m, n, V):
    """Valid total binnings by assigning every item copy to a labelled bin."""
    r = len(m)
    bins = [(j, k) for j, nj in enumerate(n) for k in range(nj)]
    out = set()

    def per_item(i):
        # distributions of m[i] copies over the labelled bins
        for combo in itertools.combinations_with_replacement(range(len(bins)), m[i]):
            cnt = Counter(combo)
            yield [cnt.get(b, 0) for b in range(len(bins))]

    for choice in itertools.product(*(per_item(i) for i in range(r))):
        contents = [tuple(choice[i][b] for i in range(r)) for b in range(len(bins))]
        if not all(V(c, bins[b][0]) for b, c in enumerate(contents)):
            continue
        grouped = []
        for j, nj in enumerate(n):
            grouped.append(tuple(sorted(c for b, c in enumerate(contents) if bins[b][0] == j)))
        out.add(tuple(grouped))
    return out


def brute_subgroup_partitions(W: P.PermGroup):
    """``{partition: index}`` for orbit partitions of all subgroups of ``W``,
    one representative per ``W``-conjugacy class of partitions."""
    found: list[tuple] = []
    for U in W.subgroup_classes():
        X = orbit_partition(U)
        S = W.partition_stabilizer(X)
        if any(sorted(map(len, Y)) == sorted(map(len, X)) and T.order() == S.order()
               and W.is_conjugate(S, T) for Y, T, _ in found):
            continue
        found.append((X, S, W.order() // S.order()))
    return {X: idx for X, _, idx in found}


def conjugates_in(W: P.PermGroup, G: P.PermGroup):
    """Distinct ``W``-conjugates of ``G``."""
    seen, out = set(), []
    for w in W.elements():
        H = G.conjugate(w)
        key = frozenset(map(tuple, H.elements()))
        if key not in seen:
            seen.add(key)
            out.append(H)
    return out
