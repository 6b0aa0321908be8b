"""Combinatorial enumerators: linear and rectangle divisions, binnings.

Multisets of integers are tuples sorted in descending order.  Limits are
compared lexicographically; a limit forbids any result that is larger.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

IntMultiset = tuple


def _ms(xs: Iterable[int]) -> IntMultiset:
    return tuple(sorted(xs, reverse=True))


def _remove_one(ms: IntMultiset, x: int) -> IntMultiset:
    i = ms.index(x)
    return ms[:i] + ms[i + 1:]


def _distinct(ms: Sequence[int]) -> list[int]:
    return sorted(set(ms), reverse=True)


def linear_divisions(n: int, N: Iterable[int], L: Sequence[int] | None = None) -> list[IntMultiset]:
    """All sub-multisets of ``N`` summing to ``n``, each at most ``L``."""
    N = _ms(N)
    return _lindiv(n, N, (n,) if L is None else tuple(L))


def _lindiv(n: int, N: IntMultiset, L: tuple) -> list[IntMultiset]:
    if n == 0:
        return [()]
    if not L:
        return []
    out = []
    for m1 in _distinct(N):
        if m1 <= min(n, L[0]):
            rest = _remove_one(N, m1)
            lim = L[1:] if m1 == L[0] else (m1,) * (n - m1)
            for tail in _lindiv(n - m1, rest, lim):
                out.append((m1,) + tail)
    return out


def _divisors(a: int) -> list[int]:
    return [k for k in range(1, a + 1) if a % k == 0]


def rectangle_divisions(w: int, h: int, A: Iterable[int],
                        L: tuple | None = None) -> list[tuple]:
    """Divisions of a ``w`` by ``h`` rectangle into columns of cells.

    Each result is a tuple of ``(w_i, (h_i1, h_i2, ...))`` with
    ``sum w_i = w``, ``sum_j h_ij = h`` for every ``i`` and the areas
    ``w_i h_ij`` forming the multiset ``A``.
    """
    A = _ms(A)
    if L is None:
        L = (w, (h,))
    return _recdiv(w, h, A, L)


def _recdiv(w: int, h: int, A: IntMultiset, L: tuple) -> list[tuple]:
    if w == 0:
        return [()] if not A else []
    if not A:
        return []
    wL, hL = L
    out = []
    widths = sorted({k for a in set(A) for k in _divisors(a)}, reverse=True)
    for w1 in widths:
        if w1 > min(w, wL):
            continue
        H = [a // w1 for a in A if a % w1 == 0]
        hdivs = _lindiv(h, _ms(H), tuple(hL)) if w1 == wL else _lindiv(h, _ms(H), (h,))
        for hs in hdivs:
            rest = A
            for x in hs:
                rest = _remove_one(rest, w1 * x)
            for tail in _recdiv(w - w1, h, rest, (w1, hs)):
                out.append(((w1, hs),) + tail)
    return out


def binnings(m: Sequence[int], n: Sequence[int],
             V: Callable[[tuple, int], bool], S: Callable[[tuple, int], bool],
             B0: Sequence[Sequence[tuple]] | None = None,
             limit: int | None = None) -> list[tuple]:
    """All total valid binnings of items ``m`` into bins ``n``.

    ``m[i]`` copies of item ``i`` go into bins; bin type ``j`` has ``n[j]``
    indistinguishable copies.  A result is a tuple over bin types of
    sorted tuples of ``n[j]`` content vectors.  ``V(b, j)`` says content
    ``b`` is valid for bin type ``j``; ``S`` is the semi-validity test,
    which must hold on everything below a valid content.
    """
    r = len(m)
    if B0 is None:
        B = [[(0,) * r for _ in range(nj)] for nj in n]
    else:
        B = [[tuple(b) for b in Bj] for Bj in B0]
        used = [sum(b[i] for Bj in B for b in Bj) for i in range(r)]
        m = [mi - ui for mi, ui in zip(m, used)]
        if any(x < 0 for x in m):
            return []
    out: list[tuple] = []
    _bin(list(m), B, V, S, out, limit, None, None)
    return out


def _bin(m, B, V, S, out, limit, cur_item, min_class) -> None:
    if limit is not None and len(out) >= limit:
        return
    for j, Bj in enumerate(B):
        for b in Bj:
            if not S(b, j):
                if V(b, j):
                    raise ValueError("semi-validity must hold wherever validity does")
                return
    if all(x == 0 for x in m):
        if all(V(b, j) for j, Bj in enumerate(B) for b in Bj):
            out.append(tuple(tuple(sorted(Bj)) for Bj in B))
        return
    i = next(k for k, x in enumerate(m) if x)
    if i != cur_item:
        min_class = None
    m[i] -= 1
    for j, Bj in enumerate(B):
        classes = sorted({b[:i] + (0,) + b[i + 1:] for b in Bj})
        for bp in classes:
            key = (j, bp)
            # fill one class at a time so each outcome arises once
            if min_class is not None and key < min_class:
                continue
            vals = [b[i] for b in Bj if b[:i] + (0,) + b[i + 1:] == bp]
            top = max(vals)
            b0 = bp[:i] + (top,) + bp[i + 1:]
            # increase the highest value
            b1 = bp[:i] + (top + 1,) + bp[i + 1:]
            _bin(m, _replace(B, j, b0, b1), V, S, out, limit, i, key)
            # increase the next one down
            bm = bp[:i] + (top - 1,) + bp[i + 1:]
            if top >= 1 and bm in Bj:
                _bin(m, _replace(B, j, bm, b0), V, S, out, limit, i, key)
    m[i] += 1


def _replace(B, j, old, new):
    Bj = list(B[j])
    Bj[Bj.index(old)] = new
    B2 = list(B)
    B2[j] = Bj
    return B2


def is_refinement(v1: Iterable[int], v2: Iterable[int]) -> bool:
    """Can ``v1`` be grouped into parts whose sums are exactly ``v2``?"""
    v1, v2 = _ms(v1), _ms(v2)
    if sum(v1) != sum(v2):
        return False
    if len(v1) < len(v2):
        return False

    def place(k: int, caps: list[int]) -> bool:
        if k == len(v1):
            return all(c == 0 for c in caps)
        seen = set()
        for t, c in enumerate(caps):
            if c >= v1[k] and c not in seen:
                seen.add(c)
                caps[t] -= v1[k]
                if place(k + 1, caps):
                    caps[t] += v1[k]
                    return True
                caps[t] += v1[k]
        return False
    return place(0, list(v2))

