"""Permutation groups on ``{0, ..., d-1}``.

Permutations are tuples of images, composed on the left:
``mul(g, h)[i] == g[h[i]]``.  Text form is 1-based cycle notation
prefixed with the degree, e.g. ``"4: (1 2 3 4) | (1 3)"`` for a group.

Groups of order up to ``TABLE_CAP`` get a sorted element table (numpy
``uint8`` rows) which backs the vectorised algorithms below: subgroup
lattices, normalisers, conjugacy tests and coset actions.  Larger groups
are handled through a deterministic Schreier-Sims stabiliser chain.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import deque
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ResourceCapExceeded

Perm = tuple

TABLE_CAP = int(os.environ.get("GALOIS_TABLE_CAP", 1 << 16))


# ---------------------------------------------------------------- permutations

def identity(d: int) -> Perm:
    return tuple(range(d))


def mul(g: Perm, h: Perm) -> Perm:
    return tuple(g[i] for i in h)


def inv(g: Perm) -> Perm:
    r = [0] * len(g)
    for i, x in enumerate(g):
        r[x] = i
    return tuple(r)


def conj(g: Perm, w: Perm) -> Perm:
    """``w g w^-1``."""
    r = [0] * len(g)
    for i, x in enumerate(g):
        r[w[i]] = w[x]
    return tuple(r)


def is_identity(g: Perm) -> bool:
    return all(i == x for i, x in enumerate(g))


def cycles(g: Perm) -> list[tuple[int, ...]]:
    seen = [False] * len(g)
    out = []
    for i in range(len(g)):
        if seen[i] or g[i] == i:
            seen[i] = True
            continue
        c = []
        j = i
        while not seen[j]:
            seen[j] = True
            c.append(j)
            j = g[j]
        out.append(tuple(c))
    return out


def cycle_type(g: Perm) -> tuple[int, ...]:
    seen = [False] * len(g)
    out = []
    for i in range(len(g)):
        if seen[i]:
            continue
        n = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = g[j]
            n += 1
        out.append(n)
    return tuple(sorted(out, reverse=True))


def perm_order(g: Perm) -> int:
    return reduce(math.lcm, cycle_type(g), 1)


def from_cycles(d: int, cyc: Iterable[Sequence[int]]) -> Perm:
    img = list(range(d))
    for c in cyc:
        for a, b in zip(c, list(c[1:]) + [c[0]]):
            img[a] = b
    return tuple(img)


def format_perm(g: Perm) -> str:
    cs = cycles(g)
    if not cs:
        return "()"
    return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cs)


def parse_perm(text: str, d: int) -> Perm:
    """Parse 1-based cycle notation such as ``(1 2)(3 4 5)``."""
    text = text.strip()
    g = list(range(d))
    if text in ("", "()"):
        return tuple(g)
    cur = identity(d)
    for chunk in text.replace(")", ")\n").split("\n"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise ValueError(f"bad cycle {chunk!r}")
        pts = [int(t) - 1 for t in chunk[1:-1].replace(",", " ").split()]
        if any(not 0 <= x < d for x in pts) or len(set(pts)) != len(pts):
            raise ValueError(f"bad cycle {chunk!r} for degree {d}")
        # cycles written left to right act right to left
        cur = mul(cur, from_cycles(d, [pts]))
    return cur


# ------------------------------------------------------------ stabiliser chain

class StabChain:
    """Deterministic Schreier-Sims: base, strong generators, transversals."""

    def __init__(self, degree: int, gens: Sequence[Perm]):
        self.degree = degree
        self.base: list[int] = []
        self.sgens: list[list[Perm]] = []
        self.trans: list[dict[int, Perm]] = []
        gens = [g for g in gens if not is_identity(g)]
        for g in gens:
            if all(g[b] == b for b in self.base):
                self._new_level(g)
        for i in range(len(self.base)):
            self.sgens[i] = [g for g in gens if all(g[b] == b for b in self.base[:i])]
            self._orbit(i)
        self._complete()

    def _new_level(self, g: Perm) -> None:
        pt = next(i for i, x in enumerate(g) if x != i)
        self.base.append(pt)
        self.sgens.append([])
        self.trans.append({pt: identity(self.degree)})

    def _orbit(self, i: int) -> None:
        b = self.base[i]
        tr = {b: identity(self.degree)}
        q = deque([b])
        while q:
            x = q.popleft()
            for s in self.sgens[i]:
                y = s[x]
                if y not in tr:
                    tr[y] = mul(s, tr[x])
                    q.append(y)
        self.trans[i] = tr

    def sift(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        for i in range(start, len(self.base)):
            y = g[self.base[i]]
            u = self.trans[i].get(y)
            if u is None:
                return g, i
            g = mul(inv(u), g)
        return g, len(self.base)

    def _complete(self) -> None:
        i = len(self.base) - 1
        while i >= 0:
            restart = False
            for beta, u in list(self.trans[i].items()):
                for s in self.sgens[i]:
                    sb = s[beta]
                    h = mul(inv(self.trans[i][sb]), mul(s, u))
                    r, j = self.sift(h, i + 1)
                    if is_identity(r):
                        continue
                    if j == len(self.base):
                        self._new_level(r)
                    for k in range(i + 1, j + 1):
                        self.sgens[k].append(r)
                        self._orbit(k)
                    i = j
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1

    @property
    def order(self) -> int:
        return math.prod(len(t) for t in self.trans)

    def contains(self, g: Perm) -> bool:
        r, _ = self.sift(tuple(g))
        return is_identity(r)


# --------------------------------------------------------------- element codes

def _encoder(degree: int):
    if degree <= 16:
        shifts = (np.arange(degree, dtype=np.uint64) * np.uint64(4))

        def enc(rows: np.ndarray) -> np.ndarray:
            return (rows.astype(np.uint64) << shifts).sum(axis=1, dtype=np.uint64)
        return enc
    if degree > 255:
        raise ResourceCapExceeded(f"degree {degree} exceeds 255")
    vt = np.dtype((np.void, degree))

    def enc(rows: np.ndarray) -> np.ndarray:
        return np.ascontiguousarray(rows, dtype=np.uint8).view(vt).ravel()
    return enc


def _components(n: int, a: np.ndarray, b: np.ndarray) -> tuple[int, np.ndarray]:
    m = coo_matrix((np.ones(len(a), dtype=np.int8), (a, b)), shape=(n, n))
    return connected_components(m, directed=True, connection="weak")


def _canon_labels(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Relabel components by first occurrence; return labels and reps."""
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return rank[inverse], first[order]


# ----------------------------------------------------------------- perm groups

class PermGroup:
    """A permutation group given by generators."""

    def __init__(self, degree: int, gens: Iterable[Sequence[int]] = (), *,
                 _rows: np.ndarray | None = None, _codes: np.ndarray | None = None):
        self.degree = degree
        gs = set()
        for g in gens:
            g = tuple(int(x) for x in g)
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise ValueError(f"not a permutation of degree {degree}: {g}")
            if not is_identity(g):
                gs.add(g)
        self.gens: tuple[Perm, ...] = tuple(sorted(gs))
        if _rows is not None:
            self.__dict__["_table"] = (_rows, _codes)

    # -- basic ----------------------------------------------------------------
    def __repr__(self) -> str:
        return f"PermGroup({self.format()})"

    def format(self) -> str:
        body = " | ".join(format_perm(g) for g in self.gens) or "()"
        return f"{self.degree}: {body}"

    @classmethod
    def parse(cls, text: str) -> "PermGroup":
        head, _, body = text.partition(":")
        d = int(head)
        gens = [parse_perm(t, d) for t in body.split("|")] if body.strip() else []
        return cls(d, gens)

    @cached_property
    def chain(self) -> StabChain:
        return StabChain(self.degree, self.gens)

    def order(self) -> int:
        if "_table" in self.__dict__:
            return len(self._table[0])
        return self.chain.order

    def contains(self, g: Sequence[int]) -> bool:
        g = tuple(g)
        if "_table" in self.__dict__:
            return bool(self.index_of(np.array([g], dtype=np.uint8))[0] >= 0)
        return self.chain.contains(g)

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return self.degree == other.degree and all(other.contains(g) for g in self.gens)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermGroup) or other.degree != self.degree:
            return NotImplemented
        return self.order() == other.order() and self.is_subgroup_of(other)

    def __hash__(self) -> int:
        return hash((self.degree, self.order()))

    def orbits(self) -> list[tuple[int, ...]]:
        parent = list(range(self.degree))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x
        for g in self.gens:
            for i, x in enumerate(g):
                a, b = find(i), find(x)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for i in range(self.degree):
            groups.setdefault(find(i), []).append(i)
        return [tuple(v) for v in groups.values()]

    def orbit_sizes(self) -> tuple[int, ...]:
        return tuple(sorted((len(o) for o in self.orbits()), reverse=True))

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    # -- element table --------------------------------------------------------
    @cached_property
    def _enc(self):
        return _encoder(self.degree)

    @cached_property
    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.chain.order
        if n > TABLE_CAP:
            raise ResourceCapExceeded(f"group order {n} exceeds table cap {TABLE_CAP}")
        d = self.degree
        rows = np.arange(d, dtype=np.uint8)[None, :]
        codes = self._enc(rows)
        frontier = rows
        gens = [np.array(g, dtype=np.uint8) for g in self.gens]
        while len(frontier):
            cand = np.concatenate([g[frontier] for g in gens]) if gens else frontier[:0]
            cc = self._enc(cand)
            cc, first = np.unique(cc, return_index=True)
            cand = cand[first]
            new = ~np.isin(cc, codes, assume_unique=True)
            frontier = cand[new]
            if len(frontier):
                rows = np.concatenate([rows, frontier])
                codes = np.concatenate([codes, cc[new]])
        order = np.argsort(codes, kind="stable")
        return rows[order], codes[order]

    @property
    def rows(self) -> np.ndarray:
        return self._table[0]

    @property
    def codes(self) -> np.ndarray:
        return self._table[1]

    def elements(self) -> list[Perm]:
        return [tuple(int(x) for x in r) for r in self.rows]

    def index_of(self, rows: np.ndarray) -> np.ndarray:
        """Table index of each row, or -1 for non-members."""
        c = self._enc(np.asarray(rows, dtype=np.uint8).reshape(-1, self.degree))
        pos = np.searchsorted(self.codes, c)
        pos = np.minimum(pos, len(self.codes) - 1)
        hit = self.codes[pos] == c
        return np.where(hit, pos, -1)

    @cached_property
    def inv_index(self) -> np.ndarray:
        r = self.rows
        invrows = np.empty_like(r)
        np.put_along_axis(invrows, r.astype(np.intp),
                          np.broadcast_to(np.arange(self.degree, dtype=np.uint8), r.shape), axis=1)
        return self.index_of(invrows)

    @cached_property
    def identity_index(self) -> int:
        return int(self.index_of(np.arange(self.degree, dtype=np.uint8)[None])[0])

    @cached_property
    def element_orders(self) -> np.ndarray:
        r = self.rows.astype(np.intp)
        n = len(r)
        out = np.zeros(n, dtype=np.int64)
        cur = r.copy()
        ident = np.arange(self.degree)
        k = 1
        while (out == 0).any():
            done = (cur == ident).all(axis=1) & (out == 0)
            out[done] = k
            cur = np.take_along_axis(r, cur, axis=1)
            k += 1
        return out

    @cached_property
    def cycle_type_ids(self) -> np.ndarray:
        keys: dict[tuple, int] = {}
        out = np.empty(len(self.rows), dtype=np.int64)
        for i, r in enumerate(self.rows):
            t = cycle_type(tuple(int(x) for x in r))
            out[i] = keys.setdefault(t, len(keys))
        self.__dict__["_cycle_type_keys"] = keys
        return out

    def mask_of(self, sub: "PermGroup") -> np.ndarray:
        m = np.zeros(len(self.rows), dtype=bool)
        idx = self.index_of(sub.rows)
        if (idx < 0).any():
            raise ValueError("not a subgroup")
        m[idx] = True
        return m

    def _sub_from_mask(self, mask: np.ndarray, gens: Sequence[Perm] | None = None) -> "PermGroup":
        if gens is None:
            gens = self._greedy_gens(mask)
        return PermGroup(self.degree, gens, _rows=self.rows[mask], _codes=self.codes[mask])

    def _idx_perm(self, i: int) -> Perm:
        return tuple(int(x) for x in self.rows[i])

    def _closure_mask(self, gen_idx: Sequence[int]) -> np.ndarray:
        mask = np.zeros(len(self.rows), dtype=bool)
        mask[self.identity_index] = True
        frontier = self.rows[[self.identity_index]]
        gens = [self.rows[i] for i in gen_idx]
        while len(frontier) and gens:
            cand = np.concatenate([g[frontier] for g in gens])
            idx = np.unique(self.index_of(cand))
            idx = idx[~mask[idx]]
            mask[idx] = True
            frontier = self.rows[idx]
        return mask

    def _greedy_gens(self, mask: np.ndarray) -> list[Perm]:
        """A small generating set for the subgroup with the given mask."""
        idx = np.flatnonzero(mask)
        if len(idx) <= 1:
            return []
        # prefer elements of large order
        order = idx[np.argsort(-self.element_orders[idx], kind="stable")]
        cur = np.zeros_like(mask)
        cur[self.identity_index] = True
        chosen: list[int] = []
        target = len(idx)
        for i in order:
            if cur[i]:
                continue
            chosen.append(int(i))
            cur = self._closure_mask(chosen)
            if cur.sum() == target:
                break
        return [self._idx_perm(i) for i in chosen]

    def _conj_index(self, h: Perm, widx: np.ndarray) -> np.ndarray:
        """Indices of ``w h w^-1`` for the table elements ``widx``."""
        E = self.rows[widx].astype(np.intp)
        Ei = self.rows[self.inv_index[widx]].astype(np.intp)
        ha = np.asarray(h, dtype=np.intp)
        return self.index_of(np.take_along_axis(E, ha[Ei], axis=1))

    def _conj_by(self, m: Perm, idx: np.ndarray) -> np.ndarray:
        """Indices of ``m x m^-1`` for table elements ``x``."""
        ma = np.asarray(m, dtype=np.uint8)
        mi = np.asarray(inv(m), dtype=np.intp)
        return self.index_of(ma[self.rows[idx][:, mi]])

    def _mul_right(self, idx: np.ndarray, g: Perm) -> np.ndarray:
        """Indices of ``x g`` for table elements ``x``."""
        return self.index_of(self.rows[idx][:, np.asarray(g, dtype=np.intp)])

    def _mul_left(self, g: Perm, idx: np.ndarray) -> np.ndarray:
        return self.index_of(np.asarray(g, dtype=np.uint8)[self.rows[idx]])

    # -- subgroup algorithms (table based) -------------------------------------
    def normalizer(self, H: "PermGroup") -> "PermGroup":
        return self._sub_from_mask(self._normalizer_mask(H.gens, self.mask_of(H)))

    def _class_data(self, h: Perm) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Conjugacy class of ``h``: coset reps of ``C(h)``, their images, ``C(h)``."""
        cache = self.__dict__.setdefault("_class_cache", {})
        got = cache.get(h)
        if got is None:
            c = self._conj_index(h, np.arange(len(self.rows)))
            vals, first = np.unique(c, return_index=True)
            hi = self.index_of(np.array([h], dtype=np.uint8))[0]
            got = (first, vals, np.flatnonzero(c == hi))
            cache[h] = got
        return got

    def _conj_solutions(self, hgens, tmask) -> np.ndarray:
        """All ``w`` with ``w h w^-1`` in ``tmask`` for every ``h`` in ``hgens``."""
        if not hgens:
            return np.arange(len(self.rows))
        reps, imgs, cent = self._class_data(hgens[0])
        hit = reps[tmask[imgs]]
        if not len(hit):
            return hit
        prod = self.rows[hit][:, self.rows[cent].astype(np.intp)]
        cand = np.sort(self.index_of(prod.reshape(-1, self.degree)))
        for h in hgens[1:]:
            c = self._conj_index(h, cand)
            cand = cand[(c >= 0) & tmask[np.maximum(c, 0)]]
            if not len(cand):
                break
        return cand

    def _normalizer_mask(self, hgens, hmask) -> np.ndarray:
        m = np.zeros(len(self.rows), dtype=bool)
        m[self._conj_solutions(list(hgens), hmask)] = True
        return m

    def centralizer(self, g: Perm) -> "PermGroup":
        m = np.zeros(len(self.rows), dtype=bool)
        m[self._class_data(tuple(g))[2]] = True
        return self._sub_from_mask(m)

    def _conjugator_idx(self, hgens, kmask, cand=None) -> int | None:
        sol = self._conj_solutions(list(hgens), kmask)
        return int(sol[0]) if len(sol) else None

    def conjugator(self, H: "PermGroup", K: "PermGroup") -> Perm | None:
        """Some ``w`` in this group with ``w H w^-1 = K``, else None."""
        if H.order() != K.order():
            return None
        i = self._conjugator_idx(H.gens, self.mask_of(K))
        return None if i is None else self._idx_perm(i)

    def is_conjugate(self, H: "PermGroup", K: "PermGroup") -> bool:
        return self.conjugator(H, K) is not None

    def contained_up_to_conjugacy(self, H: "PermGroup", K: "PermGroup") -> bool:
        """Is some conjugate of ``H`` contained in ``K``?

        Equivalent to ``H`` fixing a point of the coset space ``G/K``.
        """
        if K.order() % H.order():
            return False
        cache = K.__dict__.setdefault("_coset_cache", {})
        got = cache.get(id(self))
        if got is None:
            got = cache[id(self)] = (self, CosetAction(self, K))
        act = got[1]
        fixed = np.ones(act.degree, dtype=bool)
        for h in H.gens:
            img = act.labels[self._mul_left(h, act.rep_idx)]
            fixed &= img == np.arange(act.degree)
            if not fixed.any():
                return False
        return True

    def stabilizer(self, point: int) -> "PermGroup":
        return self._sub_from_mask(self.rows[:, point] == point)

    def set_stabilizer(self, pts: Iterable[int]) -> "PermGroup":
        s = np.zeros(self.degree, dtype=bool)
        s[list(pts)] = True
        return self._sub_from_mask((s[self.rows] == s[None, :]).all(axis=1))

    def partition_stabilizer(self, blocks: Sequence[Iterable[int]]) -> "PermGroup":
        """Elements fixing every block of ``blocks`` setwise."""
        lab = np.empty(self.degree, dtype=np.int64)
        for k, b in enumerate(blocks):
            lab[list(b)] = k
        return self._sub_from_mask((lab[self.rows] == lab[None, :]).all(axis=1))

    def intersection(self, H: "PermGroup") -> "PermGroup":
        idx = H.index_of(self.rows)
        return self._sub_from_mask(idx >= 0)

    def conjugate(self, w: Perm) -> "PermGroup":
        """``w G w^-1`` as a group in its own right."""
        return PermGroup(self.degree, [conj(g, w) for g in self.gens])

    def coset_action(self, U: "PermGroup") -> "CosetAction":
        return CosetAction(self, U)

    def double_coset_reps(self, H: "PermGroup", K: "PermGroup") -> list[Perm]:
        """Representatives of ``H \\ G / K`` (``H``, ``K`` subgroups of G)."""
        n = len(self.rows)
        allx = np.arange(n)
        a, b = [], []
        for h in H.gens:
            a.append(allx)
            b.append(self._mul_left(h, allx))
        for k in K.gens:
            a.append(allx)
            b.append(self._mul_right(allx, k))
        if not a:
            return self.elements()
        _, lab = _components(n, np.concatenate(a), np.concatenate(b))
        _, reps = _canon_labels(lab)
        # the identity's double coset first
        reps = sorted(reps.tolist(), key=lambda i: (lab[i] != lab[self.identity_index], i))
        return [self._idx_perm(i) for i in reps]

    def derived_subgroup(self) -> "PermGroup":
        comms = []
        for a, b in itertools.combinations(self.gens, 2):
            c = mul(mul(inv(a), inv(b)), mul(a, b))
            if not is_identity(c):
                comms.append(c)
        return self._normal_closure(comms)

    def _normal_closure(self, gens: list[Perm]) -> "PermGroup":
        if not gens:
            return PermGroup(self.degree, [])
        gi = [int(i) for i in self.index_of(np.array(gens, dtype=np.uint8))]
        mask = self._closure_mask(gi)
        changed = True
        while changed:
            changed = False
            for s in self.gens:
                c = self._conj_by(s, np.array(gi))
                bad = c[~mask[c]]
                if len(bad):
                    gi.append(int(bad[0]))
                    mask = self._closure_mask(gi)
                    changed = True
        return self._sub_from_mask(mask, [self._idx_perm(i) for i in gi])

    def is_solvable(self) -> bool:
        G = self
        while G.order() > 1:
            D = G.derived_subgroup()
            if D.order() == G.order():
                return False
            G = D
        return True

    def perfect_residuum(self) -> "PermGroup":
        G = self
        while True:
            D = G.derived_subgroup()
            if D.order() == G.order():
                return G
            G = D

    # -- lattice --------------------------------------------------------------
    @cached_property
    def _lattice(self) -> list["PermGroup"]:
        return _Lattice(self).run()

    def subgroup_classes(self) -> list["PermGroup"]:
        """Representatives of the conjugacy classes of subgroups, by order."""
        return list(self._lattice)

    def subgroups_of_index(self, n: int) -> list["PermGroup"]:
        if self.order() % n:
            return []
        k = self.order() // n
        return [H for H in self._lattice if H.order() == k]

    @cached_property
    def _maximals(self) -> list["PermGroup"]:
        N = self.order()
        found: list[PermGroup] = []
        ct = self.cycle_type_ids
        nct = ct.max() + 1
        hist = {}
        for H in self._lattice:
            hist[id(H)] = np.bincount(ct[self.mask_of(H)], minlength=nct)
        for H in sorted(self._lattice[:-1], key=lambda H: -H.order()):
            if any(M.order() % H.order() == 0
                   and (hist[id(H)] <= hist[id(M)]).all()
                   and self.contained_up_to_conjugacy(H, M) for M in found):
                continue
            found.append(H)
        return found

    def maximal_subgroups(self) -> list["PermGroup"]:
        """Representatives of the classes of maximal subgroups."""
        return list(self._maximals)

    # -- blocks ---------------------------------------------------------------
    def minimal_block(self, j: int) -> list[int]:
        """Smallest block containing ``0`` and ``j``."""
        d = self.degree
        parent = list(range(d))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x
        queue = [(0, j)]
        parent[j] = 0
        while queue:
            a, b = queue.pop()
            for g in self.gens:
                x, y = find(g[a]), find(g[b])
                if x != y:
                    parent[max(x, y)] = min(x, y)
                    queue.append((x, y))
        return [i for i in range(d) if find(i) == find(0)]

    def block_system(self) -> list[list[int]] | None:
        """Finest nontrivial block system of a transitive group, or None."""
        best = None
        for j in range(1, self.degree):
            b = self.minimal_block(j)
            if len(b) < self.degree and (best is None or len(b) < len(best)):
                best = b
        if best is None:
            return None
        blocks = [best]
        seen = set(best)
        for i in range(self.degree):
            if i in seen:
                continue
            # image of the base block containing i
            g = self._mover(0, i)
            img = sorted(g[x] for x in best)
            blocks.append(img)
            seen.update(img)
        return blocks

    def _mover(self, a: int, b: int) -> Perm:
        """Some group element mapping ``a`` to ``b`` (product of generators)."""
        tr = {a: identity(self.degree)}
        q = deque([a])
        while q:
            x = q.popleft()
            if x == b:
                break
            for s in self.gens:
                y = s[x]
                if y not in tr:
                    tr[y] = mul(s, tr[x])
                    q.append(y)
        return tr[b]

    def is_primitive(self) -> bool:
        return self.is_transitive() and (self.degree <= 2 or self.block_system() is None)


# ------------------------------------------------------------------ coset action

class CosetAction:
    """Action of ``W`` on the left cosets ``W/U``; coset ``0`` is ``U``."""

    def __init__(self, W: PermGroup, U: PermGroup):
        self.W, self.U = W, U
        n = len(W.rows)
        allx = np.arange(n)
        if U.gens:
            a = np.concatenate([allx] * len(U.gens))
            b = np.concatenate([W._mul_right(allx, u) for u in U.gens])
            _, lab = _components(n, a, b)
        else:
            lab = allx
        # coset of the identity gets label 0
        lab, reps = _canon_labels(lab)
        i0 = lab[W.identity_index]
        if i0 != 0:
            swap = np.arange(len(reps))
            swap[0], swap[i0] = i0, 0
            lab = swap[lab]
            reps[[0, i0]] = reps[[i0, 0]]
        self.labels = lab
        self.rep_idx = reps
        self.degree = len(reps)

    def reps(self) -> list[Perm]:
        return [self.W._idx_perm(i) for i in self.rep_idx]

    def image(self, g: Perm) -> Perm:
        idx = self.W._mul_left(g, self.rep_idx)
        return tuple(int(x) for x in self.labels[idx])

    def group(self, P: PermGroup) -> PermGroup:
        return PermGroup(self.degree, [self.image(g) for g in P.gens])


# ---------------------------------------------------------------- constructors

def symmetric_group(d: int) -> PermGroup:
    if d <= 1:
        return PermGroup(max(d, 1), [])
    if d == 2:
        return PermGroup(2, [(1, 0)])
    return PermGroup(d, [tuple(list(range(1, d)) + [0]), (1, 0) + tuple(range(2, d))])


def alternating_group(d: int) -> PermGroup:
    gens = [from_cycles(d, [(0, 1, i)]) for i in range(2, d)]
    return PermGroup(d, gens)


def cyclic_group(d: int) -> PermGroup:
    return PermGroup(d, [tuple((i + 1) % d for i in range(d))] if d > 1 else [])


def trivial_group(d: int) -> PermGroup:
    return PermGroup(d, [])


def affine_group(m: int, mults: Iterable[int] | None = None) -> PermGroup:
    """Maps ``i -> a i + b`` on ``Z/m``; ``mults`` generate the allowed ``a``."""
    if mults is None:
        mults = [a for a in range(1, m) if math.gcd(a, m) == 1]
    gens = [tuple((i + 1) % m for i in range(m))] if m > 1 else []
    gens += [tuple(a * i % m for i in range(m)) for a in mults]
    return PermGroup(m, gens)


def direct_product(groups: Sequence[PermGroup]) -> PermGroup:
    """Product acting on consecutive ranges of points."""
    d = sum(G.degree for G in groups)
    gens = []
    off = 0
    for G in groups:
        for g in G.gens:
            img = list(range(d))
            for i, x in enumerate(g):
                img[off + i] = off + x
            gens.append(tuple(img))
        off += G.degree
    return PermGroup(d, gens)


def lift_top(sigma: Perm, a: int) -> Perm:
    """Canonical lift of a block permutation: ``x a + y -> sigma(x) a + y``."""
    return tuple(sigma[i // a] * a + i % a for i in range(len(sigma) * a))


def on_block(g: Perm, block: int, a: int, e: int) -> Perm:
    """``g`` acting on block ``block`` of ``e`` blocks of size ``a``."""
    img = list(range(a * e))
    for y, z in enumerate(g):
        img[block * a + y] = block * a + z
    return tuple(img)


def wreath_product(factors: Sequence[PermGroup]) -> PermGroup:
    """``W_t wr ... wr W_1`` for ``factors = [W_1, ..., W_t]``.

    Points are mixed-radix tuples with the ``W_1`` coordinate most
    significant, so ``W_1`` permutes the coarsest blocks.
    """
    if not factors:
        return trivial_group(1)
    if len(factors) == 1:
        return factors[0]
    B = factors[0]
    A = wreath_product(factors[1:])
    return wreath2(A, B)


def wreath2(A: PermGroup, B: PermGroup) -> PermGroup:
    """``A wr B`` with ``B`` permuting blocks of size ``deg A``."""
    a, e = A.degree, B.degree
    gens = [lift_top(s, a) for s in B.gens]
    # one block per orbit of B suffices for the base group
    for x in sorted(o[0] for o in B.orbits()):
        gens += [on_block(g, x, a, e) for g in A.gens]
    return PermGroup(a * e, gens)


def wreath_order(factors: Sequence[PermGroup]) -> int:
    # |A wr B| = |A|^deg(B) |B|, from the innermost factor outwards
    total = 1
    for W in reversed(factors):
        total = total ** W.degree * W.order()
    return total


def relabel(G: PermGroup, s: Perm) -> PermGroup:
    """``s G s^-1``: point ``i`` is renamed ``s[i]``."""
    return G.conjugate(s)


# ------------------------------------------------------------------- embeddings

def embed_direct_product(G: PermGroup) -> tuple[Perm, list[PermGroup]]:
    """Relabel ``G`` so its orbits are consecutive ranges.

    Returns ``(s, [G_1, ..., G_r])`` with ``s G s^-1`` inside the direct
    product of the transitive constituents ``G_i``.
    """
    orbs = sorted(G.orbits(), key=lambda o: (-len(o), o))
    s = [0] * G.degree
    k = 0
    for o in orbs:
        for x in o:
            s[x] = k
            k += 1
    s = tuple(s)
    Gs = relabel(G, s)
    factors = []
    off = 0
    for o in orbs:
        m = len(o)
        gens = {tuple(g[off + i] - off for i in range(m)) for g in Gs.gens}
        factors.append(PermGroup(m, gens))
        off += m
    return s, factors


def embed_wreath(G: PermGroup) -> tuple[Perm, list[PermGroup]]:
    """Relabel a transitive ``G`` into a wreath product of primitive groups.

    Returns ``(s, [W_1, ..., W_r])``; ``s G s^-1 <= W_r wr ... wr W_1``
    in the point order of :func:`wreath_product`.
    """
    d = G.degree
    blocks = G.block_system() if d > 1 else None
    if blocks is None:
        return identity(d), [G]
    a = len(blocks[0])
    e = len(blocks)
    base = blocks[0]
    # label block i through some g_i mapping the base block onto it
    s0 = [0] * d
    block_of = {}
    for i, b in enumerate(blocks):
        for x in b:
            block_of[x] = i
    for i, b in enumerate(blocks):
        gi = G._mover(base[0], b[0])
        for j, x in enumerate(base):
            s0[gi[x]] = i * a + j
    s0 = tuple(s0)
    Gs = relabel(G, s0)
    top = PermGroup(e, {tuple(g[i * a] // a for i in range(e)) for g in Gs.gens})
    # block components of g b(q(g))^-1
    inner = set()
    for g in Gs.gens:
        q = tuple(g[i * a] // a for i in range(e))
        h = mul(g, inv(lift_top(q, a)))
        for i in range(e):
            comp = tuple(h[i * a + y] - i * a for y in range(a))
            inner.add(comp)
    A = PermGroup(a, inner)
    t, tops = embed_wreath(top)
    s1 = tuple(t[i // a] * a + i % a for i in range(d))
    s = mul(s1, s0)
    return s, tops + [A]


# ---------------------------------------------------------------------- lattice

def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _primitive_root(p: int) -> int:
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)):
            return g
    return 1


class _Lattice:
    """Conjugacy classes of subgroups by cyclic extension and perfect seeds."""

    MAX_CLASSES = int(os.environ.get("GALOIS_LATTICE_CAP", 20000))

    def __init__(self, G: PermGroup):
        self.G = G
        self.N = len(G.rows)
        self.ct = G.cycle_type_ids
        self.classes: dict[tuple, list[tuple[np.ndarray, list[Perm]]]] = {}
        self.by_order: dict[int, list[tuple[np.ndarray, list[Perm]]]] = {}

    def _pow_index(self, idx: np.ndarray, k: int) -> np.ndarray:
        R = self.G.rows[idx].astype(np.intp)
        P = R.copy()
        for _ in range(k - 1):
            P = np.take_along_axis(R, P, axis=1)
        return self.G.index_of(P)

    def _invariant(self, mask: np.ndarray, gens) -> tuple:
        sizes = PermGroup(self.G.degree, gens).orbit_sizes()
        hist = np.bincount(self.ct[mask], minlength=self.ct.max() + 1)
        return (int(mask.sum()), sizes, hist.tobytes())

    def _add(self, mask: np.ndarray, gens: list[Perm]) -> bool:
        key = self._invariant(mask, gens)
        for m2, _ in self.classes.get(key, []):
            if self.G._conjugator_idx(gens, m2) is not None:
                return False
        self.classes.setdefault(key, []).append((mask, gens))
        self.by_order.setdefault(int(mask.sum()), []).append((mask, gens))
        total = sum(len(v) for v in self.by_order.values())
        if total > self.MAX_CLASSES:
            raise ResourceCapExceeded(f"more than {self.MAX_CLASSES} subgroup classes")
        return True

    def _extend(self, hmask: np.ndarray, hgens: list[Perm]) -> None:
        G = self.G
        nmask = G._normalizer_mask(hgens, hmask)
        hsize = int(hmask.sum())
        quot = int(nmask.sum()) // hsize
        if quot == 1:
            return
        ngens = G._greedy_gens(nmask)
        hidx = np.flatnonzero(hmask)
        for p in _prime_factors(quot):
            nidx = np.flatnonzero(nmask & ~hmask)
            pw = self._pow_index(nidx, p)
            cand = nidx[hmask[pw]]
            if not len(cand):
                continue
            pos = np.full(self.N, -1, dtype=np.int64)
            pos[cand] = np.arange(len(cand))
            a, b = [], []
            ar = np.arange(len(cand))
            for h in hgens:
                a.append(ar)
                b.append(pos[G._mul_right(cand, h)])
            for m in ngens:
                a.append(ar)
                b.append(pos[G._conj_by(m, cand)])
            if p > 2:
                a.append(ar)
                b.append(pos[self._pow_index(cand, _primitive_root(p))])
            if a:
                _, lab = _components(len(cand), np.concatenate(a), np.concatenate(b))
                _, reps = _canon_labels(lab)
            else:
                reps = ar
            for r in reps:
                n = int(cand[r])
                kmask = hmask.copy()
                cur = G.rows[hidx]
                nrow = G.rows[n]
                for _ in range(p - 1):
                    cur = nrow[cur]
                    kmask[G.index_of(cur)] = True
                self._add(kmask, hgens + [G._idx_perm(n)])

    def _perfect_seeds(self) -> None:
        G = self.G
        order = self.N
        if len(_prime_factors(order)) < 3 or order % 4 or G.is_solvable():
            return
        eo = G.element_orders
        invol = np.flatnonzero(eo == 2)
        allx = np.arange(self.N)
        # involution classes
        a, b = [], []
        pos = np.full(self.N, -1, dtype=np.int64)
        pos[invol] = np.arange(len(invol))
        for s in G.gens:
            a.append(np.arange(len(invol)))
            b.append(pos[G._conj_by(s, invol)])
        _, lab = _components(len(invol), np.concatenate(a), np.concatenate(b))
        _, creps = _canon_labels(lab)
        odd_prime = np.isin(eo, [q for q in _prime_factors(order) if q > 2])
        seen_masks: set[bytes] = set()
        for ci in creps:
            ai = int(invol[ci])
            ag = G._idx_perm(ai)
            C = G.centralizer(ag)
            bidx = np.flatnonzero(odd_prime)
            posb = np.full(self.N, -1, dtype=np.int64)
            posb[bidx] = np.arange(len(bidx))
            a2, b2 = [], []
            for s in C.gens:
                a2.append(np.arange(len(bidx)))
                b2.append(posb[G._conj_by(s, bidx)])
            if a2:
                _, lab2 = _components(len(bidx), np.concatenate(a2), np.concatenate(b2))
                _, breps = _canon_labels(lab2)
            else:
                breps = np.arange(len(bidx))
            for r in breps:
                bi = int(bidx[r])
                m = G._closure_mask([ai, bi])
                key = m.tobytes()
                if key in seen_masks:
                    continue
                seen_masks.add(key)
                K = G._sub_from_mask(m, [ag, G._idx_perm(bi)])
                if K.is_solvable():
                    continue
                P = K.perfect_residuum()
                pm = G.mask_of(P)
                if pm.tobytes() in seen_masks and pm.sum() != m.sum():
                    continue
                seen_masks.add(pm.tobytes())
                self._add(pm, list(P.gens))
        del allx

    def run(self) -> list[PermGroup]:
        G = self.G
        triv = np.zeros(self.N, dtype=bool)
        triv[G.identity_index] = True
        self._add(triv, [])
        self._perfect_seeds()
        done = 0
        processed: set[int] = set()
        while True:
            pending = sorted(o for o in self.by_order if o not in processed)
            if not pending:
                break
            o = pending[0]
            i = 0
            while i < len(self.by_order[o]):
                m, g = self.by_order[o][i]
                self._extend(m, g)
                i += 1
            processed.add(o)
            done += 1
        out = []
        for o in sorted(self.by_order):
            for m, g in self.by_order[o]:
                out.append(G._sub_from_mask(m, G._greedy_gens(m)))
        return out
