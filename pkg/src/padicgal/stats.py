"""Statistics of permutation groups and of polynomials over Q_p.

A statistic ``s`` assigns a value to a group and to a polynomial so that
``s(R)`` is equivalent to ``s(Gal(R))``.  Ordered statistics also satisfy
``H <= G  =>  precedes(s(H), s(G))``, which is what lets the deduction
strategies discard candidate groups.

Values:

========================  =====================================================
``HasRoot``               ``bool``
``NumRoots``              ``int``, number of fixed points
``Degree``                ``int``
``FactorDegrees``         descending tuple of orbit sizes
``NumAuts``               ``int``, ``(N_G(S):S)`` for a point stabiliser ``S``
``AutGroup``              :class:`AutValue`, ``N_G(S)/S`` as a regular group
``Factors[s]``            :class:`FactorsValue`, ``(degree, s-value)`` per orbit
``Tup[s1,..]``            tuple of component values
========================  =====================================================
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import networkx as nx

from . import perm as P
from .combinat import is_refinement, linear_divisions, rectangle_divisions
from .errors import InputError, NotApplicable, PrecisionError, ResourceCapExceeded
from ._pari import pari
from .padic import LocalField, factor_fields, factor_padic, monic_integral, precision_ceiling, vp

DOUBLE_COSET_CAP = int(os.environ.get("GALOIS_DOUBLE_COSET_CAP", 100_000))


# ------------------------------------------------------------------ values

@dataclass(frozen=True)
class AutValue:
    """An automorphism group as a regular permutation group."""
    group: P.PermGroup

    @property
    def degree(self) -> int:
        return self.group.degree

    def format(self) -> str:
        return f"Aut[{self.group.format()}]"

    def fingerprint(self) -> tuple:
        G = self.group
        return (G.degree, _is_abelian(G), tuple(sorted(_element_orders(G))))


@dataclass(frozen=True)
class FactorsValue:
    """Multiset of ``(degree, inner value)`` pairs."""
    items: tuple

    def degrees(self) -> tuple:
        return tuple(sorted((d for d, _ in self.items), reverse=True))


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, AutValue):
        return v.format()
    if isinstance(v, FactorsValue):
        return "{" + ", ".join(f"{d}:{format_value(x)}" for d, x in v.items) + "}"
    if isinstance(v, tuple):
        if all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            return "{" + ",".join(str(x) for x in v) + "}"
        return "(" + ", ".join(format_value(x) for x in v) + ")"
    return str(v)


# ------------------------------------------------------------- group helpers

def _restrict(G: P.PermGroup, orbit: Sequence[int]) -> P.PermGroup:
    pos = {x: i for i, x in enumerate(orbit)}
    gens = {tuple(pos[g[x]] for x in orbit) for g in G.gens}
    return P.PermGroup(len(orbit), gens)


def _transversal(G: P.PermGroup, a: int) -> dict[int, P.Perm]:
    """``t[x]`` maps ``a`` to ``x``, for every ``x`` in the orbit of ``a``."""
    t = {a: P.identity(G.degree)}
    frontier = [a]
    while frontier:
        nxt = []
        for x in frontier:
            for s in G.gens:
                y = s[x]
                if y not in t:
                    t[y] = P.mul(s, t[x])
                    nxt.append(y)
        frontier = nxt
    return t


def _stabilizer_fixed_points(G: P.PermGroup) -> list[int]:
    """Points fixed by ``Stab_G(0)``, from Schreier generators."""
    t = _transversal(G, 0)
    fixed = set(range(G.degree))
    for x, tx in t.items():
        for s in G.gens:
            sch = P.mul(P.inv(t[s[x]]), P.mul(s, tx))
            fixed = {y for y in fixed if sch[y] == y}
            if len(fixed) == 1:
                return [0]
    return sorted(fixed)


def _require_transitive(G: P.PermGroup, what: str) -> None:
    if not G.is_transitive():
        raise NotApplicable(f"{what} needs a transitive group")


def automorphism_group(G: P.PermGroup) -> P.PermGroup:
    """``N_G(S)/S`` for ``S = Stab_G(0)``, acting regularly on ``Fix(S)``."""
    _require_transitive(G, "AutGroup")
    F = _stabilizer_fixed_points(G)
    t = _transversal(G, 0)
    pos = {x: i for i, x in enumerate(F)}
    # each t[f] normalises S, so it permutes Fix(S)
    gens = {tuple(pos[t[f][x]] for x in F) for f in F}
    return P.PermGroup(len(F), gens)


def _element_orders(G: P.PermGroup) -> list[int]:
    return [P.perm_order(g) for g in G.elements()]


def _is_abelian(G: P.PermGroup) -> bool:
    return all(P.mul(a, b) == P.mul(b, a) for a, b in itertools.combinations(G.gens, 2))


def _small_gens(G: P.PermGroup) -> list[P.Perm]:
    import numpy as np
    return G._greedy_gens(np.ones(len(G.rows), dtype=bool))


def embeds_into(A: P.PermGroup, B: P.PermGroup) -> bool:
    """Is the abstract group ``B`` isomorphic to a subgroup of ``A``?

    Brute force over generator images, checked along the Cayley graph
    of ``B``; meant for the small groups met as automorphism groups.
    """
    nA, nB = A.order(), B.order()
    if nA % nB:
        return False
    if nB == 1:
        return True
    gB = _small_gens(B)
    elA = A.elements()
    ordA: dict[int, list] = {}
    for a in elA:
        ordA.setdefault(P.perm_order(a), []).append(a)
    choices = [ordA.get(P.perm_order(b), []) for b in gB]
    idB = P.identity(B.degree)
    idA = P.identity(A.degree)
    for imgs in itertools.product(*choices):
        phi = {idB: idA}
        frontier = [idB]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for b, a in zip(gB, imgs):
                    y = P.mul(b, x)
                    z = P.mul(a, phi[x])
                    got = phi.get(y)
                    if got is None:
                        phi[y] = z
                        nxt.append(y)
                    elif got != z:
                        ok = False
                        break
                if not ok:
                    break
            frontier = nxt
        if ok and len(set(phi.values())) == nB:
            return True
    return False


# --------------------------------------------------------------- statistics

class Statistic:
    """Base class; subclasses define evaluation and comparison."""
    name = "?"
    needs_field = False

    def format(self) -> str:
        return self.name

    __str__ = format

    def __repr__(self) -> str:
        return f"Statistic({self.format()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Statistic) and self.format() == other.format()

    def __hash__(self) -> int:
        return hash(self.format())

    # group side
    def eval_group(self, G: P.PermGroup):
        raise NotImplementedError

    # polynomial side: ``R`` monic integral, ascending coefficients
    def eval_poly(self, R: Sequence[int], p: int):
        raise NotImplementedError

    def eval_irreducible(self, k: int):
        """Value on an irreducible polynomial of degree ``k`` (field-free kinds)."""
        return self.eval_group(P.cyclic_group(k))

    def equivalent(self, v1, v2) -> bool:
        return v1 == v2

    def precedes(self, v1, v2) -> bool:
        raise NotImplementedError


class HasRoot(Statistic):
    name = "HasRoot"

    def eval_group(self, G):
        return any(len(o) == 1 for o in G.orbits())

    def eval_poly(self, R, p):
        return any(f.degree == 1 for f in factor_padic(R, p))

    def eval_irreducible(self, k):
        return k == 1

    def precedes(self, v1, v2):
        return bool(v1) or not v2


class NumRoots(Statistic):
    name = "NumRoots"

    def eval_group(self, G):
        return sum(1 for o in G.orbits() if len(o) == 1)

    def eval_poly(self, R, p):
        return sum(1 for f in factor_padic(R, p) if f.degree == 1)

    def eval_irreducible(self, k):
        return int(k == 1)

    def precedes(self, v1, v2):
        return v1 >= v2


class Degree(Statistic):
    name = "Degree"

    def eval_group(self, G):
        return G.degree

    def eval_poly(self, R, p):
        return len(R) - 1

    def eval_irreducible(self, k):
        return k

    def precedes(self, v1, v2):
        return v1 == v2


class FactorDegrees(Statistic):
    name = "FactorDegrees"

    def eval_group(self, G):
        return G.orbit_sizes()

    def eval_poly(self, R, p):
        return tuple(sorted((f.degree for f in factor_padic(R, p)), reverse=True))

    def eval_irreducible(self, k):
        return (k,)

    def precedes(self, v1, v2):
        return is_refinement(v1, v2)


class NumAuts(Statistic):
    name = "NumAuts"
    needs_field = True

    def eval_group(self, G):
        _require_transitive(G, "NumAuts")
        return len(_stabilizer_fixed_points(G))

    def eval_poly(self, R, p):
        R = monic_integral(R)
        if len(factor_padic(R, p)) != 1:
            raise NotApplicable("NumAuts needs an irreducible polynomial")
        return len(_roots_in_own_field(R, p)[1])

    def precedes(self, v1, v2):
        return v1 % v2 == 0


class AutGroup(Statistic):
    name = "AutGroup"
    needs_field = True

    def eval_group(self, G):
        return AutValue(automorphism_group(G))

    def eval_poly(self, R, p):
        R = monic_integral(R)
        if len(factor_padic(R, p)) != 1:
            raise NotApplicable("AutGroup needs an irreducible polynomial")
        return AutValue(_automorphism_group_of_field(R, p))

    def equivalent(self, v1, v2):
        if v1.degree != v2.degree or v1.fingerprint() != v2.fingerprint():
            return False
        return embeds_into(v1.group, v2.group)

    def precedes(self, v1, v2):
        return v1.degree >= v2.degree and embeds_into(v1.group, v2.group)


class Factors(Statistic):
    """The inner statistic on each orbit, or on each irreducible factor."""

    def __init__(self, inner: Statistic):
        self.inner = inner
        self.needs_field = inner.needs_field

    @property
    def name(self):
        return f"Factors[{self.inner.format()}]"

    def eval_group(self, G):
        items = [(len(o), self.inner.eval_group(_restrict(G, o))) for o in G.orbits()]
        return FactorsValue(_sorted_items(items))

    def eval_poly(self, R, p):
        R = monic_integral(R)
        if self.inner.needs_field:
            items = [(len(g) - 1, self.inner.eval_poly(g, p)) for g in factor_fields(R, p)]
        else:
            items = [(f.degree, self.inner.eval_irreducible(f.degree)) for f in factor_padic(R, p)]
        return FactorsValue(_sorted_items(items))

    def eval_irreducible(self, k):
        return FactorsValue(((k, self.inner.eval_irreducible(k)),))

    def equivalent(self, v1, v2):
        a, b = v1.items, v2.items
        if len(a) != len(b) or v1.degrees() != v2.degrees():
            return False
        g = nx.Graph()
        left = [("a", i) for i in range(len(a))]
        g.add_nodes_from(left)
        g.add_nodes_from(("b", j) for j in range(len(b)))
        for i, (d1, x) in enumerate(a):
            for j, (d2, y) in enumerate(b):
                if d1 == d2 and self.inner.equivalent(x, y):
                    g.add_edge(("a", i), ("b", j))
        match = nx.bipartite.maximum_matching(g, top_nodes=left)
        return len(match) == 2 * len(a)

    def precedes(self, v1, v2):
        # orbits of a subgroup refine those of the group
        return is_refinement(v1.degrees(), v2.degrees())


class Tup(Statistic):
    def __init__(self, parts: Sequence[Statistic]):
        if not parts:
            raise InputError("Tup needs at least one statistic")
        self.parts = tuple(parts)
        self.needs_field = any(s.needs_field for s in parts)

    @property
    def name(self):
        return "Tup[" + ",".join(s.format() for s in self.parts) + "]"

    def eval_group(self, G):
        return tuple(s.eval_group(G) for s in self.parts)

    def eval_poly(self, R, p):
        return tuple(s.eval_poly(R, p) for s in self.parts)

    def eval_irreducible(self, k):
        return tuple(s.eval_irreducible(k) for s in self.parts)

    def equivalent(self, v1, v2):
        return all(s.equivalent(a, b) for s, a, b in zip(self.parts, v1, v2))

    def precedes(self, v1, v2):
        return all(s.precedes(a, b) for s, a, b in zip(self.parts, v1, v2))


def _sorted_items(items):
    return tuple(sorted(items, key=lambda t: (-t[0], format_value(t[1]))))


# ------------------------------------------------------ field computations

def _roots_in_own_field(R: Sequence[int], p: int):
    """``(L, roots)`` with ``L = Q_p[x]/(R)`` and all roots of ``R`` in ``L``."""
    N = 32
    while True:
        L = LocalField(R, p, N)
        try:
            return L, L.roots(R)
        except PrecisionError:
            N *= 2
            if N > precision_ceiling():
                raise


def _automorphism_group_of_field(R: Sequence[int], p: int) -> P.PermGroup:
    """``Aut(L/Q_p)`` for ``L = Q_p[x]/(R)`` in its left regular representation."""
    N = 32
    while True:
        L = LocalField(R, p, N)
        try:
            rs = [r for r, _ in L.roots(R)]
            table = _composition_table(L, rs, p)
            break
        except PrecisionError:
            N *= 2
            if N > precision_ceiling():
                raise
    k = len(rs)
    # sigma_i o sigma_j = sigma_{table[i][j]}: left multiplication by sigma_i
    gens = {tuple(table[i][j] for j in range(k)) for i in range(k)}
    return P.PermGroup(k, gens)


def _composition_table(L: LocalField, rs: list, p: int) -> list[list[int]]:
    """``table[i][j] = m`` when ``sigma_i(r_j) = r_m``, with ``sigma_i: x -> r_i``."""
    k = len(rs)
    polys = [[Fraction(c) for c in L.to_alg(r)] for r in rs]
    table = []
    for ri in rs:
        row = []
        for h in polys:
            # clear p-power denominators, evaluate, then divide back out
            s = max([0] + [-vp(c, p) for c in h if c])
            acc = L.eval_rational([c * p ** s for c in h], ri)
            coords = [int(x) for x in acc]
            if any(x % p ** s for x in coords):
                raise PrecisionError("image not integral at working precision")
            img = L.red(pari.Col([x // p ** s for x in coords]))
            vals = [L.val(L.sub(img, rm)) for rm in rs]
            best = max(range(k), key=lambda m: vals[m])
            if k > 1 and sorted(vals)[-2] >= vals[best]:
                raise PrecisionError("roots not separated")
            row.append(best)
        table.append(row)
    return table


# ---------------------------------------------------------------- grammar

_SIMPLE = {c.name: c for c in (HasRoot, NumRoots, Degree, FactorDegrees, NumAuts, AutGroup)}


def parse_statistic(text: str) -> Statistic:
    s, rest = _parse(text.strip(), 0)
    if rest != len(text.strip()):
        raise InputError(f"unexpected text at position {rest} in statistic {text!r}")
    return s


def _parse(t: str, i: int) -> tuple[Statistic, int]:
    j = i
    while j < len(t) and t[j].isalnum():
        j += 1
    word = t[i:j]
    if word in _SIMPLE:
        return _SIMPLE[word](), j
    if word in ("Factors", "Tup"):
        if j >= len(t) or t[j] != "[":
            raise InputError(f"expected '[' at position {j} in {t!r}")
        parts = []
        j += 1
        while True:
            s, j = _parse(t, j)
            parts.append(s)
            if j < len(t) and t[j] == ",":
                j += 1
                continue
            if j < len(t) and t[j] == "]":
                j += 1
                break
            raise InputError(f"expected ',' or ']' at position {j} in {t!r}")
        if word == "Factors":
            if len(parts) != 1:
                raise InputError("Factors takes one statistic")
            return Factors(parts[0]), j
        return Tup(parts), j
    raise InputError(f"unknown statistic {word!r} at position {i}")


def count_classes(s: Statistic, values: Sequence) -> int:
    """Number of equivalence classes among ``values``."""
    reps: list = []
    for v in values:
        if not any(s.equivalent(v, r) for r in reps):
            reps.append(v)
    return len(reps)


# ------------------------------------------------------- maximal preimages

def reduce_classes(G: P.PermGroup, groups: Sequence[P.PermGroup]) -> list[P.PermGroup]:
    """Drop conjugates and groups contained (up to conjugacy) in another."""
    kept: list[P.PermGroup] = []
    for H in sorted(groups, key=lambda H: -H.order()):
        if not any(G.contained_up_to_conjugacy(H, K) for K in kept):
            kept.append(H)
    return kept


def naive_maximal_preimages(s: Statistic, P_: P.PermGroup, v,
                            value: Callable[[P.PermGroup], object] | None = None) -> list[P.PermGroup]:
    """Maximal subgroups of ``P_`` (up to conjugacy) whose value is ``~ v``.

    ``value`` defaults to ``s.eval_group``; callers pass a different one to
    measure subgroups through a coset action.  The search runs over the
    conjugacy classes of subgroups, largest first, so it visits the same
    groups as descending through maximal subgroups would.
    """
    value = value or s.eval_group
    top = value(P_)
    if s.equivalent(v, top):
        return [P_]
    if not s.precedes(v, top):
        return []
    cands = []
    for Q in P_.subgroup_classes():
        try:
            val = value(Q)
        except NotApplicable:       # statistic undefined on Q, so Q cannot match
            continue
        if s.equivalent(val, v):
            cands.append(Q)
    return reduce_classes(P_, cands)


def maximal_preimages(s: Statistic, P_: P.PermGroup, v) -> list[P.PermGroup]:
    """Maximal preimages of ``v`` in ``P_``, one per conjugacy class."""
    if isinstance(s, HasRoot):
        return hasroot_preimages(P_, v)
    if isinstance(s, FactorDegrees):
        return factor_degrees_preimages(P_, tuple(sorted(v, reverse=True)))
    return naive_maximal_preimages(s, P_, v)


def hasroot_preimages(P_: P.PermGroup, v: bool) -> list[P.PermGroup]:
    if not v:
        return [P_] if not HasRoot().eval_group(P_) else []
    stabs = [P_.stabilizer(o[0]) for o in P_.orbits()]
    return reduce_classes(P_, stabs)


class _Fallback(Exception):
    pass


def factor_degrees_preimages(G: P.PermGroup, v: tuple) -> list[P.PermGroup]:
    """Maximal subgroups of ``G`` with orbit sizes ``v`` (up to conjugacy)."""
    sv = G.orbit_sizes()
    if sv == v:
        return [G]
    if not is_refinement(v, sv):
        return []
    if G.is_transitive():
        return _fd_transitive(G, v)
    s, factors = P.embed_direct_product(G)
    Gs = P.relabel(G, s)
    D = P.direct_product(factors)
    try:
        Hs = _fd_direct(factors, v)
        out = _intersect_conjugates(D, Gs, Hs, v)
    except (_Fallback, ResourceCapExceeded):
        return naive_maximal_preimages(FactorDegrees(), G, v)
    return [P.relabel(H, P.inv(s)) for H in out]


def _intersect_conjugates(Amb: P.PermGroup, Gs: P.PermGroup,
                          Hs: Sequence[P.PermGroup], v: tuple) -> list[P.PermGroup]:
    """``H^d meet Gs`` over ``d`` in ``N(H) \\ Amb / Gs``, keeping orbit sizes ``v``."""
    found = []
    for H in Hs:
        N = Amb.normalizer(H)
        reps = Amb.double_coset_reps(N, Gs)
        if len(reps) > DOUBLE_COSET_CAP:
            raise _Fallback
        for d in reps:
            K = Gs.intersection(H.conjugate(P.inv(d)))
            if K.orbit_sizes() == v:
                found.append(K)
    return reduce_classes(Gs, found)


def _fd_direct(factors: Sequence[P.PermGroup], v: tuple) -> list[P.PermGroup]:
    out = []

    def rec(i, rest, chosen):
        if i == len(factors):
            if not rest:
                out.append(P.direct_product(chosen))
            return
        Gi = factors[i]
        for vi in linear_divisions(Gi.degree, rest):
            left = list(rest)
            for x in vi:
                left.remove(x)
            for Hi in factor_degrees_preimages(Gi, vi):
                rec(i + 1, tuple(left), chosen + [Hi])
    rec(0, tuple(v), [])
    return out


def _fd_transitive(G: P.PermGroup, v: tuple) -> list[P.PermGroup]:
    s, Ws = P.embed_wreath(G)
    if len(Ws) == 1 or P.wreath_order(Ws) > P.TABLE_CAP:
        return naive_maximal_preimages(FactorDegrees(), G, v)
    W = P.wreath_product(Ws)
    Gs = P.relabel(G, s)
    try:
        Hs = _fd_wreath(list(Ws), v)
        out = _intersect_conjugates(W, Gs, Hs, v)
    except (_Fallback, ResourceCapExceeded):
        return naive_maximal_preimages(FactorDegrees(), G, v)
    return [P.relabel(H, P.inv(s)) for H in out]


def _fd_wreath(Ws: Sequence[P.PermGroup], v: tuple) -> list[P.PermGroup]:
    """Maximal preimages of ``v`` in ``wreath_product(Ws)`` (possibly redundant)."""
    if len(Ws) == 1:
        return naive_maximal_preimages(FactorDegrees(), Ws[0], v)
    B = Ws[0]
    e = B.degree
    a = 1
    for W in Ws[1:]:
        a *= W.degree
    inner_cache: dict[tuple, list] = {}

    def inner(hs):
        if hs not in inner_cache:
            inner_cache[hs] = _fd_wreath(Ws[1:], hs)
        return inner_cache[hs]

    out = []
    for div in rectangle_divisions(e, a, v):
        widths = tuple(sorted((w for w, _ in div), reverse=True))
        for HB in naive_maximal_preimages(FactorDegrees(), B, widths):
            orbs = HB.orbits()
            seen = set()
            for perm_ in itertools.permutations(range(len(div))):
                if any(len(orbs[j]) != div[perm_[j]][0] for j in range(len(orbs))):
                    continue
                key = tuple(div[perm_[j]] for j in range(len(orbs)))
                if key in seen:
                    continue
                seen.add(key)
                options = [inner(tuple(hs)) for _, hs in key]
                for choice in itertools.product(*options):
                    gens = [P.lift_top(h, a) for h in HB.gens]
                    for orb, HA in zip(orbs, choice):
                        gens += [P.on_block(g, orb[0], a, e) for g in HA.gens]
                    out.append(P.PermGroup(a * e, gens))
    return out
