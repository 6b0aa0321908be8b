"""Global models: number-field towers over Q whose completions give the
p-adic field of ``F``, together with an overgroup ``W`` of the global
Galois group in the tower's root labelling.

Model trees are built from ``Sym``, ``Factors[M]``, ``RamTower[M]`` and
``Select[RootOfUnity,RootOfUniformizer,Sym]``.  Every tower is certified
by embedding it into the target local field (see ``gtower.embed_tower``).

``W`` carries a shape used by the subgroup-choice module:

* ``("sym", d)``           full symmetric group
* ``("group", G)``         an explicit group
* ``("wreath", [s_1..s_t])`` wreath product, ``s_1`` on the coarsest blocks
* ``("direct", [s_1..s_r])`` direct product on consecutive ranges
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from . import perm as P
from ._pari import pari
from .errors import Inconsistent, InputError, PrecisionError, ResourceCapExceeded
from .gtower import (LocalEmbedding, RationalTower, Step, complex_roots, extend_embedding,
                     embed_tower, monomial_exponents, primitive_weights)
from .padic import (LocalField, enumerate_extensions, factor_fields, factor_padic, from_pol,
                    is_squarefree, monic_integral, precision_ceiling, ramification_data,
                    solve_padic, truncate)


# ---------------------------------------------------------------- model trees

@dataclass(frozen=True)
class ModelSpec:
    kind: str                       # Sym | Factors | RamTower | Select
    inner: "ModelSpec | None" = None
    options: tuple = ()             # Select: allowed constructors

    def format(self) -> str:
        if self.kind == "Sym":
            return "Sym"
        if self.kind == "Select":
            return "Select[" + ",".join(self.options) + "]"
        return f"{self.kind}[{self.inner.format()}]"


SYM = ModelSpec("Sym")
SELECT = ModelSpec("Select", options=("RootOfUnity", "RootOfUniformizer", "Sym"))


def shape_group(shape) -> P.PermGroup:
    kind, data = shape
    if kind == "sym":
        return P.symmetric_group(data)
    if kind == "group":
        return data
    if kind == "wreath":
        return P.wreath_product([shape_group(s) for s in data])
    if kind == "direct":
        return P.direct_product([shape_group(s) for s in data])
    raise ValueError(kind)


def _simplify(shape):
    kind, data = shape
    if kind in ("wreath", "direct"):
        data = [_simplify(s) for s in data]
        if kind == "wreath":
            data = [s for s in data if _degree(s) > 1] or data[:1]
        if len(data) == 1:
            return data[0]
        return (kind, data)
    if kind == "group" and data.order() == math.factorial(data.degree):
        return ("sym", data.degree)
    return shape


def _degree(shape) -> int:
    kind, data = shape
    if kind == "sym":
        return data
    if kind == "group":
        return data.degree
    degs = [_degree(s) for s in data]
    return math.prod(degs) if kind == "wreath" else sum(degs)


@dataclass
class GlobalModel:
    p: int
    F: list[int]
    towers: list[RationalTower]
    weights: list[tuple]
    shape: tuple
    provenance: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.shape = _simplify(self.shape)
        self.W = shape_group(self.shape)
        self.offsets = self._choose_offsets()

    def _choose_offsets(self) -> list[int]:
        """Rational shifts per tower keeping all root values distinct."""
        base = [complex_roots(T, 30).combination(w) for T, w in zip(self.towers, self.weights)]
        for s in range(0, 200):
            offs = [j * s for j in range(len(base))]
            vals = [v + o for b, o in zip(base, offs) for v in b]
            if all(abs(a - b) > 1e-8 for a, b in itertools.combinations(vals, 2)):
                return offs
        raise PrecisionError("no separating offsets")

    @property
    def degree(self) -> int:
        return sum(T.degree for T in self.towers)

    def root_values(self, digits: int) -> list:
        out = []
        for T, w, o in zip(self.towers, self.weights, self.offsets):
            out += [v + o for v in complex_roots(T, digits).combination(w)]
        return out

    def dump(self) -> dict:
        return {
            "p": self.p,
            "F": self.F,
            "towers": [T.format() for T in self.towers],
            "W": self.W.format(),
            "order": self.W.order(),
            "provenance": self.provenance,
        }


# ------------------------------------------------------------ helpers

def _tower_model(p, F, T: RationalTower, shape, prov) -> GlobalModel:
    return GlobalModel(p, list(F), [T], [primitive_weights(T)], shape, prov)


def _combine(p, F, parts: Sequence[GlobalModel], prov) -> GlobalModel:
    towers = [T for m in parts for T in m.towers]
    weights = [w for m in parts for w in m.weights]
    shape = ("direct", [m.shape for m in parts])
    return GlobalModel(p, list(F), towers, weights, shape,
                       prov + [x for m in parts for x in m.provenance])


def _label_perm(points: Sequence, images: Sequence) -> list[int]:
    """Index in ``points`` of each value in ``images`` (nearest match)."""
    out = []
    for z in images:
        d = [abs(z - w) for w in points]
        out.append(min(range(len(points)), key=d.__getitem__))
    if sorted(out) != list(range(len(points))):
        raise PrecisionError("could not match roots to labels")
    return out


# ------------------------------------------------------------ Sym

def symmetric_model(F: Sequence[int], p: int) -> GlobalModel:
    """Tower ``[F]`` with ``W = S_d``; ``F`` is already rational."""
    F = monic_integral(F)
    return _tower_model(p, F, RationalTower.single(F), ("sym", len(F) - 1), ["Sym"])


def approximate_step(target: Sequence, p: int, k: int) -> list[Fraction]:
    """Rational polynomial within ``p^k`` of the monic target, coefficientwise."""
    return [truncate(Fraction(c), p, k) for c in target[:-1]] + [Fraction(1)]


def symmetric_step(target: Sequence, p: int, k: int | None = None) -> list[Fraction]:
    """Smallest-precision approximant of ``target`` defining the same field.

    ``k`` is raised by doubling until the approximant is certified.
    """
    target = [Fraction(c) for c in target]
    L = LocalField(monic_integral(target), p)
    k = k or 2
    while k <= precision_ceiling():
        cand = approximate_step(target, p, k)
        try:
            T = RationalTower.single(cand)
            if embed_tower(T, L) is not None:
                return cand
        except (PrecisionError, InputError):
            pass
        k *= 2
    raise PrecisionError("no certified approximant")


# ------------------------------------------------------------ Factors

def factors_model(F: Sequence[int], p: int, inner: ModelSpec) -> GlobalModel:
    F = monic_integral(F)
    parts = []
    for G in factor_fields(F, p):
        parts.append(build_model(G, p, inner, irreducible=True))
    return _combine(p, F, parts, ["Factors"])


# ------------------------------------------------------------ RamTower

def _unramified_poly(p: int, f: int) -> list[int]:
    return [int(c) for c in from_pol(pari.lift(pari.ffinit(p, f, "x")))]


def _segment_candidates(L: LocalField, D: int, e: int, f: int):
    """Generators in ``L`` of subfields of degree ``D`` with invariants ``(e, f)``."""
    if D == L.degree:
        yield L.gen, L.e * L.N
        return
    if e == 1:
        polys = [_unramified_poly(L.p, f)]
    else:
        try:
            polys = [E for E, _, _ in enumerate_extensions(L.p, e, f)]
        except ResourceCapExceeded:
            return
    for E in polys:
        try:
            rts = L.roots(E)
        except PrecisionError:
            continue
        for r, Pr in rts:
            yield r, Pr


def _relative_minpoly(beta, Pb, emb: LocalEmbedding, lower: Sequence[int], d: int):
    """Coefficients of ``beta``'s degree-``d`` relation over the embedded field.

    Returns ``(coeff table, precision digits)`` where ``table[i][m]`` is the
    coefficient of ``m * y^i`` in ``y^d - sum table[i][m] m y^i``.
    """
    L = emb.L
    mons = emb.monomials(lower)
    exps = monomial_exponents(lower)
    powers = [L.one()]
    for _ in range(d):
        powers.append(L.mul(powers[-1], beta))
    cols = []
    keys = []
    for i in range(d):
        for m, mv in zip(exps, mons):
            cols.append(L.coords(L.mul(mv, powers[i])))
            keys.append((i, m))
    rhs = L.coords(powers[d])
    digits = min(emb.prec, Pb) // L.e
    M = [[cols[j][r] for j in range(len(cols))] for r in range(L.degree)]
    x, prec = solve_padic(M, rhs, L.p, digits)
    table: dict = {}
    for (i, m), a in zip(keys, x):
        table.setdefault(i, {})[m] = a
    return table, prec


def _step_from_table(table, d, k, p) -> Step:
    coeffs = []
    for i in range(d):
        ci = []
        for m, a in sorted(table.get(i, {}).items()):
            c = -truncate(a, p, k)
            if c:
                ci.append((m, c))
        coeffs.append(tuple(ci))
    return Step(d, tuple(coeffs))


def _symmetric_segment(L, emb, lower, d, D, e, f):
    """Step and embedding for a segment modelled by ``S_d``."""
    for beta, Pb in _segment_candidates(L, D, e, f):
        try:
            table, prec = _relative_minpoly(beta, Pb, emb, lower, d)
        except (Inconsistent, PrecisionError):
            continue
        k = 1
        while k <= prec:
            step = _step_from_table(table, d, k, L.p)
            try:
                ext = extend_embedding(step, emb, lower)
            except PrecisionError:
                ext = []
            if ext:
                return step, ext[0]
            k *= 2
    return None


# ---- root-of-unity segment

def _znlog_vector(x: int, n: int, G) -> list[int]:
    return [int(c) for c in pari.znlog(x, G)]


def perfect_complement(p: int, d: int, n: int):
    """A character ``chi: (Z/n)^x -> Z/d`` with ``chi(p) = 1``, if one exists.

    Its kernel is a complement of ``<p>`` (which must have order ``d``).
    Returned as a function on residues.
    """
    if pari.znorder(pari.Mod(p, n)) != d:
        return None
    if n <= 2:
        return (lambda x: 0) if d == 1 else None
    G = pari.znstar(n, 1)
    cyc = [int(c) for c in G[1][1]]
    v = _znlog_vector(p, n, G)
    ranges = [range(math.gcd(c, d)) for c in cyc]
    for s in itertools.product(*ranges):
        t = [d // math.gcd(c, d) * si for c, si in zip(cyc, s)]
        if sum(a * b for a, b in zip(v, t)) % d == 1 % d:
            return lambda x, t=t: sum(a * b for a, b in zip(_znlog_vector(x, n, G), t)) % d
    return None


def root_of_unity_n(p: int, d: int, minimal: bool = False) -> list[int]:
    """Candidate moduli ``n`` with ``ord_n(p) = d``: the default first."""
    q = p ** d - 1
    if not minimal:
        return [q]
    bad = [p ** c - 1 for c in range(1, d) if d % c == 0]
    return [n for n in range(2, q + 1) if q % n == 0 and all(b % n for b in bad)]


def gauss_period_poly(p: int, d: int, n: int, chi) -> tuple[list[int], list]:
    """Minimal polynomial of the period over ``ker chi`` and its conjugates.

    Returns ``(coefficients, [eta_0, .., eta_{d-1}])`` with
    ``eta_{j+1} = Frobenius(eta_j)``.
    """
    H = [x for x in range(1, n) if math.gcd(x, n) == 1 and chi(x) == 0]
    digits = 30 + len(H).bit_length() + 10 * d
    with mpmath.workdps(digits):
        zeta = mpmath.exp(2j * mpmath.pi / n)
        etas = [sum(zeta ** (h * pow(p, j, n) % n) for h in H) for j in range(d)]
        poly = [mpmath.mpc(1)]
        for eta in etas:
            poly = [mpmath.mpc(0)] + poly
            for i in range(len(poly) - 1):
                poly[i] -= eta * poly[i + 1]
        coeffs = []
        for c in poly:
            r = int(mpmath.nint(c.real))
            if abs(c - r) > mpmath.mpf(10) ** -10:
                raise PrecisionError("Gauss period polynomial did not round")
            coeffs.append(r)
    return coeffs, etas


def root_of_unity_step(p: int, d: int, minimal: bool = False):
    """``(polynomial, cyclic W-factor in label order)`` or ``None``."""
    if d == 1:
        return [-1, 1], P.trivial_group(1)
    for n in root_of_unity_n(p, d, minimal):
        chi = perfect_complement(p, d, n)
        if chi is None:
            continue
        poly, etas = gauss_period_poly(p, d, n, chi)
        lab = complex_roots(RationalTower.single(poly), 30)
        pts = [v[0] for v in lab.values]
        idx = _label_perm(pts, etas)        # eta_j sits at label idx[j]
        gen = [0] * d
        for j in range(d):
            gen[idx[j]] = idx[(j + 1) % d]
        return poly, P.PermGroup(d, [tuple(gen)])
    return None


# ---- root-of-uniformiser segment

def root_of_uniformizer_candidates(p: int) -> list[int]:
    return [s * p * u for u in range(1, max(p, 2)) for s in (1, -1)]


def root_of_uniformizer_group(m: int, pi: int) -> P.PermGroup:
    """Affine maps on ``zeta^i alpha_0`` expressed in the sorted label order."""
    poly = [-pi] + [0] * (m - 1) + [1]
    lab = complex_roots(RationalTower.single(poly), 30)
    pts = [v[0] for v in lab.values]
    with mpmath.workdps(30):
        a0 = mpmath.root(abs(pi), m) * (mpmath.exp(1j * mpmath.pi / m) if pi < 0 else 1)
        zeta = mpmath.exp(2j * mpmath.pi / m)
        idx = _label_perm(pts, [a0 * zeta ** i for i in range(m)])
    aff = P.affine_group(m)
    gens = []
    for g in aff.gens:
        img = [0] * m
        for i in range(m):
            img[idx[i]] = idx[g[i]]
        gens.append(tuple(img))
    return P.PermGroup(m, gens)


# ---- the tower

def ramtower_model(G: Sequence[int], p: int, segment: ModelSpec) -> GlobalModel:
    """Tower along the ramification filtration of ``Q_p[x]/(G)``."""
    G = monic_integral(G)
    L = LocalField(G, p)
    N = L.N
    while True:
        try:
            return _ramtower_at(G, p, L.with_precision(N), segment)
        except PrecisionError:
            N *= 2
            if N > precision_ceiling():
                raise


def _ramtower_at(G, p, L: LocalField, segment: ModelSpec) -> GlobalModel:
    rd = ramification_data(L)
    emb = LocalEmbedding(L, [], L.e * L.N)
    lower: list[int] = []
    steps: list[Step] = []
    shapes = []
    prov = []
    allowed = segment.options if segment.kind == "Select" else ("Sym",)
    for lev in range(1, len(rd.degrees)):
        D = rd.degrees[lev]
        kind = rd.kinds[lev - 1]
        base = math.prod(lower)
        d = D // base
        if D % base or d == 1:
            continue
        # invariants of the subfield of degree D
        if all(k == "unramified" for k in rd.kinds[:lev]):
            e_k, f_k = 1, D
        else:
            f_k = rd.f
            e_k = D // f_k
        built = None
        if not lower:
            if kind == "unramified" and "RootOfUnity" in allowed:
                built = _try_root_of_unity(L, emb, d)
            elif kind == "tame" and "RootOfUniformizer" in allowed and e_k == d:
                built = _try_root_of_uniformizer(L, emb, d)
        if built is None:
            got = _symmetric_segment(L, emb, lower, d, D, e_k, f_k)
            if got is None:
                if D == L.degree:
                    raise PrecisionError("top segment could not be certified")
                continue
            step, emb = got
            shape, tag = ("sym", d), "Sym"
        else:
            step, emb, grp, tag = built
            shape = ("group", grp)
        steps.append(step)
        shapes.append(shape)
        lower.append(d)
        prov.append(f"{tag}({kind},{d})")
    T = RationalTower(tuple(steps))
    return GlobalModel(p, list(G), [T], [primitive_weights(T)], ("wreath", shapes),
                       ["RamTower[" + ",".join(prov) + "]"])


def _try_root_of_unity(L, emb, d):
    got = root_of_unity_step(L.p, d)
    if got is None:
        return None
    poly, grp = got
    step = Step.rational(poly)
    ext = extend_embedding(step, emb, [])
    if not ext:
        return None
    return step, ext[0], grp, "RootOfUnity"


def _try_root_of_uniformizer(L, emb, m):
    if m % L.p == 0:
        return None
    for pi in root_of_uniformizer_candidates(L.p):
        step = Step.rational([-pi] + [0] * (m - 1) + [1])
        ext = extend_embedding(step, emb, [])
        if ext:
            return step, ext[0], root_of_uniformizer_group(m, pi), "RootOfUniformizer"
    return None


def select_constructor(kind: str, first: bool, options=SELECT.options) -> str:
    """Constructor used for a segment of the given kind."""
    if first and kind == "unramified" and "RootOfUnity" in options:
        return "RootOfUnity"
    if first and kind == "tame" and "RootOfUniformizer" in options:
        return "RootOfUniformizer"
    return "Sym"


# ------------------------------------------------------------ dispatch

def build_model(F: Sequence, p: int, spec: ModelSpec, irreducible: bool | None = None) -> GlobalModel:
    F = monic_integral(F)
    if not is_squarefree(F):
        raise InputError("polynomial is not squarefree")
    if spec.kind == "Sym":
        return symmetric_model(F, p)
    if spec.kind == "Factors":
        return factors_model(F, p, spec.inner)
    if spec.kind == "RamTower":
        if irreducible is None:
            irreducible = len(factor_padic(F, p)) == 1
        if not irreducible:
            return factors_model(F, p, spec)
        return ramtower_model(F, p, spec.inner)
    if spec.kind == "Select":
        return build_model(F, p, ModelSpec("RamTower", spec), irreducible)
    raise InputError(f"unknown model {spec.kind}")
