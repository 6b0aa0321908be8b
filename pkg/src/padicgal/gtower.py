"""Towers of number fields over Q and their complex and p-adic embeddings.

A tower step is a monic polynomial in a new generator ``x_k`` whose
coefficients are rational polynomials in ``x_1 .. x_{k-1}``.  Complex roots
are labelled by leaf tuples ``(i_1, .., i_t)`` in mixed radix with the
first step most significant, matching the point order of
``perm.wreath_product([W_1, .., W_t])``.

Root ordering is fixed once by a low-precision reference pass (sorted by
real then imaginary part inside each fibre); higher precisions refine
those reference roots by Newton iteration, so the labelling never changes
when the precision is raised.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath

from .errors import PrecisionError
from .padic import LocalField, full_column_rank, vp

REFERENCE_DIGITS = 40

Monomial = tuple  # exponent tuple over the lower generators


@dataclass(frozen=True)
class Step:
    """Monic ``y^d + sum_i c_i y^i`` with ``c_i`` a sparse polynomial in lower gens."""
    degree: int
    coeffs: tuple  # coeffs[i] = tuple of (Monomial, Fraction), i < degree

    @classmethod
    def rational(cls, poly: Sequence) -> "Step":
        poly = [Fraction(c) for c in poly]
        if poly[-1] != 1:
            raise ValueError("step polynomial must be monic")
        d = len(poly) - 1
        return cls(d, tuple(((((), c),) if c else ()) for c in poly[:d]))

    def is_rational(self) -> bool:
        return all(m == () for ci in self.coeffs for m, _ in ci)

    def rational_coeffs(self) -> list[Fraction]:
        out = []
        for ci in self.coeffs:
            out.append(sum((c for _, c in ci), Fraction(0)))
        return out + [Fraction(1)]

    def max_denominator_exponent(self, p: int) -> int:
        s = 0
        for ci in self.coeffs:
            for _, c in ci:
                if c:
                    s = max(s, -vp(c, p))
        return s


@dataclass(frozen=True)
class RationalTower:
    steps: tuple[Step, ...]

    @classmethod
    def single(cls, poly: Sequence) -> "RationalTower":
        return cls((Step.rational(poly),))

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(s.degree for s in self.steps)

    @property
    def degree(self) -> int:
        d = 1
        for s in self.steps:
            d *= s.degree
        return d

    def format(self) -> list[str]:
        out = []
        for k, st in enumerate(self.steps, start=1):
            terms = [f"x{k}^{st.degree}"]
            for i, ci in enumerate(st.coeffs):
                for m, c in ci:
                    mono = "*".join(f"x{j + 1}^{e}" for j, e in enumerate(m) if e)
                    yk = f"x{k}^{i}" if i else ""
                    body = "*".join(t for t in (mono, yk) if t)
                    terms.append(f"({c})" + (f"*{body}" if body else ""))
            out.append(" + ".join(terms))
        return out

    def to_json(self) -> list:
        return [[st.degree, [[[list(m), str(c)] for m, c in ci] for ci in st.coeffs]]
                for st in self.steps]


# ------------------------------------------------------------------ complex

def _eval_coeffs(step: Step, lower: Sequence) -> list:
    """Complex coefficients, ascending, of ``step`` at lower generator values."""
    out = []
    for ci in step.coeffs:
        acc = mpmath.mpc(0)
        for m, c in ci:
            term = mpmath.mpf(c.numerator) / c.denominator
            for v, e in zip(lower, m):
                if e:
                    term *= v ** e
            acc += term
        out.append(acc)
    return out + [mpmath.mpc(1)]


def _polyval(cs, z):
    acc = mpmath.mpc(0)
    for c in reversed(cs):
        acc = acc * z + c
    return acc


def _dpolyval(cs, z):
    acc = mpmath.mpc(0)
    for i in range(len(cs) - 1, 0, -1):
        acc = acc * z + i * cs[i]
    return acc


def _sort_key(z):
    scale = mpmath.mpf(10) ** 12
    return (int(mpmath.nint(z.real * scale)), int(mpmath.nint(z.imag * scale)))


def _fibre_roots(cs) -> list:
    d = len(cs) - 1
    if d == 1:
        return [-cs[0]]
    rts = mpmath.polyroots(list(reversed(cs)), maxsteps=400, extraprec=4 * mpmath.mp.prec)
    return [mpmath.mpc(r) for r in rts]


@lru_cache(maxsize=256)
def _reference(T: RationalTower) -> dict:
    """Reference roots per fibre prefix, sorted; computed once per tower."""
    digits = REFERENCE_DIGITS
    while True:
        try:
            with mpmath.workdps(digits):
                return _reference_at(T)
        except PrecisionError:
            digits *= 2
            if digits > 2000:
                raise


def _reference_at(T: RationalTower) -> dict:
    tree: dict = {(): ((), [])}
    level = [((), ())]  # (prefix, values)
    sep = mpmath.mpf(10) ** (-(mpmath.mp.dps // 3))
    for st in T.steps:
        nxt = []
        for prefix, vals in level:
            rts = sorted(_fibre_roots(_eval_coeffs(st, vals)), key=_sort_key)
            for a, b in itertools.combinations(rts, 2):
                if abs(a - b) < sep:
                    raise PrecisionError("roots not separated at reference precision")
            tree[prefix] = rts
            for i, r in enumerate(rts):
                nxt.append((prefix + (i,), vals + (r,)))
        level = nxt
    return tree


@dataclass
class RootLabeling:
    """Complex generator values per leaf, in mixed-radix leaf order."""
    leaves: list            # leaf tuples (i_1, .., i_t)
    values: list            # values[k] = (x_1, .., x_t) at leaf k
    digits: int

    def combination(self, weights: Sequence[int]) -> list:
        return [sum((w * v for w, v in zip(weights, vals)), mpmath.mpc(0)) for vals in self.values]


def complex_roots(T: RationalTower, digits: int = 30) -> RootLabeling:
    """All complex embeddings of the tower to ``digits`` decimal digits."""
    ref = _reference(T)
    with mpmath.workdps(digits + 20):
        tol = mpmath.mpf(10) ** (-(digits + 10))
        level = [((), ())]
        for st in T.steps:
            nxt = []
            for prefix, vals in level:
                cs = _eval_coeffs(st, vals)
                for i, r0 in enumerate(ref[prefix]):
                    r = mpmath.mpc(r0)
                    for _ in range(200):
                        f = _polyval(cs, r)
                        df = _dpolyval(cs, r)
                        if df == 0:
                            raise PrecisionError("derivative vanished during refinement")
                        step = f / df
                        r -= step
                        if abs(step) <= tol * max(1, abs(r)):
                            break
                    else:
                        raise PrecisionError("Newton refinement did not converge")
                    nxt.append((prefix + (i,), vals + (r,)))
            level = nxt
        return RootLabeling([pr for pr, _ in level], [v for _, v in level], digits)


def primitive_weights(T: RationalTower) -> tuple[int, ...]:
    """Integer weights making ``sum w_k x_k`` take distinct values on all leaves."""
    lab = complex_roots(T, 30)
    t = len(T.steps)
    cands = [tuple([0] * (t - 1) + [1])]
    for s in range(1, 50):
        cands.append(tuple(((k + 1) * s) % 7 + 1 for k in range(t - 1)) + (1,))
    with mpmath.workdps(30):
        for w in cands:
            vals = lab.combination(w)
            if all(abs(a - b) > 1e-8 for a, b in itertools.combinations(vals, 2)):
                return w
    raise PrecisionError("no primitive combination found")


def root_bound(T: RationalTower) -> float:
    """Largest absolute value of any generator at any leaf, inflated by 10%."""
    lab = complex_roots(T, 30)
    m = max((abs(v) for vals in lab.values for v in vals), default=0)
    return float(m) * 1.1


# ----------------------------------------------------------------- p-adic

@dataclass
class LocalEmbedding:
    """Images of the tower generators in a local field, with precision."""
    L: LocalField
    gens: list
    prec: int              # uniformiser units

    def monomials(self, degrees: Sequence[int]) -> list:
        """Elements ``prod gen_k^{j_k}`` with ``j_k < degrees[k]``, mixed radix."""
        L = self.L
        out = [L.one()]
        for g, d in zip(self.gens, degrees):
            powers = [L.one()]
            for _ in range(d - 1):
                powers.append(L.mul(powers[-1], g))
            out = [L.mul(a, b) for a in out for b in powers]
        return out


def monomial_exponents(degrees: Sequence[int]) -> list[tuple]:
    return list(itertools.product(*[range(d) for d in degrees]))


def _local_step_coeffs(step: Step, emb: LocalEmbedding):
    """Step coefficients as elements of ``L`` plus their precision."""
    L = emb.L
    p = L.p
    s = step.max_denominator_exponent(p)
    scale = p ** s
    P = min(emb.prec, L.e * L.N) - L.e * s
    if P <= 0:
        raise PrecisionError("not enough precision to evaluate step")
    cache = {}

    def mono(m):
        if m not in cache:
            acc = L.one()
            for g, e in zip(emb.gens, m):
                if e:
                    acc = L.mul(acc, L.pow(g, e))
            cache[m] = acc
        return cache[m]

    out = []
    for ci in step.coeffs:
        acc = L.zero()
        for m, c in ci:
            acc = L.add(acc, L.mul(L.elt(c * scale), mono(m)))
        if s:
            coords = [int(x) for x in acc]
            if any(x % scale for x in coords):
                return None, 0
            from ._pari import pari
            acc = L.red(pari.Col([x // scale for x in coords]))
        out.append(acc)
    out.append(L.one())
    return out, P


def extend_embedding(step: Step, emb: LocalEmbedding, lower_degrees: Sequence[int]) -> list[LocalEmbedding]:
    """All ways to send the new generator to a root in ``L`` generating a field
    of degree ``prod(lower_degrees) * step.degree`` (certified)."""
    L = emb.L
    cs, P = _local_step_coeffs(step, emb)
    if cs is None:
        return []
    out = []
    degs = list(lower_degrees) + [step.degree]
    for r, Pr in L.roots(cs, prec=P):
        new = LocalEmbedding(L, emb.gens + [r], min(P, Pr))
        cols = [L.coords(x) for x in new.monomials(degs)]
        if full_column_rank(cols, L.p, new.prec // L.e):
            out.append(new)
    return out


def embed_tower(T: RationalTower, L: LocalField) -> LocalEmbedding | None:
    """An embedding of the tower's top field into ``L`` onto all of ``L``.

    Backtracks over root choices; ``None`` if there is none.
    """
    if T.degree != L.degree:
        return None

    def dfs(k, emb):
        if k == len(T.steps):
            return emb
        for nxt in extend_embedding(T.steps[k], emb, T.degrees[:k]):
            got = dfs(k + 1, nxt)
            if got is not None:
                return got
        return None

    start = LocalEmbedding(L, [], L.e * L.N)
    return dfs(0, start)


def certify_completion(T: RationalTower, L: LocalField) -> bool:
    """Is ``L`` the completion of the tower's top field at some prime over p?"""
    from .padic import precision_ceiling
    N = L.N
    tries = 0
    while True:
        try:
            if embed_tower(T, L.with_precision(N)) is not None:
                return True
            # a failed rank certificate may only reflect low precision
            tries += 1
            if tries >= 2:
                return False
        except PrecisionError:
            if 2 * N > precision_ceiling():
                raise
        N *= 2
