"""Finite extensions of Q_p at capped precision.

A :class:`LocalField` is ``Q_p[y]/(A)`` for a monic integral ``A`` that is
irreducible over ``Q_p``.  Arithmetic happens in PARI's integral basis of
the ``p``-maximal order, with coordinates reduced modulo ``p^N``.  Root
finding recurses over residue classes (``x -> r + pi x``) and finishes
simple roots by Newton iteration; precision is tracked in units of the
uniformiser so that exhausted precision raises instead of guessing.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from ._pari import pari
from .errors import Inconsistent, InputError, PrecisionError

INF = math.inf
START_PRECISION = 32


def precision_ceiling() -> int:
    return int(os.environ.get("GALOIS_PRECISION_CEILING", 1 << 13))


# ------------------------------------------------------------------ rationals

def vp(x, p: int):
    """p-adic valuation of a rational; ``inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _pari_num(c):
    c = Fraction(c)
    return pari(c.numerator) / pari(c.denominator) if c.denominator != 1 else pari(c.numerator)


def to_pol(coeffs: Sequence, var: str = "x"):
    """PARI polynomial from ascending coefficients."""
    return pari.Pol([_pari_num(c) for c in reversed(list(coeffs))], var) if coeffs else pari(0)


def _to_frac(g) -> Fraction | int:
    t = g.type()
    if t == "t_INT":
        return int(g)
    if t == "t_FRAC":
        return Fraction(int(g.numerator()), int(g.denominator()))
    raise TypeError(f"not rational: {g}")


def from_pol(P) -> list:
    """Ascending rational coefficients of a PARI polynomial."""
    if P == 0:
        return []
    return [_to_frac(c) for c in pari.Vecrev(P)]


def lower_hull(points: Iterable[tuple[int, float]]) -> list[tuple[int, float]]:
    pts = sorted((x, y) for x, y in points if y != INF)
    hull: list[tuple[int, float]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon(coeffs: Sequence, p: int) -> list[tuple[Fraction, int]]:
    """Slopes and lengths of the lower hull of ``(i, v_p(a_i))``."""
    if not any(coeffs):
        raise InputError("zero polynomial")
    hull = lower_hull((i, vp(c, p)) for i, c in enumerate(coeffs))
    return [(Fraction(y2 - y1, x2 - x1), x2 - x1)
            for (x1, y1), (x2, y2) in zip(hull, hull[1:])]


def disc_valuation(coeffs: Sequence, p: int) -> int:
    return vp(_to_frac(pari.poldisc(to_pol(coeffs))), p)


def is_squarefree(coeffs: Sequence) -> bool:
    return bool(pari.issquarefree(to_pol(coeffs)))


def monic_integral(coeffs: Sequence) -> list[int]:
    """Rescale ``F`` to a monic integral polynomial with the same splitting field."""
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    if len(c) < 2:
        raise InputError("polynomial must have degree at least 1")
    den = math.lcm(*(x.denominator for x in c))
    c = [x * den for x in c]
    a = c[-1]
    d = len(c) - 1
    # a^(d-1) F(x / a) is monic with integer coefficients
    out = [c[i] * a ** (d - 1 - i) for i in range(d)] + [Fraction(1)]
    return [int(x) for x in out]


# ------------------------------------------------------------- factorization

@dataclass(frozen=True)
class PadicFactor:
    """Monic irreducible factor over Q_p, coefficients known modulo ``p^precision``."""
    coeffs: tuple[int, ...]
    precision: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def balanced(self, k: int, p: int) -> list[int]:
        """Coefficients reduced to ``(-p^k/2, p^k/2]``."""
        m = p ** k
        out = []
        for c in self.coeffs[:-1]:
            r = c % m
            if r > m // 2:
                r -= m
            out.append(r)
        return out + [1]


def _factor_once(F, p: int, N: int) -> list[PadicFactor]:
    fac = pari.factorpadic(to_pol(F), p, N)
    out = []
    for k in range(int(pari.matsize(fac)[0])):
        g = fac[k, 0]
        mult = int(fac[k, 1])
        if mult != 1:
            raise InputError("polynomial is not squarefree")
        cs = [int(pari.lift(c)) if c != 0 else 0 for c in pari.Vecrev(g)]
        lead = cs[-1]
        if lead % p:
            inv_l = pow(lead, -1, p ** N)
            cs = [c * inv_l % p ** N for c in cs]
        out.append(PadicFactor(tuple(cs), N))
    return sorted(out, key=lambda f: (f.degree, f.coeffs))


def factor_padic(F: Sequence, p: int, N: int | None = None) -> list[PadicFactor]:
    """Irreducible factors over Q_p of a monic integral squarefree ``F``.

    PARI's p-adic factorization determines the factor degrees exactly for
    squarefree input; the precision only bounds the coefficient accuracy.
    The degrees are still cross-checked against a run at twice the precision.
    """
    F = [int(c) for c in F]
    if F[-1] != 1:
        raise InputError("factor_padic expects a monic integral polynomial")
    if not is_squarefree(F):
        raise InputError("polynomial is not squarefree")
    N = N or START_PRECISION
    while N <= precision_ceiling():
        a = _factor_once(F, p, N)
        b = _factor_once(F, p, 2 * N)
        if sorted(f.degree for f in a) == sorted(f.degree for f in b):
            return a
        N *= 2
    raise PrecisionError("factor degrees did not stabilise")


def factor_degrees(F: Sequence, p: int) -> tuple[int, ...]:
    return tuple(sorted((f.degree for f in factor_padic(F, p)), reverse=True))


# -------------------------------------------------------------- local fields

class LocalField:
    """``Q_p[y]/(A)`` for monic integral ``A`` irreducible over Q_p."""

    def __init__(self, A: Sequence[int], p: int, N: int = START_PRECISION, _nf=None):
        self.A = tuple(int(c) for c in A)
        if self.A[-1] != 1:
            raise InputError("defining polynomial must be monic")
        self.p = p
        self.degree = len(self.A) - 1
        self.N = N
        self.pN = pari(p) ** N
        self.pol = to_pol(self.A, "y")
        if _nf is None:
            try:
                nf = pari.nfinit([self.pol, [p]])
            except Exception as exc:  # PARI rejects Q-reducible polynomials
                raise InputError(f"not irreducible: {exc}") from None
            prs = pari.idealprimedec(nf, p)
            if len(prs) != 1:
                raise InputError("defining polynomial is reducible over Q_p")
            pr = prs[0]
            _nf = (nf, pr, pari.nfmodprinit(nf, pr))
        self._nfdata = _nf
        self.nf, self.pr, self.modpr = _nf
        self.e = int(self.pr[2])
        self.f = int(self.pr[3])
        self.q = p ** self.f

    def with_precision(self, N: int) -> "LocalField":
        return LocalField(self.A, self.p, N, _nf=self._nfdata)

    def __repr__(self) -> str:
        return f"LocalField(p={self.p}, A={list(self.A)}, e={self.e}, f={self.f}, N={self.N})"

    # -- elements -------------------------------------------------------------
    @cached_property
    def pi(self):
        return self.red(self.pr[1]) if self.e > 1 else self.elt(self.p)

    @cached_property
    def inv_pi(self):
        return pari.nfeltdiv(self.nf, self.elt(1), self.pi)

    @cached_property
    def gen(self):
        """The class of ``y``."""
        return self.red(pari.nfalgtobasis(self.nf, pari("y")))

    def elt(self, x):
        if isinstance(x, (int, Fraction)):
            return self.red(pari.nfalgtobasis(self.nf, _pari_num(x)))
        return self.red(pari.nfalgtobasis(self.nf, x))

    def red(self, x):
        try:
            x = pari.lift(x * pari.Mod(1, self.pN))
        except Exception:
            raise PrecisionError("element is not integral at p") from None
        if x.type() != "t_COL":
            x = pari.nfalgtobasis(self.nf, x)
        return x

    def zero(self):
        return self.elt(0)

    def one(self):
        return self.elt(1)

    def add(self, a, b):
        return self.red(a + b)

    def sub(self, a, b):
        return self.red(a - b)

    def mul(self, a, b):
        return self.red(pari.nfeltmul(self.nf, a, b))

    def div(self, a, b):
        return self.red(pari.nfeltdiv(self.nf, a, b))

    def pow(self, a, k: int):
        r = self.one()
        base = a
        while k:
            if k & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            k >>= 1
        return r

    def is_zero(self, a) -> bool:
        return all(c == 0 for c in a)

    def val(self, a):
        """Valuation in units of the uniformiser (``inf`` if zero mod p^N)."""
        if self.is_zero(a):
            return INF
        return int(pari.nfeltval(self.nf, a, self.pr))

    def vp(self, a):
        v = self.val(a)
        return v if v == INF else Fraction(v, self.e)

    def residue(self, a):
        return pari.nfmodpr(self.nf, a, self.modpr)

    def lift_residue(self, r):
        return self.red(pari.nfmodprlift(self.nf, r, self.modpr))

    def to_alg(self, a) -> list:
        """Coefficients of ``a`` as a polynomial in the generator."""
        return from_pol(pari.lift(pari.nfbasistoalg(self.nf, a)))

    def coords(self, a) -> list[int]:
        return [int(c) for c in a]

    def eval_rational(self, coeffs: Sequence, x):
        acc = self.zero()
        for c in reversed(list(coeffs)):
            acc = self.add(self.mul(acc, x), self.elt(c))
        return acc

    def eval_poly(self, coeffs: Sequence, x):
        acc = self.zero()
        for c in reversed(list(coeffs)):
            acc = self.add(self.mul(acc, x), c)
        return acc

    # -- roots ----------------------------------------------------------------
    def roots(self, coeffs: Sequence, prec: int | None = None) -> list[tuple[object, int]]:
        """Roots in the field of a polynomial with integral coefficients.

        Coefficients may be rationals or field elements, known modulo
        ``pi^prec`` (default: the full working precision).  Returns pairs
        ``(root, precision)`` with precision in uniformiser units.
        """
        c = [x if not isinstance(x, (int, Fraction)) else self.elt(x) for x in coeffs]
        while c and self.is_zero(c[-1]):
            c.pop()
        if len(c) <= 1:
            if not c:
                raise PrecisionError("polynomial vanishes to working precision")
            return []
        P = self.e * self.N if prec is None else min(prec, self.e * self.N)
        return self._roots(c, P, 0)

    def _roots(self, c, P, depth):
        if depth > 4 * self.e * self.N:
            raise PrecisionError("root recursion too deep")
        vals = [self.val(ci) for ci in c]
        v0 = min(vals)
        if v0 >= P:
            raise PrecisionError("roots not separated at working precision")
        if v0 > 0:
            s = self.pow_inv_pi(v0)
            c = [self.red(pari.nfeltmul(self.nf, ci, s)) for ci in c]
            P -= v0
        rb = [self.residue(ci) for ci in c]
        rpol = pari.Pol(list(reversed(rb)), "x")
        if pari.poldegree(rpol) <= 0:
            return []
        drpol = pari.deriv(rpol, "x")
        out = []
        for r in pari.polrootsmod(rpol):
            rho = self.lift_residue(r)
            if pari.subst(drpol, "x", r) != 0:
                out.append(self._hensel(c, rho, P))
                continue
            sh = self._taylor(c, rho)
            pik = self.one()
            scaled = []
            for ci in sh:
                scaled.append(self.mul(ci, pik))
                pik = self.mul(pik, self.pi)
            for y, Py in self._roots(scaled, P, depth + 1):
                out.append((self.add(rho, self.mul(self.pi, y)), min(Py + 1, P)))
        return out

    def pow_inv_pi(self, k: int):
        r = self.elt(1)
        for _ in range(k):
            r = pari.nfeltmul(self.nf, r, self.inv_pi)
        return r

    def _taylor(self, c, r):
        """Coefficients of ``c(x + r)``."""
        c = list(c)
        n = len(c)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                c[j] = self.add(c[j], self.mul(r, c[j + 1]))
        return c

    def _hensel(self, c, r, P):
        dc = [self.mul(self.elt(i), c[i]) for i in range(1, len(c))]
        for _ in range(4 + int(math.log2(P + 1)) * 2):
            fr = self.eval_poly(c, r)
            if self.val(fr) >= P:
                return (r, P)
            r = self.sub(r, self.div(fr, self.eval_poly(dc, r)))
        raise PrecisionError("Newton iteration did not converge")

    def has_root(self, coeffs: Sequence) -> bool:
        return bool(self.roots(coeffs))


def roots_in(F: Sequence, L: LocalField) -> list[tuple[object, int]]:
    """Roots of a rational polynomial in ``L``, doubling precision as needed."""
    N = L.N
    while True:
        try:
            return L.with_precision(N).roots(F) if N != L.N else L.roots(F)
        except PrecisionError:
            N *= 2
            if N > precision_ceiling():
                raise


def count_roots(F: Sequence, L: LocalField) -> int:
    return len(roots_in(F, L))


def is_subfield(E: Sequence, L: LocalField) -> bool:
    """Does the field defined by ``E`` embed into ``L``?"""
    if len(E) - 1 == 1:
        return True
    if L.degree % (len(E) - 1):
        return False
    return bool(roots_in(E, L))


def factor_fields(F: Sequence, p: int) -> list[list[int]]:
    """Integer polynomials, one per p-adic irreducible factor of ``F``, each
    certified to define the same local field as its factor."""
    N = START_PRECISION
    while True:
        try:
            return [_field_of_factor(g, p) for g in factor_padic(F, p, N)]
        except PrecisionError:
            N *= 2
            if N > precision_ceiling():
                raise


def _field_of_factor(g: PadicFactor, p: int) -> list[int]:
    if g.degree == 1:
        return [0, 1]
    k = 2
    while k <= g.precision:
        G = g.balanced(k, p)
        try:
            L = LocalField(G, p, N=g.precision)
            roots = L.roots(list(g.coeffs), prec=L.e * g.precision)
            if any(_generates(L, r, Pr) for r, Pr in roots):
                return G
        except (InputError, PrecisionError):
            pass
        k *= 2
    raise PrecisionError("factor known to insufficient precision")


def _generates(L: LocalField, r, prec) -> bool:
    cols = [L.coords(L.pow(r, i)) for i in range(L.degree)]
    return full_column_rank(cols, L.p, prec // L.e)



# --------------------------------------------------------- extension catalogue

_EXT_CACHE: dict[tuple[int, int], list] = {}
EXTENSION_DEGREE_CAP = int(os.environ.get("GALOIS_EXTENSION_CAP", 4))


def enumerate_extensions(p: int, e: int, f: int, cap: int | None = None) -> list[tuple[list[int], int, int]]:
    """Extensions of Q_p with ramification ``e`` and residue degree ``f``.

    Returns ``(defining polynomial, e, f)`` triples, one per isomorphism class.
    """
    n = e * f
    cap = EXTENSION_DEGREE_CAP if cap is None else cap
    if n > cap:
        from .errors import ResourceCapExceeded
        raise ResourceCapExceeded(f"extension degree {n} above cap {cap}")
    if n == 1:
        return [([0, 1], 1, 1)]
    if (p, n) not in _EXT_CACHE:
        rows = []
        for t in pari.padicfields(p, n, 1):
            rows.append(([int(c) for c in from_pol(t[0])], int(t[1]), int(t[2])))
        _EXT_CACHE[(p, n)] = rows
    return [r for r in _EXT_CACHE[(p, n)] if r[1] == e and r[2] == f]


# ------------------------------------------------------ ramification polygon

def is_eisenstein(phi: Sequence, p: int) -> bool:
    n = len(phi) - 1
    return (Fraction(phi[-1]) == 1 and vp(phi[0], p) == 1
            and all(vp(c, p) >= 1 for c in phi[:n]))


def ramification_polygon(phi: Sequence, p: int) -> list[tuple[int, int]]:
    """Vertices of the ramification polygon of an Eisenstein ``phi``.

    Uses ``v_L(rho_i) = min_j (n v(phi_j) + n v(C(j, i)) + j - n)``; the
    terms have distinct residues mod ``n`` so no cancellation occurs.
    """
    n = len(phi) - 1
    pts = []
    for i in range(1, n + 1):
        best = INF
        for j in range(i, n + 1):
            if Fraction(phi[j]) == 0:
                continue
            v = n * vp(phi[j], p) + n * vp(math.comb(j, i), p) + j - n
            best = min(best, v)
        pts.append((i, best))
    return lower_hull(pts)


@dataclass(frozen=True)
class RamificationData:
    """Segment structure of a field: absolute subfield degrees and kinds."""
    e: int
    f: int
    vertices: tuple[tuple[int, int], ...]
    degrees: tuple[int, ...]          # 1 = D_0 | D_1 | ... | D_t = [L:Q_p]
    kinds: tuple[str, ...]            # per segment: unramified / tame / wild

    @property
    def segment_degrees(self) -> tuple[int, ...]:
        return tuple(b // a for a, b in zip(self.degrees, self.degrees[1:]))


def eisenstein_polynomial(L: LocalField) -> list:
    """An Eisenstein polynomial for a totally ramified ``L``."""
    if L.f != 1:
        raise InputError("field is not totally ramified")
    if is_eisenstein(L.A, L.p):
        return list(L.A)
    # characteristic polynomial of a uniformiser
    alg = pari.nfbasistoalg(L.nf, L.pr[1] if L.e > 1 else L.p)
    return from_pol(pari.charpoly(alg))


def ramification_data(L: LocalField) -> RamificationData:
    p, e, f = L.p, L.e, L.f
    w = 0
    while e % p ** (w + 1) == 0:
        w += 1
    e0 = e // p ** w
    degs = [1]
    kinds = []
    if f > 1:
        degs.append(f)
        kinds.append("unramified")
    if e0 > 1:
        degs.append(degs[-1] * e0)
        kinds.append("tame")
    verts: tuple = ()
    if w:
        if f == 1:
            phi = eisenstein_polynomial(L)
            hull = ramification_polygon(phi, p)
            verts = tuple((int(x), int(y)) for x, y in hull)
            # subfield degrees n / X for vertex abscissae X inside the wild part
            for X in sorted({x for x, _ in hull if x < p ** w}, reverse=True):
                D = L.degree // X
                if D > degs[-1]:
                    degs.append(D)
                    kinds.append("wild")
        else:
            degs.append(L.degree)
            kinds.append("wild")
    return RamificationData(e, f, verts, tuple(degs), tuple(kinds))


# ------------------------------------------------------------ linear algebra

def full_column_rank(cols: Sequence[Sequence[int]], p: int, digits: int) -> bool:
    """Certify that integer columns known modulo ``p^digits`` are independent over Q_p.

    A square minor is chosen by elimination and its exact determinant is
    checked to be nonzero modulo ``p^digits``, which is invariant under the
    unknown perturbation.
    """
    if digits <= 0:
        return False
    k = len(cols)
    n = len(cols[0]) if k else 0
    if k > n:
        return False
    if k == 0:
        return True
    mod = p ** digits
    A = [[int(cols[j][i]) % mod for j in range(k)] for i in range(n)]
    work = [row[:] for row in A]
    chosen = []
    used = set()
    for j in range(k):
        best = None
        for i in range(n):
            if i in used or work[i][j] == 0:
                continue
            v = vp(work[i][j], p)
            if best is None or v < best[0]:
                best = (v, i)
        if best is None:
            return False
        v, i = best
        used.add(i)
        chosen.append(i)
        u = pow(work[i][j] // p ** v, -1, mod)
        for r in range(n):
            if r != i and work[r][j]:
                t = work[r][j] // p ** v * u % mod
                work[r] = [(x - t * y) % mod for x, y in zip(work[r], work[i])]
    det = pari.matdet(pari.matrix(k, k, [A[i][j] for i in chosen for j in range(k)]))
    return int(det) % mod != 0


def solve_padic(M: Sequence[Sequence[int]], b: Sequence[int], p: int, N: int) -> tuple[list[Fraction], int]:
    """Solve ``M x = b`` over Q_p with data known modulo ``p^N``.

    ``M`` must have full column rank over Q_p.  Returns a rational solution
    with ``p``-power denominators and a conservative number of ``p``-adic
    digits to which it is determined.  Raises :class:`Inconsistent` if the
    surplus equations visibly fail.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    mod = p ** N
    A = [[int(M[i][j]) % mod for j in range(cols)] + [int(b[i]) % mod] for i in range(rows)]
    free_rows = list(range(rows))
    free_cols = list(range(cols))
    order = []            # (row, col, valuation)
    while free_cols:
        best = None
        for i in free_rows:
            for j in free_cols:
                if A[i][j]:
                    v = vp(A[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            raise PrecisionError("singular system at working precision")
        v, i, j = best
        free_rows.remove(i)
        free_cols.remove(j)
        order.append((i, j, v))
        u = pow(A[i][j] // p ** v, -1, mod)
        A[i] = [x * u % mod for x in A[i]]
        for r in free_rows:
            if A[r][j]:
                t = A[r][j] // p ** v
                A[r] = [(x - t * y) % mod for x, y in zip(A[r], A[i])]
    total = sum(v for _, _, v in order)
    prec = N - 2 * total
    if prec <= 0:
        raise PrecisionError("precision exhausted in linear solve")
    for r in free_rows:
        if A[r][cols] and vp(A[r][cols], p) < N - total:
            raise Inconsistent("surplus equations not satisfied")

    def bal(x):
        x %= mod
        return x - mod if x > mod // 2 else x

    x = [Fraction(0)] * cols
    for i, j, v in reversed(order):
        acc = Fraction(bal(A[i][cols]))
        for jj in range(cols):
            if jj != j and A[i][jj]:
                acc -= bal(A[i][jj]) * x[jj]
        x[j] = acc / p ** v
    return x, prec


def truncate(a: Fraction, p: int, k: int) -> Fraction:
    """Small representative of ``a`` modulo ``p^k Z_p``."""
    a = Fraction(a)
    s = max(0, -vp(a, p)) if a else 0
    num = a * p ** s
    m = p ** (k + s)
    r = num.numerator * pow(num.denominator, -1, m) % m
    if r > m // 2:
        r -= m
    return Fraction(r, p ** s)
