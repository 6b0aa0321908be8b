"""Relative invariants, Tschirnhaus transformations and resolvents.

An invariant is the orbit sum of a monomial under ``U``; it is accepted
only if no coset representative of ``U`` in ``W`` fixes it.  Monomials are
tried in order of total degree; the fallback ``x_1 x_2^2 .. x_{d-1}^{d-1}``
has trivial stabiliser in ``S_d`` and so always works.

Resolvents are evaluated in fixed-point Gaussian-integer arithmetic: each
complex number is a pair of Python integers scaled by ``2^bits``.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Sequence

import mpmath

from . import perm as P
from ._pari import pari
from .errors import GaloisError, PrecisionError
from .padic import to_pol

ROUNDING_MARGIN = mpmath.mpf(10) ** -10
GUARD_DIGITS = 20
TSCHIRNHAUS_RETRIES = 12
ORBIT_CAP = 60000
CANDIDATE_CAP = 600


class NotSquarefree(GaloisError):
    pass


# ---------------------------------------------------------------- invariants

@dataclass(frozen=True)
class Invariant:
    """``sum_k c_k x^{m_k}``; coefficients default to 1."""
    degree: int                     # number of variables
    monomials: tuple                # exponent tuples
    path: str = "orbit-sum"
    coefficients: tuple | None = None

    def terms(self):
        cs = self.coefficients or (1,) * len(self.monomials)
        return zip(self.monomials, cs)

    @property
    def total_degree(self) -> int:
        return max((sum(m) for m in self.monomials), default=0)

    def act(self, w: Sequence[int]) -> frozenset:
        return frozenset((_act(w, m), c) for m, c in self.terms())

    def format(self) -> str:
        def mono(m):
            parts = [f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e]
            return "*".join(parts) or "1"
        shown = " + ".join(mono(m) for m in self.monomials[:4])
        more = len(self.monomials) - 4
        return shown + (f" + ... ({more} more)" if more > 0 else "")


def _act(w: Sequence[int], m: tuple) -> tuple:
    # x_i -> x_{w(i)}: the exponent at position i moves to w(i)
    out = [0] * len(m)
    for i, e in enumerate(m):
        if e:
            out[w[i]] = e
    return tuple(out)


def _orbit(U: P.PermGroup, m: tuple, cap: int) -> list[tuple] | None:
    seen = {m}
    frontier = [m]
    while frontier:
        nxt = []
        for x in frontier:
            for g in U.gens:
                y = _act(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        return None
        frontier = nxt
    return sorted(seen)


def _patterns(d: int, max_total: int):
    """Exponent patterns (non-increasing) by total degree then length."""
    out = []
    for t in range(1, max_total + 1):
        pats = []

        def rec(rem, mx, acc):
            if rem == 0:
                pats.append(tuple(acc))
                return
            if len(acc) == d:
                return
            for x in range(min(rem, mx), 0, -1):
                rec(rem - x, x, acc + [x])
        rec(t, t, [])
        out.extend(sorted(pats, key=len))
    return out


def _candidate_monomials(d: int):
    for pat in _patterns(d, max(2, min(d * (d - 1) // 2, 8))):
        k = len(pat)
        for vars_ in itertools.permutations(range(d), k):
            m = [0] * d
            for v, e in zip(vars_, pat):
                m[v] = e
            yield tuple(m)


def _fixes(w, orb: list, orbset: set) -> bool:
    if _act(w, orb[0]) not in orbset:
        return False
    return all(_act(w, x) in orbset for x in orb)


def primitive_invariant(W: P.PermGroup, U: P.PermGroup, reps: Sequence | None = None) -> Invariant:
    """A ``U``-invariant whose stabiliser in ``W`` is exactly ``U``."""
    d = W.degree
    if U.order() == W.order():
        return Invariant(d, tuple(tuple(int(i == j) for i in range(d)) for j in range(d)), "symmetric")
    if reps is None:
        reps = W.coset_action(U).reps()
    movers = reps[1:]
    tried = set()
    count = 0
    for m in _candidate_monomials(d):
        if count >= CANDIDATE_CAP:
            break
        if m in tried:
            continue
        orb = _orbit(U, m, ORBIT_CAP)
        if orb is None:
            continue
        tried.update(orb)
        count += 1
        orbset = set(orb)
        if not any(_fixes(w, orb, orbset) for w in movers):
            return Invariant(d, tuple(orb), "orbit-sum")
    m = tuple(range(d))
    orb = _orbit(U, m, 10 ** 9)
    return Invariant(d, tuple(orb), "fallback")


def invariant_stabilizer_ok(W: P.PermGroup, U: P.PermGroup, I: Invariant) -> bool:
    """Brute-force check ``Stab_W(I) = U`` (small groups only)."""
    base = I.act(tuple(range(I.degree)))
    stab = [g for g in W.elements() if I.act(g) == base]
    return len(stab) == U.order() and all(U.contains(g) for g in stab)


# ------------------------------------------------------------- Tschirnhaus

@dataclass(frozen=True)
class Tschirnhaus:
    coeffs: tuple          # ascending integer coefficients
    counter: int = 0

    def apply(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc


def next_tschirnhaus(counter: int, d: int, seed: int = 0) -> Tschirnhaus:
    """Deterministic sequence; counter 0 is the identity ``T(x) = x``."""
    if counter == 0:
        return Tschirnhaus((0, 1), 0)
    rng = random.Random(seed * 1_000_003 + counter)
    deg = max(1, min(counter + 1, max(d - 1, 1)))
    bound = counter + 1
    while True:
        cs = [rng.randint(-bound, bound) for _ in range(deg)] + [rng.choice([1, -1]) * rng.randint(1, bound)]
        if cs[1:] != [1] + [0] * (deg - 1) and any(cs[1:]):
            return Tschirnhaus(tuple(cs), counter)


# --------------------------------------------------------------- resolvent

@dataclass
class Resolvent:
    coeffs: list[int]              # ascending, monic
    U: P.PermGroup
    invariant: Invariant
    tschirnhaus: Tschirnhaus
    digits: int
    max_error: float = 0.0         # largest distance of a coefficient from its integer

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def _fixed(z, bits: int) -> tuple[int, int]:
    s = mpmath.mpf(2) ** bits
    return int(mpmath.nint(z.real * s)), int(mpmath.nint(z.imag * s))


def _cmul(a, b, bits):
    return ((a[0] * b[0] - a[1] * b[1]) >> bits, (a[0] * b[1] + a[1] * b[0]) >> bits)


def _eval_invariant(I: Invariant, w: Sequence[int], powers, bits) -> tuple[int, int]:
    """``I(alpha_{w(1)}, .., alpha_{w(d)})`` from precomputed fixed-point powers."""
    re = im = 0
    for m, c in I.terms():
        acc = None
        for i, e in enumerate(m):
            if e:
                v = powers[w[i]][e]
                acc = v if acc is None else _cmul(acc, v, bits)
        if acc is None:
            acc = (1 << bits, 0)
        re += c * acc[0]
        im += c * acc[1]
    return re, im


def required_digits(bound: float, I: Invariant, index: int) -> int:
    M = sum(abs(c) for _, c in I.terms()) * max(bound, 1.0) ** max(I.total_degree, 1)
    return int(index * math.log10(1 + M)) + GUARD_DIGITS + 10


def estimate_digits(model, I: Invariant, T: Tschirnhaus, index: int) -> int:
    """Digits needed to round a resolvent of the given index exactly."""
    with mpmath.workdps(30):
        vals = [T.apply(v) for v in model.root_values(30)]
        bound = float(max(abs(v) for v in vals)) * 1.1
    return required_digits(bound, I, index)


def evaluate_resolvent(model, U: P.PermGroup, I: Invariant, T: Tschirnhaus,
                       reps: Sequence | None = None, digits: int | None = None) -> Resolvent:
    """Resolvent of ``I`` relative to ``W/U`` at the model's roots after ``T``."""
    W = model.W
    if reps is None:
        reps = W.coset_action(U).reps()
    if digits is None:
        digits = estimate_digits(model, I, T, len(reps))
    bits = int(digits * 3.33) + 64
    with mpmath.workdps(digits + 20):
        vals = [T.apply(v) for v in model.root_values(digits + 20)]
        maxe = max((max(mm) for mm in I.monomials), default=1)
        powers = []
        for v in vals:
            row = [None, _fixed(v, bits)]
            for _ in range(2, maxe + 1):
                row.append(_cmul(row[-1], row[1], bits))
            powers.append(row)
    betas = [_eval_invariant(I, w, powers, bits) for w in reps]
    # expand prod (t - beta), ascending coefficients
    poly = [(1 << bits, 0)]
    for b in betas:
        new = [(0, 0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = (new[i + 1][0] + c[0], new[i + 1][1] + c[1])
            bc = _cmul(c, b, bits)
            new[i] = (new[i][0] - bc[0], new[i][1] - bc[1])
        poly = new
    one = 1 << bits
    margin = one >> 34          # about 10^-10
    coeffs = []
    worst = 0
    for re, im in poly:
        r = (re + (one >> 1)) >> bits
        err = max(abs(re - r * one), abs(im))
        if err > margin:
            raise PrecisionError("resolvent coefficient not within rounding margin")
        worst = max(worst, err)
        coeffs.append(int(r))
    return Resolvent(coeffs, U, I, T, digits, float(Fraction(worst, one)))


def is_squarefree_int(coeffs: Sequence[int]) -> bool:
    return bool(pari.issquarefree(to_pol(coeffs)))


def resolvent(model, U: P.PermGroup, I: Invariant | None = None, seed: int = 0,
              reps: Sequence | None = None, start_counter: int = 0,
              scale: float = 1.0) -> Resolvent:
    """A squarefree resolvent, retrying Tschirnhaus transformations and precision.

    ``scale`` multiplies the estimated working precision.
    """
    W = model.W
    if reps is None:
        reps = W.coset_action(U).reps()
    if I is None:
        I = primitive_invariant(W, U, reps)
    for counter in range(start_counter, start_counter + TSCHIRNHAUS_RETRIES):
        T = next_tschirnhaus(counter, W.degree, seed)
        digits = math.ceil(scale * estimate_digits(model, I, T, len(reps)))
        for _ in range(6):
            try:
                R = evaluate_resolvent(model, U, I, T, reps, digits)
                break
            except PrecisionError:
                digits *= 2
        else:
            raise PrecisionError("resolvent did not round")
        if is_squarefree_int(R.coeffs):
            return R
    raise NotSquarefree("no squarefree resolvent after Tschirnhaus retries")
