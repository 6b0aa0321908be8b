from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padicgal.errors import InputError, ResourceCapExceeded
from padicgal.padic import (LocalField, count_roots, disc_valuation, enumerate_extensions,
                            factor_degrees, factor_fields, factor_padic, is_eisenstein,
                            is_squarefree, is_subfield, monic_integral, newton_polygon,
                            ramification_data, ramification_polygon, vp)


def test_valuations():
    assert vp(12, 2) == 2
    assert vp(Fraction(3, 8), 2) == -3
    assert vp(0, 5) == float("inf")


@pytest.mark.parametrize("F,p,expected", [
    ([-2, 0, 1], 2, [(Fraction(-1, 2), 2)]),
    ([2, 1, 1], 2, [(Fraction(-1), 1), (Fraction(0), 1)]),
    ([-2, 0, 0, 1], 2, [(Fraction(-1, 3), 3)]),
])
def test_newton_polygon(F, p, expected):
    assert newton_polygon(F, p) == expected


def test_monic_integral_scales_roots():
    # roots of 2x^2 - 1 are 1/sqrt2; scaled they become sqrt2
    assert monic_integral([-1, 0, 2]) == [-2, 0, 1]
    # roots +-i/2 scaled by the denominator 4
    assert monic_integral([Fraction(1, 4), 0, 1]) == [4, 0, 1]


def test_squarefree():
    assert is_squarefree([-2, 0, 1])
    assert not is_squarefree([1, 2, 1])


@pytest.mark.parametrize("F,p,degs", [
    ([-1, 0, 1], 2, (1, 1)),
    ([1, 0, 1], 5, (1, 1)),
    ([-2, 0, 1], 2, (2,)),
    ([1, 1, 0, 0, 1], 2, (4,)),
    ([-2, 0, 0, 1], 7, (3,)),
    ([-2, 0, 0, 0, 1], 5, (4,)),
    ([-2, 0, 0, 0, 1], 3, (2, 2)),
])
def test_factor_degrees(F, p, degs):
    assert factor_degrees(F, p) == degs


def test_factor_rejects_non_squarefree():
    with pytest.raises(InputError):
        factor_padic([1, 2, 1], 2)


monic_polys = st.lists(st.integers(-20, 20), min_size=2, max_size=6).map(lambda c: c + [1])


@settings(max_examples=40)
@given(monic_polys, st.sampled_from([2, 3, 5]))
def test_factorization_is_stable_and_reconstructs(F, p):
    if not is_squarefree(F):
        return
    facs = factor_padic(F, p)
    assert sum(f.degree for f in facs) == len(F) - 1
    assert sorted(f.degree for f in factor_padic(F, p, 2 * facs[0].precision)) == \
        sorted(f.degree for f in facs)
    # the product agrees with F modulo p^N
    N = min(f.precision for f in facs)
    prod = [1]
    for f in facs:
        new = [0] * (len(prod) + f.degree)
        for i, a in enumerate(prod):
            for j, b in enumerate(f.coeffs):
                new[i + j] += a * b
        prod = new
    assert all((a - b) % p ** N == 0 for a, b in zip(prod, F))


def test_local_field_invariants():
    L = LocalField([-2, 0, 1], 2)
    assert (L.e, L.f, L.degree) == (2, 1, 2)
    U = LocalField([1, 1, 0, 0, 1], 2)
    assert (U.e, U.f) == (1, 4)
    with pytest.raises(InputError):
        LocalField([-1, 0, 1], 2)


@pytest.mark.parametrize("phi", [[2, 2, 0, 1], [2, 0, 0, 0, 1], [6, 4, 2, 0, 1], [-2, 0, 1]])
def test_eisenstein_generator_is_a_uniformiser(phi):
    assert is_eisenstein(phi, 2)
    L = LocalField(phi, 2)
    assert L.e == L.degree
    assert L.val(L.gen()) == 1


def test_roots_in():
    L = LocalField([-2, 0, 1], 2)
    assert count_roots([-2, 0, 1], L) == 2
    Q2 = LocalField([0, 1], 2)
    assert count_roots([-3, 0, 1], Q2) == 0
    assert count_roots([-17, 0, 1], Q2) == 2
    assert count_roots([5, 1], Q2) == 1
    assert count_roots([-2, 0, 0, 1], LocalField([-2, 0, 0, 1], 7)) == 3
    assert count_roots([-2, 0, 0, 1], LocalField([-2, 0, 0, 1], 2)) == 1


def test_is_subfield():
    quartic = LocalField([-2, 0, 0, 0, 1], 2)
    assert is_subfield([-2, 0, 1], quartic)
    assert not is_subfield([1, 1, 1], quartic)
    assert is_subfield([0, 1], quartic)
    # sqrt 6 does not lie in Q_2(sqrt 2)
    assert not is_subfield([-6, 0, 1], LocalField([-2, 0, 1], 2))


def _quadratic_count(p):
    # nontrivial square classes of Q_p
    return (8 if p == 2 else 4) - 1


@pytest.mark.parametrize("p,n,count", [(2, 2, _quadratic_count(2)), (3, 2, _quadratic_count(3)),
                                       (5, 2, _quadratic_count(5)), (2, 3, 2)])
def test_extension_counts(p, n, count):
    total = sum(len(enumerate_extensions(p, e, n // e)) for e in range(1, n + 1) if n % e == 0)
    assert total == count


def test_extension_enumeration_edges():
    assert enumerate_extensions(2, 1, 1) == [([0, 1], 1, 1)]
    with pytest.raises(ResourceCapExceeded):
        enumerate_extensions(2, 5, 1)


def test_extensions_have_the_requested_e_and_f():
    for poly, e, f in enumerate_extensions(2, 2, 1) + enumerate_extensions(2, 1, 2):
        L = LocalField(poly, 2)
        assert (L.e, L.f) == (e, f)


def test_ramification_polygon_and_data():
    assert ramification_polygon([2, 0, 0, 0, 1], 2) == [(1, 8), (2, 4), (4, 0)]
    rd = ramification_data(LocalField([2, 0, 0, 0, 1], 2))
    assert rd.segment_degrees == (2, 2) and rd.kinds == ("wild", "wild")
    assert ramification_data(LocalField([1, 1, 0, 0, 1], 2)).kinds == ("unramified",)
    assert ramification_data(LocalField([-2, 0, 0, 1], 2)).kinds == ("tame",)


@pytest.mark.parametrize("F,p", [([-2, 0, 0, 0, 1], 2), ([1, 1, 0, 0, 1], 2), ([-2, 0, 0, 1], 2),
                                 ([2, 2, 0, 0, 0, 0, 0, 0, 1], 2), ([-3, 0, 0, 0, 0, 0, 1], 3)])
def test_filtration_degrees_multiply_to_field_degree(F, p):
    rd = ramification_data(LocalField(F, p))
    prod = 1
    for d in rd.segment_degrees:
        prod *= d
    assert prod == len(F) - 1
    assert rd.e * rd.f == len(F) - 1


def test_factor_fields_define_the_same_fields():
    F = [-2, 0, 0, 0, 1]  # splits over Q_3 into two quadratics
    fields = factor_fields(F, 3)
    assert [len(g) - 1 for g in fields] == [2, 2]
    assert factor_fields([-1, 0, 1], 5) == [[0, 1], [0, 1]]
    assert factor_fields([2, 0, 0, 0, 1], 2) == [[2, 0, 0, 0, 1]]


def test_discriminant_valuation():
    assert disc_valuation([-2, 0, 1], 2) == 3
    assert disc_valuation([1, 1, 0, 0, 1], 2) == 0


def test_factor_fields_beyond_the_starting_precision():
    # discriminant valuation 90: fields need more than the initial 32 digits
    R = [40000, 0, 0, 0, -112, 0, 0, 0, 1]
    fields = factor_fields(R, 2)
    assert [len(g) - 1 for g in fields] == [8]
    assert count_roots(R, LocalField(fields[0], 2)) >= 1
