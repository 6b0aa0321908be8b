import pytest
from hypothesis import given, settings, strategies as st

from padicgal import perm as P
from padicgal.errors import InputError
from padicgal.stats import (count_classes, factor_degrees_preimages, format_value,
                            hasroot_preimages, maximal_preimages, naive_maximal_preimages,
                            parse_statistic, reduce_classes)

S3 = P.symmetric_group(3)
S4 = P.symmetric_group(4)
D4 = P.PermGroup.parse("4: (1 2 3 4) | (2 4)")
C4 = P.cyclic_group(4)
V4 = P.PermGroup.parse("4: (1 2)(3 4) | (1 3)(2 4)")


def stat(text):
    return parse_statistic(text)


def test_group_values():
    assert stat("FactorDegrees").eval_group(P.PermGroup.parse("5: (1 2)(3 4 5)")) == (3, 2)
    assert stat("HasRoot").eval_group(S3) is False
    assert stat("NumAuts").eval_group(D4) == 2
    assert [stat("NumAuts").eval_group(G) for G in (S4, C4, V4)] == [1, 4, 4]
    assert stat("Degree").eval_group(S4) == 4
    assert stat("NumRoots").eval_group(P.PermGroup.parse("4: (1 2)")) == 2


def test_aut_group_distinguishes_c4_from_v4():
    s = stat("AutGroup")
    assert not s.equivalent(s.eval_group(C4), s.eval_group(V4))
    assert s.equivalent(s.eval_group(C4), s.eval_group(C4.conjugate((1, 0, 2, 3))))


def test_polynomial_values():
    assert stat("FactorDegrees").eval_poly([-1, 0, 1], 2) == (1, 1)
    assert stat("HasRoot").eval_poly([-2, 0, 1], 2) is False
    assert stat("NumAuts").eval_poly([-2, 0, 0, 1], 2) == 1
    assert stat("NumAuts").eval_poly([-2, 0, 0, 1], 7) == 3
    assert stat("FactorDegrees").eval_poly([-2, -2, -1, 1, 1], 2) == (2, 2)
    # the unramified quartic has cyclic automorphism group
    s = stat("AutGroup")
    assert s.equivalent(s.eval_poly([1, 1, 0, 0, 1], 2), s.eval_group(C4))


def test_orders():
    fd = stat("FactorDegrees")
    assert fd.precedes((2, 1, 1), (2, 2))
    assert not fd.precedes((2, 2), (3, 1))
    hr = stat("HasRoot")
    assert hr.precedes(True, True) and hr.precedes(True, False)
    assert not hr.precedes(False, True)


@pytest.mark.parametrize("text", ["HasRoot", "NumRoots", "Degree", "FactorDegrees", "NumAuts",
                                  "AutGroup", "Factors[NumAuts]", "Tup[Degree,HasRoot]",
                                  "Factors[Tup[FactorDegrees,AutGroup]]"])
def test_parse_format_round_trip(text):
    assert stat(text).format() == text
    assert stat(text) == stat(stat(text).format())


@pytest.mark.parametrize("text", ["Foo", "Factors[", "Tup[]", "", "Factors[Degree,HasRoot]",
                                  "Degree]"])
def test_parse_errors(text):
    with pytest.raises(InputError):
        parse_statistic(text)


def test_formatted_values():
    assert format_value((3, 2)) == "{3,2}"
    assert format_value(False) == "false"
    assert format_value(stat("Factors[NumAuts]").eval_group(D4)) == "{4:2}"


def test_hasroot_preimages():
    got = hasroot_preimages(S3, True)
    assert len(got) == 1 and got[0].order() == 2
    assert hasroot_preimages(S3, False) == [S3]


def test_factor_degrees_preimage_of_s4():
    got = maximal_preimages(stat("FactorDegrees"), S4, (2, 2))
    assert len(got) == 1 and got[0].order() == 4 and got[0].orbit_sizes() == (2, 2)


def _same_classes(W, A, B):
    return len(A) == len(B) and all(any(W.is_conjugate(a, b) for b in B) for a in A)


GROUPS = [P.symmetric_group(d) for d in range(2, 6)] + [
    D4, C4, V4, P.alternating_group(4), P.affine_group(5),
    P.wreath_product([P.symmetric_group(2), P.symmetric_group(2)]),
    P.wreath_product([P.symmetric_group(3), P.symmetric_group(2)]),
    P.wreath_product([P.symmetric_group(2), P.symmetric_group(3)]),
    P.direct_product([P.symmetric_group(2), P.symmetric_group(3)]),
]


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.format())
def test_factor_degrees_preimages_match_naive(G):
    fd = stat("FactorDegrees")
    values = {fd.eval_group(H) for H in G.subgroup_classes()}
    for v in values:
        fast = factor_degrees_preimages(G, v)
        slow = naive_maximal_preimages(fd, G, v)
        assert _same_classes(G, fast, slow), v


@pytest.mark.parametrize("text", ["NumAuts", "AutGroup", "Factors[NumAuts]"])
def test_naive_preimages_are_maximal(text):
    s = stat(text)
    transitive_only = not text.startswith("Factors")
    subs = [H for H in S4.subgroup_classes() if H.is_transitive() or not transitive_only]
    vals = []
    for H in subs:
        val = s.eval_group(H)
        if count_classes(s, vals + [val]) > len(vals):
            vals.append(val)
    for v in vals:
        pre = maximal_preimages(s, S4, v)
        assert pre
        for H in pre:
            assert s.equivalent(s.eval_group(H), v)
        # nothing strictly above a preimage has the same value
        for K in subs:
            if s.equivalent(s.eval_group(K), v):
                assert any(S4.contained_up_to_conjugacy(K, H) for H in pre)


def test_reduce_classes_drops_contained_groups():
    C2 = P.PermGroup.parse("4: (1 2)")
    kept = reduce_classes(S4, [C2, D4, P.PermGroup.parse("4: (3 4)")])
    assert [H.order() for H in kept] == [8]


@settings(max_examples=30)
@given(st.lists(st.permutations(list(range(5))).map(tuple), min_size=1, max_size=2))
def test_subgroup_values_precede_group_values(gens):
    G = P.PermGroup(5, gens)
    for text in ("FactorDegrees", "HasRoot", "NumRoots"):
        s = stat(text)
        v = s.eval_group(G)
        for H in G.subgroup_classes():
            assert s.precedes(s.eval_group(H), v)
