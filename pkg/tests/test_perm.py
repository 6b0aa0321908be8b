import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from padicgal import perm as P


def closure(d, gens):
    """All elements generated by ``gens``, by breadth-first multiplication."""
    seen = {P.identity(d)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = P.mul(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


perms5 = st.permutations(list(range(5))).map(tuple)


@given(perms5, perms5, perms5)
def test_multiplication_is_associative_with_inverses(a, b, c):
    assert P.mul(P.mul(a, b), c) == P.mul(a, P.mul(b, c))
    assert P.mul(a, P.inv(a)) == P.identity(5)
    assert P.conj(b, a) == P.mul(P.mul(a, b), P.inv(a))


def test_left_action_convention():
    g = P.from_cycles(3, [(0, 1)])
    h = P.from_cycles(3, [(1, 2)])
    assert P.mul(g, h) == (1, 2, 0)  # apply h first, then g


@given(perms5)
def test_format_parse_round_trip(g):
    assert P.parse_perm(P.format_perm(g), 5) == g
    G = P.PermGroup(5, [g])
    assert P.PermGroup.parse(G.format()).gens == G.gens


def test_text_format():
    G = P.PermGroup(4, [P.from_cycles(4, [(0, 1, 2, 3)]), P.from_cycles(4, [(0, 2)])])
    assert G.format() == "4: (1 2 3 4) | (1 3)"
    assert P.PermGroup.parse("4: (1 2 3 4) | (1 3)").order() == 8
    assert P.cycle_type(P.from_cycles(5, [(0, 1), (2, 3, 4)])) == (3, 2)


@settings(max_examples=40)
@given(st.lists(st.permutations(list(range(6))).map(tuple), min_size=1, max_size=3))
def test_order_and_membership_match_closure(gens):
    G = P.PermGroup(6, gens)
    elems = closure(6, gens)
    assert G.order() == len(elems)
    for g in itertools.islice(itertools.permutations(range(6)), 0, 720, 37):
        assert G.contains(g) == (g in elems)


@pytest.mark.parametrize("d,count", [(1, 1), (2, 2), (3, 4), (4, 11), (5, 19), (6, 56)])
def test_subgroup_class_counts_of_symmetric_groups(d, count):
    assert len(P.symmetric_group(d).subgroup_classes()) == count


def test_subgroup_classes_of_cyclic_and_dihedral():
    assert sorted(H.order() for H in P.cyclic_group(12).subgroup_classes()) == [1, 2, 3, 4, 6, 12]
    D4 = P.PermGroup.parse("4: (1 2 3 4) | (1 3)")
    assert len(D4.subgroup_classes()) == 8


def test_maximal_subgroups_of_s4():
    orders = sorted(H.order() for H in P.symmetric_group(4).maximal_subgroups())
    assert orders == [6, 8, 12]


def test_constructors():
    assert P.symmetric_group(5).order() == 120
    assert P.alternating_group(5).order() == 60
    assert P.affine_group(7).order() == 42
    S2 = P.symmetric_group(2)
    assert P.wreath_product([S2, S2, S2]).order() == 128
    assert P.wreath_product([S2, S2, S2]).order() == P.wreath_order([S2, S2, S2])
    C3 = P.cyclic_group(3)
    W = P.wreath_product([C3, S2])  # S2 inside C3
    assert W.degree == 6 and W.order() == 24
    assert P.direct_product([S2, P.symmetric_group(3)]).orbit_sizes() == (3, 2)


def test_wreath_block_structure():
    S2, S3 = P.symmetric_group(2), P.symmetric_group(3)
    W = P.wreath_product([S3, S2])  # three blocks of size two
    blocks = [{0, 1}, {2, 3}, {4, 5}]
    for g in W.gens:
        assert all({g[x] for x in b} in blocks for b in blocks)


def test_conjugacy_and_normalizer():
    S4 = P.symmetric_group(4)
    V1 = P.PermGroup.parse("4: (1 2)(3 4) | (1 3)(2 4)")
    C = P.PermGroup.parse("4: (1 2)")
    C2 = P.PermGroup.parse("4: (3 4)")
    D = P.PermGroup.parse("4: (1 2)(3 4)")
    assert S4.is_conjugate(C, C2)
    assert not S4.is_conjugate(C, D)
    w = S4.conjugator(C, C2)
    assert C.conjugate(w) == C2
    assert S4.normalizer(V1).order() == 24
    assert S4.normalizer(C).order() == 4
    assert S4.contained_up_to_conjugacy(C2, V1.intersection(S4)) is False
    assert S4.contained_up_to_conjugacy(D, V1)


def test_stabilizers():
    S5 = P.symmetric_group(5)
    assert S5.stabilizer(0).order() == 24
    assert S5.set_stabilizer([0, 1]).order() == 12
    assert S5.partition_stabilizer([(0, 1), (2, 3, 4)]).order() == 12
    # blocks are fixed setwise, never swapped
    assert S5.partition_stabilizer([(0, 1), (2, 3), (4,)]).order() == 4


def test_coset_action():
    S4 = P.symmetric_group(4)
    U = S4.stabilizer(3)
    act = S4.coset_action(U)
    assert act.degree == 4
    assert U.contains(act.reps()[0])  # coset 0 is U itself
    img = act.group(S4)
    assert img.order() == 24 and img.is_transitive()
    V = P.PermGroup.parse("4: (1 2)(3 4) | (1 3)(2 4)")
    assert act.group(V).orbit_sizes() == (4,)


def test_double_cosets():
    S4 = P.symmetric_group(4)
    H = S4.stabilizer(0)
    reps = S4.double_coset_reps(H, H)
    assert len(reps) == 2
    assert H.contains(reps[0])  # the trivial double coset comes first


def test_blocks_and_primitivity():
    D4 = P.PermGroup.parse("4: (1 2 3 4) | (1 3)")
    assert not D4.is_primitive()
    assert sorted(map(sorted, D4.block_system())) == [[0, 2], [1, 3]]
    assert P.symmetric_group(5).is_primitive()
    assert P.cyclic_group(5).is_primitive()


def test_solvability():
    assert P.symmetric_group(4).is_solvable()
    assert not P.symmetric_group(5).is_solvable()
    assert P.symmetric_group(5).derived_subgroup().order() == 60
    assert P.symmetric_group(5).perfect_residuum().order() == 60


@pytest.mark.parametrize("text", ["4: (1 2 3 4) | (1 3)", "6: (1 2 3 4 5 6) | (1 4)",
                                  "6: (1 2)(3 4)(5 6) | (1 3 5)(2 4 6)", "8: (1 2 3 4 5 6 7 8)"])
def test_wreath_embedding_contains_group(text):
    G = P.PermGroup.parse(text)
    s, tops = P.embed_wreath(G)
    W = P.wreath_product(tops)
    assert P.relabel(G, s).is_subgroup_of(W)
    assert math.prod(T.degree for T in tops) == G.degree
    assert all(T.is_primitive() for T in tops)


def test_direct_product_embedding():
    G = P.PermGroup.parse("5: (1 3)(2 4 5)")
    s, fac = P.embed_direct_product(G)
    assert [F.degree for F in fac] == [3, 2]
    assert P.relabel(G, s).is_subgroup_of(P.direct_product(fac))


def test_invalid_generators_rejected():
    with pytest.raises(ValueError):
        P.PermGroup(3, [(0, 0, 1)])
