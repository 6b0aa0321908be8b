import math

import pytest

from oracles import brute_subgroup_partitions
from padicgal import perm as P
from padicgal.choice import (Chooser, _tranche_from_lattice, _tranche_from_partitions, divisors,
                             orbit_partition, parse_chooser, subgroup_partitions, tranches, vp_int)
from padicgal.errors import InputError
from padicgal.model import shape_group

C2 = ("group", P.cyclic_group(2))
S2 = ("sym", 2)
SHAPES = {
    "S3": ("sym", 3), "S4": ("sym", 4), "S5": ("sym", 5),
    "S2xS3": ("direct", [S2, ("sym", 3)]),
    "S2wrS2": ("wreath", [S2, S2]),
    "C2wrC2wrC2": ("wreath", [C2, C2, C2]),
}


def test_chooser_parsing():
    assert parse_chooser("All") == Chooser("All")
    assert parse_chooser("Index") == Chooser("Index")
    assert parse_chooser("OrbitIndex") == Chooser("OrbitIndex", 1)
    assert parse_chooser("OrbitIndex[val<=2]").max_val == 2
    assert parse_chooser("OrbitIndex[val<=inf]").max_val is None
    for text in ("All", "Index", "OrbitIndex[val<=0]", "OrbitIndex[val<=inf]"):
        assert parse_chooser(text).format() == text
    with pytest.raises(InputError):
        parse_chooser("Orbit")


def test_arithmetic_helpers():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert vp_int(24, 2) == 3 and vp_int(7, 2) == 0


@pytest.mark.parametrize("name", list(SHAPES))
def test_subgroup_partitions_match_brute_force(name):
    sh = SHAPES[name]
    W = shape_group(sh)
    expected = brute_subgroup_partitions(W)
    got = [X for m in divisors(W.order()) for X in subgroup_partitions(sh, m)]
    assert len(got) == len(expected)
    for X in got:
        S = W.partition_stabilizer(X.blocks)
        assert X.index == W.order() // S.order()
        match = [Y for Y in expected
                 if sorted(map(len, Y)) == sorted(map(len, X.blocks))
                 and W.is_conjugate(W.partition_stabilizer(Y), S)]
        assert len(match) == 1 and expected[match[0]] == X.index


@pytest.mark.parametrize("d", range(1, 6))
def test_symmetric_partition_index_formula(d):
    for m in divisors(math.factorial(d)):
        for X in subgroup_partitions(("sym", d), m):
            assert m == math.factorial(d) // math.prod(math.factorial(len(b)) for b in X.blocks)


@pytest.mark.parametrize("name", ["S4", "S2wrS2", "C2wrC2wrC2", "S5"])
def test_tranche_paths_agree(name):
    sh = SHAPES.get(name, ("sym", 5))
    W = shape_group(sh)
    for n in divisors(W.order()):
        for r in divisors(n):
            a = _tranche_from_lattice(W, n, r)
            b = _tranche_from_partitions(W, sh, n, r)
            assert len(a) == len(b)
            assert all(any(W.is_conjugate(U, V) for V in b) for U in a)


def test_orbit_index_tranches_cover_the_lattice():
    sh = SHAPES["S4"]
    W = shape_group(sh)
    seen = [U for t in tranches(W, sh, Chooser("OrbitIndex", None), 2) for U in t.groups]
    assert len(seen) == len(W.subgroup_classes())
    for U in seen:
        assert orbit_partition(U) == tuple(sorted(tuple(sorted(o)) for o in U.orbits()))


def test_valuation_filter_drops_tranches():
    sh = SHAPES["S4"]
    W = shape_group(sh)
    unfiltered = [t.descriptor for t in tranches(W, sh, Chooser("OrbitIndex", None), 2)]
    filtered = [t.descriptor for t in tranches(W, sh, Chooser("OrbitIndex", 1), 2)]
    assert ("orbit-index", 8, 8) in unfiltered and ("orbit-index", 8, 8) not in filtered
    assert all(vp_int(r, 2) <= 1 for _, n, r in filtered)
