import itertools
import random

import pytest

from BisetSNDP.biset import (
    Biset,
    build_laminar_forest,
    canonical_family,
    crosses,
    crossing_edges,
    delta_size,
    gamma,
    holders,
    in_P_elem,
    intersect,
    minimal_members,
    overlaps,
    owner,
    subset_of,
    subtract,
    uncross_witness_family,
    union,
)
from BisetSNDP.errors import InternalInvariantError, LaminarityError, PreconditionError
from BisetSNDP.graph import popcount
from BisetSNDP.oracle import check_function_property, enumerate_bisets


def B(inner, outer=None):
    return Biset.of(inner, inner if outer is None else outer)


def test_inner_must_lie_in_outer():
    with pytest.raises(ValueError):
        B([0, 1], [1])


def test_boundary_and_describe():
    b = B([0], [0, 2])
    assert b.boundary == 0b100
    assert b.describe() == "([0],[0,2])"
    assert b.size() == 3


def test_algebra():
    a, b = B([0], [0, 1]), B([1], [1, 2])
    assert a & b == B([], [1])
    assert a | b == B([0, 1], [0, 1, 2])
    assert a - b == B([0], [0])
    assert b - a == B([], [1, 2])
    assert intersect(a, b) == a & b
    assert union(a, b) == a | b
    assert subtract(b, a) == b - a


def test_subset_and_overlap():
    a, b = B([0], [0, 1]), B([1], [1, 2])
    assert overlaps(a, b)
    assert not overlaps(B([0]), B([2]))
    assert not overlaps(B([0]), B([0, 1]))
    assert subset_of(B([0]), B([0, 1]))
    assert not subset_of(B([0], [0, 1]), B([0]))


def test_crossing_and_gamma():
    edges = [(0, 1), (1, 2), (2, 3), (0, 3)]
    b = B([0], [0, 1])
    assert crosses((0, 3), b)
    assert not crosses((0, 1), b)
    assert crossing_edges(edges, b) == [(0, 3)]
    assert delta_size(edges, B([0])) == 2
    assert gamma(edges, B([0])) == 0b1010
    assert gamma(edges, b) == 0b1000


def test_P_elem_membership(square_elem):
    g = square_elem.graph
    assert in_P_elem(B([0], [0, 1]), g)
    assert not in_P_elem(B([1], [1, 2]), g)


def test_minimal_members_and_canonical_order():
    family = [B([0, 1]), B([2]), B([0]), B([0])]
    assert canonical_family(family) == [B([0]), B([0, 1]), B([2])]
    assert minimal_members(family) == [B([0]), B([2])]


def test_laminar_forest_structure():
    family = [B([0]), B([0, 1]), B([3])]
    forest = build_laminar_forest(family, 0b1111)
    root = forest.root
    assert root == B([0, 1, 2, 3])
    assert forest.parent[B([0])] == B([0, 1])
    assert forest.parent[B([0, 1])] == root
    assert forest.parent[B([3])] == root
    assert forest.children(root) == [B([0, 1]), B([3])]
    assert forest.is_leaf(B([0]))
    assert forest.depth(B([0])) == 2
    assert forest.degree(B([0, 1])) == 2
    assert forest.degree(root) == 2


def test_empty_family_is_a_lone_root():
    forest = build_laminar_forest([], 0b111)
    assert forest.nodes == []
    assert forest.all_nodes() == [B([0, 1, 2])]
    assert owner(forest, 1) == forest.root


def test_overlapping_family_rejected():
    a, b = B([0], [0, 1]), B([1], [1, 2])
    with pytest.raises(LaminarityError) as info:
        build_laminar_forest([a, b], 0b111)
    assert set(info.value.pair) == {a, b}


def test_owner_and_holders():
    forest = build_laminar_forest([B([0]), B([0, 1]), B([3])], 0b1111)
    assert owner(forest, 0) == B([0])
    assert owner(forest, 1) == B([0, 1])
    assert owner(forest, 2) == forest.root
    for u in range(4):
        assert holders(forest, u) == [owner(forest, u)]


# Second augmentation of 0 -> 3: H is the path 0-1-3, F adds the path 0-2-3.
H_EDGES = frozenset({(0, 1), (1, 3)})
F_EDGES = frozenset({(0, 2), (2, 3)})


def separates_once(b):
    return (
        bool(b.inner & 1)
        and not (b.outer >> 3) & 1
        and b.boundary == 0
        and delta_size(H_EDGES, b) == 1
    )


def test_uncrossing_makes_witnesses_laminar():
    witnesses = {(0, 2): B([0, 1]), (2, 3): B([0, 2])}
    assert overlaps(witnesses[(0, 2)], witnesses[(2, 3)])
    laminar = uncross_witness_family(F_EDGES, F_EDGES, witnesses, separates_once)
    assert laminar == {(0, 2): B([0]), (2, 3): B([0, 1, 2])}
    assert not overlaps(laminar[(0, 2)], laminar[(2, 3)])


def test_uncrossing_keeps_laminar_input():
    witnesses = {(0, 2): B([0]), (2, 3): B([0, 2])}
    assert uncross_witness_family(F_EDGES, F_EDGES, witnesses, separates_once) == witnesses


def test_single_witness_is_trivially_laminar():
    witnesses = {(0, 2): B([0, 1])}
    assert uncross_witness_family(F_EDGES, [(0, 2)], witnesses, separates_once) == witnesses


def test_uncrossing_rejects_non_witness():
    with pytest.raises(PreconditionError):
        uncross_witness_family(F_EDGES, F_EDGES, {(0, 2): B([0]), (2, 3): B([0])}, separates_once)
    with pytest.raises(PreconditionError):
        uncross_witness_family(F_EDGES, F_EDGES, {(0, 2): B([0])}, separates_once)


def test_uncrossing_stall_is_reported():
    # neither the meet/join pair nor the two differences are witnesses again
    edges = frozenset({(0, 1), (1, 2)})
    witnesses = {(0, 1): B([0]), (1, 2): B([1], [0, 1])}
    with pytest.raises(InternalInvariantError):
        uncross_witness_family(edges, edges, witnesses, lambda b: True)


def test_subset_is_a_partial_order():
    small = list(enumerate_bisets(0b111))
    for a, b, c in itertools.product(small, repeat=3):
        if subset_of(a, b) and subset_of(b, c):
            assert subset_of(a, c)
    every = list(enumerate_bisets(0b1111))
    for a in every:
        assert subset_of(a, a)
    for a, b in itertools.combinations(every, 2):
        assert not (subset_of(a, b) and subset_of(b, a))


def test_P_elem_closed_under_algebra(square_elem):
    g = square_elem.graph
    domain = list(enumerate_bisets(g.vertex_mask, restrict_P_elem=True, g=g))
    for a, b in itertools.product(domain, repeat=2):
        assert in_P_elem(a & b, g)
        assert in_P_elem(a | b, g)
        assert in_P_elem(a - b, g)


def test_boundary_size_is_bisubmodular():
    report = check_function_property("bisubmodular", lambda b: popcount(b.boundary), enumerate_bisets(0b1111))
    assert report.passed


@pytest.mark.parametrize("seed", range(5))
def test_cut_size_is_bisubmodular_for_any_edge_set(seed):
    rng = random.Random(seed)
    complete = list(itertools.combinations(range(4), 2))
    F = rng.sample(complete, rng.randint(1, len(complete)))
    report = check_function_property("bisubmodular", lambda b: delta_size(F, b), enumerate_bisets(0b1111))
    assert report.passed, F
