import pytest

from BisetSNDP.graph import Instance, NodeWeightedGraph, ProblemKind


def make_instance(n, edges, weights, demands, kind="ELEM", reliable=None, planar=True):
    reliable = [True] * n if reliable is None else reliable
    graph = NodeWeightedGraph(n, tuple(edges), tuple(weights), tuple(reliable))
    return Instance(graph, tuple(demands), ProblemKind(kind), planar)


SQUARE_EDGES = [(0, 1), (1, 2), (2, 3), (0, 3)]


@pytest.fixture
def square_ec():
    """4-cycle 0-1-2-3, terminals 0 and 2 need two edge-disjoint paths."""
    return make_instance(4, SQUARE_EDGES, [0, 1, 0, 1], [(0, 2, 2)], kind="EC")


@pytest.fixture
def square_elem():
    return make_instance(4, SQUARE_EDGES, [0, 1, 0, 1], [(0, 2, 2)], reliable=[True, False, True, False])


@pytest.fixture
def square_vc():
    return make_instance(
        4, SQUARE_EDGES, [0, 1, 0, 1], [(0, 2, 2)], kind="VC012", reliable=[True, False, True, False]
    )


@pytest.fixture
def path_elem():
    """0 - 1 - 2 with a non-reliable middle vertex."""
    return make_instance(3, [(0, 1), (1, 2)], [0, 5, 0], [(0, 2, 1)], reliable=[True, False, True])
