import itertools

import networkx as nx
import numpy as np
import pytest

from sparseip.errors import DegreeContractViolated
from sparseip.solvers.conflict import ConflictDigraph, color_digraph, conflict_graph


def _assert_proper(g, coloring, d):
    assert set(coloring) == set(g.nodes)
    assert all(1 <= c <= 2 * d + 1 for c in coloring.values())
    for u, v in g.arcs:
        assert coloring[u] != coloring[v]


def _complete_digraph(size):
    nodes = range(size)
    return ConflictDigraph.from_arcs(nodes, itertools.permutations(nodes, 2))


def test_empty_graph():
    assert color_digraph(ConflictDigraph.from_arcs([]), 1) == {}


def test_isolated_nodes_share_colour_one():
    g = ConflictDigraph.from_arcs([3, 1, 2])
    assert color_digraph(g, 0) == {1: 1, 2: 1, 3: 1}


@pytest.mark.parametrize("d", [1, 2, 3])
def test_complete_digraph_needs_all_colours(d):
    g = _complete_digraph(2 * d + 1)
    assert g.max_indegree() == 2 * d
    coloring = color_digraph(g, 2 * d)
    _assert_proper(g, coloring, 2 * d)
    assert len(set(coloring.values())) == 2 * d + 1


@pytest.mark.parametrize("d", [1, 2, 3])
def test_tournament_uses_exactly_2d_plus_1_colours(d):
    # regular tournament on 2d+1 nodes: i -> i+1..i+d (mod 2d+1), indegree d
    size = 2 * d + 1
    arcs = [(i, (i + s) % size) for i in range(size) for s in range(1, d + 1)]
    g = ConflictDigraph.from_arcs(range(size), arcs)
    assert g.max_indegree() == d
    coloring = color_digraph(g, d)
    _assert_proper(g, coloring, d)
    assert len(set(coloring.values())) == 2 * d + 1


def test_contract_violation():
    g = _complete_digraph(4)
    with pytest.raises(DegreeContractViolated):
        color_digraph(g, 1)


def _random_digraph(rng, size, d):
    g = nx.DiGraph()
    g.add_nodes_from(range(size))
    for v in range(size):
        indegree = int(rng.integers(0, d + 1))
        sources = [u for u in rng.permutation(size) if u != v][:indegree]
        g.add_edges_from((int(u), v) for u in sources)
    return ConflictDigraph(g)


@pytest.mark.parametrize("seed", range(40))
def test_random_digraphs(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 7))
    g = _random_digraph(rng, int(rng.integers(1, 31)), d)
    assert g.max_indegree() <= d
    coloring = color_digraph(g, d)
    _assert_proper(g, coloring, d)


@pytest.mark.slow
def test_thousand_random_digraphs():
    rng = np.random.default_rng(55)
    for _ in range(1000):
        d = int(rng.integers(1, 7))
        g = _random_digraph(rng, int(rng.integers(1, 31)), d)
        assert g.max_indegree() <= d
        _assert_proper(g, color_digraph(g, d), d)


def test_conflict_graph_is_undirected():
    g = ConflictDigraph.from_arcs([0, 1, 2], [(0, 1), (1, 0), (2, 1)])
    graph = conflict_graph(g)
    assert not graph.is_directed()
    assert sorted(map(sorted, graph.edges)) == [[0, 1], [1, 2]]
    assert g.arcs == ((0, 1), (1, 0), (2, 1))
