"""Conflict digraphs of iterated-solver outcomes and their colouring."""

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import networkx as nx

from sparseip.errors import DegreeContractViolated
from sparseip.instance import SparseIP

__all__ = ["ConflictDigraph", "color_digraph", "conflict_graph"]


@dataclass
class ConflictDigraph:
    """Digraph on the columns with x1_j = 1.

    There is an arc j -> j' when (i, j) is a special entry and A_ij' > 0 for some
    row i, with j != j'. Two columns without an arc in either direction never
    compete for the same row once special entries are ignored.

    Args:
        graph (nx.DiGraph): The underlying digraph; nodes are column indices.
    """

    graph: nx.DiGraph

    @classmethod
    def from_arcs(cls, nodes: Iterable[int], arcs: Iterable[Tuple[int, int]] = ()):
        graph = nx.DiGraph()
        graph.add_nodes_from(sorted(nodes))
        graph.add_edges_from(sorted(arcs))
        return cls(graph)

    @classmethod
    def from_outcome(cls, inst: SparseIP, outcome, max_indegree: Optional[int] = None):
        """Build the conflict digraph of an `IteratedOutcome`.

        Raises:
            DegreeContractViolated: If `max_indegree` is given and some node exceeds it.
        """
        nodes = [j for j, v in enumerate(outcome.x1) if v]
        members = set(nodes)
        arcs = set()
        for i, j in outcome.special:
            if j not in members:
                continue
            for other in inst.rows[i]:
                if other != j and other in members:
                    arcs.add((j, other))
        digraph = cls.from_arcs(nodes, arcs)
        if max_indegree is not None and digraph.max_indegree() > max_indegree:
            raise DegreeContractViolated(
                f"conflict digraph has indegree {digraph.max_indegree()} > {max_indegree}"
            )
        return digraph

    @property
    def nodes(self) -> Tuple[int, ...]:
        return tuple(self.graph.nodes)

    @property
    def arcs(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(sorted(self.graph.edges))

    def max_indegree(self) -> int:
        return max((deg for _, deg in self.graph.in_degree()), default=0)


def color_digraph(g: ConflictDigraph, d: int) -> Dict[int, int]:
    """Colour a digraph of maximum indegree `d` with colours 1..2d+1.

    Nodes are peeled one at a time, always the least node whose outdegree in the
    remaining graph is at most d (one exists since the average outdegree equals the
    average indegree). Re-inserting them in reverse order, each node has at most 2d
    coloured neighbours and takes the smallest colour none of them uses.

    Raises:
        DegreeContractViolated: If at some point no node can be peeled.
    """
    remaining = g.graph.copy()
    order = []
    while remaining.number_of_nodes():
        peelable = [n for n in remaining.nodes if remaining.out_degree(n) <= d]
        if not peelable:
            raise DegreeContractViolated(
                f"no node of outdegree <= {d} among {remaining.number_of_nodes()} nodes"
            )
        node = min(peelable)
        order.append(node)
        remaining.remove_node(node)

    coloring: Dict[int, int] = {}
    for node in reversed(order):
        neighbours = set(g.graph.predecessors(node)) | set(g.graph.successors(node))
        used = {coloring[u] for u in neighbours if u in coloring}
        color = next((c for c in range(1, 2 * d + 2) if c not in used), None)
        if color is None:
            raise DegreeContractViolated(f"node {node} has more than {2 * d} coloured neighbours")
        coloring[node] = color
    return coloring


def conflict_graph(g: ConflictDigraph) -> nx.Graph:
    """Undirected version of the conflict relation, on the same nodes."""
    graph = nx.Graph()
    graph.add_nodes_from(g.graph.nodes)
    graph.add_edges_from(g.graph.edges)
    return graph
