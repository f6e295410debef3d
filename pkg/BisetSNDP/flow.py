"""
Unit-capacity max-flow over a vertex-split network.

Vertex v becomes an in-copy 2v and an out-copy 2v+1. Split vertices get a
unit in->out arc; every other vertex gets an arc no cut can afford. Each
undirected edge uv gives the two unit arcs u_out->v_in and v_out->u_in, so
an s-t cut in the network is a biset: edges leaving the source side plus
split vertices whose in-copy is on the source side and whose out-copy is not.
"""

import logging
from collections import deque
from typing import Dict, Iterable, List, Optional, Tuple

from .biset import Biset
from .errors import ContractError
from .graph import Edge, NodeWeightedGraph, ProblemKind

logger = logging.getLogger(__name__)

_flow_runs = 0


def flow_runs() -> int:
    """Number of max-flow computations started in this process."""
    return _flow_runs


def _node_in(v: int) -> int:
    return 2 * v


def _node_out(v: int) -> int:
    return 2 * v + 1


class SplitNetwork:
    def __init__(self, n: int, edges: Iterable[Edge], split_mask: int):
        self.n = n
        self.edges = sorted(edges)
        self.split_mask = split_mask
        self.infinite = len(self.edges) + 1
        # residual[a][b] is the remaining capacity of arc a->b
        self.residual: List[Dict[int, int]] = [dict() for _ in range(2 * n)]
        for v in range(n):
            cap = 1 if (split_mask >> v) & 1 else self.infinite
            self._add_arc(_node_in(v), _node_out(v), cap)
        for u, v in self.edges:
            self._add_arc(_node_out(u), _node_in(v), 1)
            self._add_arc(_node_out(v), _node_in(u), 1)
        self.value = 0

    def _add_arc(self, a: int, b: int, cap: int):
        self.residual[a][b] = self.residual[a].get(b, 0) + cap
        self.residual[b].setdefault(a, 0)

    def _bfs(self, source: int, sink: int) -> Optional[List[int]]:
        parent = [-1] * len(self.residual)
        visited = [False] * len(self.residual)
        visited[source] = True
        queue = deque([source])
        while queue:
            a = queue.popleft()
            for b, cap in self.residual[a].items():
                if cap > 0 and not visited[b]:
                    visited[b] = True
                    parent[b] = a
                    if b == sink:
                        return parent
                    queue.append(b)
        return None

    def max_flow(self, s: int, t: int, limit: Optional[int] = None) -> int:
        """Augment from s_out to t_in; stop early once the value reaches limit."""
        global _flow_runs
        _flow_runs += 1
        source, sink = _node_out(s), _node_in(t)
        while limit is None or self.value < limit:
            parent = self._bfs(source, sink)
            if parent is None:
                break
            path_flow = self.infinite
            b = sink
            while b != source:
                path_flow = min(path_flow, self.residual[parent[b]][b])
                b = parent[b]
            b = sink
            while b != source:
                a = parent[b]
                self.residual[a][b] -= path_flow
                self.residual[b][a] += path_flow
                b = a
            self.value += path_flow
        return self.value

    def reachable(self, s: int) -> List[bool]:
        seen = [False] * len(self.residual)
        source = _node_out(s)
        seen[source] = True
        queue = deque([source])
        while queue:
            a = queue.popleft()
            for b, cap in self.residual[a].items():
                if cap > 0 and not seen[b]:
                    seen[b] = True
                    queue.append(b)
        return seen

    def source_side_biset(self, s: int) -> Biset:
        """Biset of the residual-reachable side; call after a full max_flow."""
        seen = self.reachable(s)
        inner = 1 << s
        outer = 1 << s
        for v in range(self.n):
            if seen[_node_out(v)]:
                inner |= 1 << v
                outer |= 1 << v
            elif seen[_node_in(v)]:
                outer |= 1 << v
        return Biset(inner, outer)


def _check_pair(g: NodeWeightedGraph, s: int, t: int):
    if s == t:
        raise ContractError(f"source and sink coincide: {s}")
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise ContractError(f"pair ({s},{t}) outside 0..{g.n - 1}")


def _elem_network(edges: Iterable[Edge], g: NodeWeightedGraph, s: int, t: int) -> SplitNetwork:
    _check_pair(g, s, t)
    if not (g.reliable[s] and g.reliable[t]):
        raise ContractError(f"element connectivity needs reliable endpoints, got ({s},{t})")
    return SplitNetwork(g.n, edges, g.vertex_mask & ~g.reliable_mask)


def _edge_network(edges: Iterable[Edge], g: NodeWeightedGraph, s: int, t: int) -> SplitNetwork:
    _check_pair(g, s, t)
    return SplitNetwork(g.n, edges, 0)


def _vertex_network(edges: Iterable[Edge], g: NodeWeightedGraph, s: int, t: int) -> SplitNetwork:
    _check_pair(g, s, t)
    return SplitNetwork(g.n, edges, g.vertex_mask & ~((1 << s) | (1 << t)))


def element_connectivity(
    edges: Iterable[Edge], g: NodeWeightedGraph, s: int, t: int, limit: Optional[int] = None
) -> int:
    """Maximum number of element-disjoint s-t paths using only the given edges."""
    return _elem_network(edges, g, s, t).max_flow(s, t, limit)


def min_cut_biset_closest_to_source(edges: Iterable[Edge], g: NodeWeightedGraph, s: int, t: int) -> Biset:
    network = _elem_network(edges, g, s, t)
    network.max_flow(s, t)
    cut = network.source_side_biset(s)
    logger.debug("closest element cut for (%d,%d): %s value=%d", s, t, cut.describe(), network.value)
    return cut


def pair_vertex_connectivity_at_most_2(edges: Iterable[Edge], g: NodeWeightedGraph, s: int, t: int) -> int:
    """min(2, internally vertex-disjoint s-t paths); an st edge counts as one path."""
    return _vertex_network(edges, g, s, t).max_flow(s, t, limit=2)


def vertex_cut_biset_closest_to_source(edges: Iterable[Edge], g: NodeWeightedGraph, s: int, t: int) -> Biset:
    network = _vertex_network(edges, g, s, t)
    network.max_flow(s, t)
    cut = network.source_side_biset(s)
    logger.debug("closest vertex cut for (%d,%d): %s value=%d", s, t, cut.describe(), network.value)
    return cut


def _network_for(kind: ProblemKind, edges: Iterable[Edge], g: NodeWeightedGraph, s: int, t: int) -> SplitNetwork:
    if kind is ProblemKind.VC012:
        return _vertex_network(edges, g, s, t)
    if kind is ProblemKind.EC:
        return _edge_network(edges, g, s, t)
    return _elem_network(edges, g, s, t)


def pair_connectivity(
    kind: ProblemKind, edges: Iterable[Edge], g: NodeWeightedGraph, s: int, t: int, limit: Optional[int] = None
) -> int:
    """Connectivity of the pair in the sense of the problem kind (VC012 values stop at 2)."""
    if kind is ProblemKind.VC012:
        limit = 2 if limit is None else min(limit, 2)
    return _network_for(kind, edges, g, s, t).max_flow(s, t, limit)


def pair_cut(kind: ProblemKind, edges: Iterable[Edge], g: NodeWeightedGraph, s: int, t: int) -> Tuple[int, Biset]:
    """Connectivity value together with the closest cut biset on the s side."""
    network = _network_for(kind, edges, g, s, t)
    network.max_flow(s, t)
    return network.value, network.source_side_biset(s)
