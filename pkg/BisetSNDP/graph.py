"""
Node-weighted graphs, network design instances, preprocessing and JSON I/O.

Vertex sets are carried as int bitmasks throughout the package (bit v set
means vertex v is a member); Python ints are unbounded so one representation
serves every graph size.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, TextIO, Tuple, Union

from .errors import (
    DanglingDemandError,
    DuplicateEdgeError,
    InvalidInstanceError,
    SchemaError,
    UnreliableDemandError,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
EdgeSet = FrozenSet[Edge]
Demand = Tuple[int, int, int]
VertexSet = Union[int, Iterable[int]]


def as_mask(vertices: VertexSet) -> int:
    """Accept a bitmask or any iterable of vertex ids."""
    if isinstance(vertices, int):
        return vertices
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def members(mask: int) -> List[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def canonical_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class ProblemKind(str, Enum):
    EC = "EC"
    ELEM = "ELEM"
    VC012 = "VC012"


@dataclass(frozen=True)
class NodeWeightedGraph:
    n: int
    edges: Tuple[Edge, ...]
    weights: Tuple[int, ...]
    reliable: Tuple[bool, ...]

    def __post_init__(self):
        if len(self.weights) != self.n or len(self.reliable) != self.n:
            raise SchemaError(
                f"expected {self.n} weights and reliable flags, got {len(self.weights)} and {len(self.reliable)}"
            )
        for v, w in enumerate(self.weights):
            if isinstance(w, bool) or not isinstance(w, int) or w < 0:
                raise SchemaError(f"weight of vertex {v} must be a nonnegative integer, got {w!r}")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise SchemaError(f"edge ({u},{v}) has an endpoint outside 0..{self.n - 1}")
            if u == v:
                raise InvalidInstanceError(f"self-loop at vertex {u}")
            e = canonical_edge(u, v)
            if e in seen:
                raise DuplicateEdgeError(f"duplicate edge ({e[0]},{e[1]})")
            seen.add(e)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "reliable", tuple(bool(r) for r in self.reliable))

    @cached_property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def reliable_mask(self) -> int:
        return as_mask(v for v in range(self.n) if self.reliable[v])

    @cached_property
    def zero_weight_mask(self) -> int:
        return as_mask(v for v in range(self.n) if self.weights[v] == 0)

    @cached_property
    def edge_set(self) -> EdgeSet:
        return frozenset(self.edges)

    @cached_property
    def adjacency(self) -> Tuple[int, ...]:
        adj = [0] * self.n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return tuple(adj)

    def weight_of(self, vertices: VertexSet) -> int:
        return sum(self.weights[v] for v in members(as_mask(vertices)))


@dataclass(frozen=True)
class Instance:
    graph: NodeWeightedGraph
    demands: Tuple[Demand, ...]
    kind: ProblemKind
    planar: bool = False

    def __post_init__(self):
        g = self.graph
        kind = ProblemKind(self.kind)
        object.__setattr__(self, "kind", kind)
        pairs = {}
        for u, v, r in self.demands:
            if not (0 <= u < g.n and 0 <= v < g.n):
                raise DanglingDemandError(f"demand ({u},{v}) references a vertex outside 0..{g.n - 1}")
            if u == v:
                raise SchemaError(f"demand ({u},{v}) joins a vertex to itself")
            if isinstance(r, bool) or not isinstance(r, int) or r < 1:
                raise SchemaError(f"demand ({u},{v}) must be a positive integer, got {r!r}")
            pair = canonical_edge(u, v)
            if pair in pairs:
                raise InvalidInstanceError(f"duplicate demand ({pair[0]},{pair[1]})")
            if kind is not ProblemKind.EC and not (g.reliable[u] and g.reliable[v]):
                raise UnreliableDemandError(f"demand endpoint not reliable: ({pair[0]},{pair[1]})")
            if kind is ProblemKind.VC012 and r > 2:
                raise SchemaError(f"VC012 demand ({pair[0]},{pair[1]}) must be 1 or 2, got {r}")
            pairs[pair] = r
        object.__setattr__(self, "demands", tuple((u, v, r) for (u, v), r in sorted(pairs.items())))

    @property
    def k(self) -> int:
        return max((r for _, _, r in self.demands), default=0)

    @cached_property
    def terminal_mask(self) -> int:
        mask = 0
        for u, v, _ in self.demands:
            mask |= (1 << u) | (1 << v)
        return mask

    def requirement(self, u: int, v: int) -> int:
        pair = canonical_edge(u, v)
        for s, t, r in self.demands:
            if (s, t) == pair:
                return r
        return 0


@dataclass
class PreprocessReport:
    subdivided: List[Tuple[int, int, int]] = field(default_factory=list)
    forced_zero: List[int] = field(default_factory=list)
    marked_reliable: int = 0

    @property
    def changed(self) -> bool:
        return bool(self.subdivided or self.forced_zero or self.marked_reliable)


def preprocess_with_report(instance: Instance) -> Tuple[Instance, PreprocessReport]:
    """Normalize an instance: EC gets all vertices reliable, ELEM gets its reliable
    vertices made independent by subdividing reliable-reliable edges, and every
    terminal weight is forced to 0."""
    g = instance.graph
    report = PreprocessReport()
    weights = list(g.weights)
    reliable = list(g.reliable)

    if instance.kind is ProblemKind.EC:
        report.marked_reliable = sum(1 for r in reliable if not r)
        reliable = [True] * g.n

    for t in members(instance.terminal_mask):
        if weights[t] > 0:
            report.forced_zero.append(t)
            weights[t] = 0

    edges: List[Edge] = []
    fresh = g.n
    for u, v in g.edges:
        if instance.kind is ProblemKind.ELEM and reliable[u] and reliable[v]:
            weights.append(0)
            reliable.append(False)
            edges.extend([(u, fresh), (v, fresh)])
            report.subdivided.append((u, v, fresh))
            fresh += 1
        else:
            edges.append((u, v))

    graph = NodeWeightedGraph(fresh, tuple(edges), tuple(weights), tuple(reliable))
    return Instance(graph, instance.demands, instance.kind, instance.planar), report


def preprocess(instance: Instance) -> Instance:
    processed, report = preprocess_with_report(instance)
    if report.changed:
        logger.info(
            "preprocess: subdivided %d edges, forced %d terminal weights to 0 %s, marked %d vertices reliable",
            len(report.subdivided),
            len(report.forced_zero),
            report.forced_zero,
            report.marked_reliable,
        )
    return processed


def induced_edges(g: NodeWeightedGraph, vertices: VertexSet) -> EdgeSet:
    """E[X]: edges with both endpoints in X."""
    mask = as_mask(vertices)
    return frozenset((u, v) for u, v in g.edges if (mask >> u) & 1 and (mask >> v) & 1)


def restrict_edges(edges: Iterable[Edge], vertices: VertexSet) -> EdgeSet:
    """Edges of the given set with both endpoints in X."""
    mask = as_mask(vertices)
    return frozenset((u, v) for u, v in edges if (mask >> u) & 1 and (mask >> v) & 1)


_REQUIRED_KEYS = ("n", "weights", "reliable", "edges", "demands", "kind")


def _int_pair_list(doc: Dict[str, Any], key: str, width: int) -> List[List[int]]:
    items = doc[key]
    if not isinstance(items, list):
        raise SchemaError(f"'{key}' must be a list")
    for item in items:
        if (
            not isinstance(item, list)
            or len(item) != width
            or any(isinstance(x, bool) or not isinstance(x, int) for x in item)
        ):
            raise SchemaError(f"every entry of '{key}' must be a list of {width} integers, got {item!r}")
    return items


def instance_from_dict(doc: Dict[str, Any]) -> Instance:
    if not isinstance(doc, dict):
        raise SchemaError("instance document must be a JSON object")
    for key in _REQUIRED_KEYS:
        if key not in doc:
            raise SchemaError(f"missing key '{key}'")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise SchemaError(f"'n' must be a nonnegative integer, got {n!r}")
    if not isinstance(doc["weights"], list) or not isinstance(doc["reliable"], list):
        raise SchemaError("'weights' and 'reliable' must be lists")
    if any(not isinstance(r, bool) for r in doc["reliable"]):
        raise SchemaError("'reliable' entries must be booleans")
    edges = _int_pair_list(doc, "edges", 2)
    demands = _int_pair_list(doc, "demands", 3)
    if doc["kind"] not in {k.value for k in ProblemKind}:
        raise SchemaError(f"'kind' must be one of EC, ELEM, VC012, got {doc['kind']!r}")
    graph = NodeWeightedGraph(n, tuple((u, v) for u, v in edges), tuple(doc["weights"]), tuple(doc["reliable"]))
    planar = doc.get("planar", False)
    if not isinstance(planar, bool):
        raise SchemaError("'planar' must be a boolean")
    return Instance(graph, tuple((u, v, r) for u, v, r in demands), ProblemKind(doc["kind"]), planar)


def instance_to_dict(instance: Instance) -> Dict[str, Any]:
    g = instance.graph
    return {
        "n": g.n,
        "weights": list(g.weights),
        "reliable": list(g.reliable),
        "edges": [[u, v] for u, v in g.edges],
        "demands": [[u, v, r] for u, v, r in instance.demands],
        "kind": instance.kind.value,
        "planar": instance.planar,
    }


def load(source: Union[str, Path, TextIO]) -> Instance:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            text = f.read()
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"not a JSON document: {e}") from e
    return instance_from_dict(doc)


def dumps(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def save(instance: Instance, target: Union[str, Path, TextIO]) -> None:
    text = dumps(instance)
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        target.write(text)
