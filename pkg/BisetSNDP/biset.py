"""
Biset algebra, crossing edges, the uncrossing procedure for witness families
and laminar forests.

A biset (S, S') is a pair of nested vertex sets; its boundary S' minus S is
derived on demand. Both parts are int bitmasks over the vertex ids.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import InternalInvariantError, LaminarityError, PreconditionError
from .graph import Edge, NodeWeightedGraph, as_mask, members, popcount

logger = logging.getLogger(__name__)

BisetPredicate = Callable[["Biset"], bool]


@dataclass(frozen=True)
class Biset:
    inner: int
    outer: int

    def __post_init__(self):
        if self.inner & ~self.outer:
            raise ValueError(f"inner part {members(self.inner)} is not contained in outer part {members(self.outer)}")

    @classmethod
    def of(cls, inner: Iterable[int], outer: Iterable[int]) -> "Biset":
        return cls(as_mask(inner), as_mask(outer))

    @classmethod
    def full(cls, universe: int) -> "Biset":
        return cls(universe, universe)

    @property
    def boundary(self) -> int:
        return self.outer & ~self.inner

    def __and__(self, other: "Biset") -> "Biset":
        return Biset(self.inner & other.inner, self.outer & other.outer)

    def __or__(self, other: "Biset") -> "Biset":
        return Biset(self.inner | other.inner, self.outer | other.outer)

    def __sub__(self, other: "Biset") -> "Biset":
        return Biset(self.inner & ~other.outer, self.outer & ~other.inner)

    def size(self) -> int:
        return popcount(self.inner) + popcount(self.outer)

    def sort_key(self) -> Tuple[List[int], List[int]]:
        return (members(self.inner), members(self.outer))

    def describe(self) -> str:
        inner = ",".join(str(v) for v in members(self.inner))
        outer = ",".join(str(v) for v in members(self.outer))
        return f"([{inner}],[{outer}])"

    def __repr__(self) -> str:
        return f"Biset{self.describe()}"


def intersect(a: Biset, b: Biset) -> Biset:
    return a & b


def union(a: Biset, b: Biset) -> Biset:
    return a | b


def subtract(a: Biset, b: Biset) -> Biset:
    return a - b


def subset_of(a: Biset, b: Biset) -> bool:
    return not (a.inner & ~b.inner) and not (a.outer & ~b.outer)


def overlaps(a: Biset, b: Biset) -> bool:
    if subset_of(a, b) or subset_of(b, a):
        return False
    return bool((a.outer & b.inner) or (a.inner & b.outer))


def in_P_elem(b: Biset, g: NodeWeightedGraph) -> bool:
    return not (b.boundary & g.reliable_mask)


def canonical_family(family: Iterable[Biset]) -> List[Biset]:
    return sorted(set(family), key=Biset.sort_key)


def minimal_members(family: Iterable[Biset]) -> List[Biset]:
    """The ⊆-minimal bisets of a family, in canonical order."""
    unique = canonical_family(family)
    return [b for b in unique if not any(o != b and subset_of(o, b) for o in unique)]


def crosses(edge: Edge, b: Biset) -> bool:
    u, v = edge
    return bool(
        ((b.inner >> u) & 1 and not (b.outer >> v) & 1) or ((b.inner >> v) & 1 and not (b.outer >> u) & 1)
    )


def crossing_edges(edges: Iterable[Edge], b: Biset) -> List[Edge]:
    """δ_F(Ŝ): edges of F with one end in S and the other outside S'."""
    return sorted(e for e in edges if crosses(e, b))


def delta_size(edges: Iterable[Edge], b: Biset) -> int:
    return sum(1 for e in edges if crosses(e, b))


def gamma(edges: Iterable[Edge], b: Biset) -> int:
    """Γ_F(Ŝ) as a mask: vertices outside S' joined by an edge of F to S."""
    mask = 0
    for u, v in edges:
        if (b.inner >> u) & 1 and not (b.outer >> v) & 1:
            mask |= 1 << v
        elif (b.inner >> v) & 1 and not (b.outer >> u) & 1:
            mask |= 1 << u
    return mask


def is_witness(b: Biset, edge: Edge, cover: Iterable[Edge], h: BisetPredicate) -> bool:
    """F-witness: h(Ŝ) = 1 and δ_F(Ŝ) = {e}."""
    return h(b) and crossing_edges(cover, b) == [edge]


def count_overlaps(bisets: Iterable[Biset]) -> int:
    items = list(bisets)
    return sum(1 for i in range(len(items)) for j in range(i + 1, len(items)) if overlaps(items[i], items[j]))


def _first_overlap(keys: List[Edge], current: Mapping[Edge, Biset]) -> Optional[Tuple[Edge, Edge]]:
    for i, e1 in enumerate(keys):
        for e2 in keys[i + 1:]:
            if overlaps(current[e1], current[e2]):
                return e1, e2
    return None


def _uncross_pair(
    e1: Edge,
    e2: Edge,
    current: Dict[Edge, Biset],
    cover: frozenset,
    h: BisetPredicate,
    before: int,
) -> Optional[Dict[Edge, Biset]]:
    a, b = current[e1], current[e2]
    for x, y in ((a & b, a | b), (a - b, b - a)):
        for first, second in ((x, y), (y, x)):
            if not (is_witness(first, e1, cover, h) and is_witness(second, e2, cover, h)):
                continue
            candidate = dict(current)
            candidate[e1] = first
            candidate[e2] = second
            if count_overlaps(candidate.values()) < before:
                return candidate
    return None


def uncross_witness_family(
    cover: Iterable[Edge],
    non_redundant: Iterable[Edge],
    witnesses: Mapping[Edge, Biset],
    h: BisetPredicate,
) -> Dict[Edge, Biset]:
    """Turn a family of F-witness bisets into a laminar one.

    Overlapping pairs are replaced by (∩, ∪) or, failing that, by the two
    differences; the new bisets are reassigned to the two edges by testing
    the witness property directly.
    """
    cover = frozenset(cover)
    keys = sorted(non_redundant)
    for e in keys:
        if e not in witnesses:
            raise PreconditionError(f"no witness biset supplied for edge {e}")
        if not is_witness(witnesses[e], e, cover, h):
            raise PreconditionError(f"{witnesses[e].describe()} is not a witness for edge {e}")

    current = {e: witnesses[e] for e in keys}
    rounds = 0
    while True:
        pair = _first_overlap(keys, current)
        if pair is None:
            logger.debug("uncrossing finished after %d rounds for %d witnesses", rounds, len(keys))
            return current
        before = count_overlaps(current.values())
        replaced = _uncross_pair(pair[0], pair[1], current, cover, h, before)
        if replaced is None:
            a, b = current[pair[0]], current[pair[1]]
            raise InternalInvariantError(
                f"uncrossing stalled on {a.describe()} / {b.describe()} for edges {pair[0]}, {pair[1]}"
            )
        current = replaced
        rounds += 1


@dataclass
class LaminarForest:
    """Tree over a laminar biset family plus the root (V, V)."""

    universe: int
    root: Biset
    nodes: List[Biset]
    parent: Dict[Biset, Biset]
    edge_of: Dict[Biset, Edge] = field(default_factory=dict)

    def children(self, b: Biset) -> List[Biset]:
        return [c for c in self.nodes if self.parent[c] == b]

    def is_leaf(self, b: Biset) -> bool:
        return not self.children(b)

    def degree(self, b: Biset) -> int:
        return len(self.children(b)) + (0 if b == self.root else 1)

    def depth(self, b: Biset) -> int:
        d = 0
        while b != self.root:
            b = self.parent[b]
            d += 1
        return d

    def all_nodes(self) -> List[Biset]:
        return [self.root] + list(self.nodes)


def build_laminar_forest(
    family: Iterable[Biset],
    universe: int,
    edge_of: Optional[Mapping[Biset, Edge]] = None,
) -> LaminarForest:
    root = Biset.full(universe)
    nodes = [b for b in canonical_family(family) if b != root]
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if overlaps(a, b):
                raise LaminarityError(f"bisets {a.describe()} and {b.describe()} overlap", (a, b))
    parent: Dict[Biset, Biset] = {}
    for b in nodes:
        supersets = [t for t in nodes if t != b and subset_of(b, t)]
        parent[b] = min(supersets, key=lambda t: (t.size(), t.sort_key())) if supersets else root
    return LaminarForest(universe, root, nodes, parent, dict(edge_of or {}))


def holders(forest: LaminarForest, u: int) -> List[Biset]:
    """⊆-minimal bisets of the extended family whose inner part contains u."""
    containing = [b for b in forest.all_nodes() if (b.inner >> u) & 1]
    return minimal_members(containing)


def owner(forest: LaminarForest, u: int) -> Biset:
    containing = [b for b in forest.nodes if (b.inner >> u) & 1]
    if not containing:
        return forest.root
    return min(containing, key=lambda b: (b.size(), b.sort_key()))
