"""
Seeded planar instance generators.

Every family is planar by construction and every sampled demand is capped at
the connectivity the full graph offers, so a generated instance is always
feasible. One random.Random(seed) drives all draws in a fixed order: graph,
weights, demand pairs, demand values, reliability.
"""

import itertools
import logging
import random
from dataclasses import dataclass
from math import isqrt
from typing import Callable, Dict, List, Tuple

import networkx as nx

from .constants import DEFAULT_FAMILY, DEFAULT_KIND, DEFAULT_WEIGHT_RANGE, NON_RELIABLE_FRACTION
from .errors import InternalInvariantError, PreconditionError
from .flow import pair_connectivity
from .graph import Edge, Instance, NodeWeightedGraph, ProblemKind, canonical_edge

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratorSpec:
    family: str = DEFAULT_FAMILY
    n: int = 9
    weight_range: Tuple[int, int] = DEFAULT_WEIGHT_RANGE
    demand_count: int = 1
    k_max: int = 1
    seed: int = 0
    kind: ProblemKind = ProblemKind(DEFAULT_KIND)


def grid_edges(n: int, rng: random.Random) -> Tuple[int, List[Edge]]:
    """a x b lattice with a = max(2, isqrt(n)) rows; the vertex count is a*b."""
    a = max(2, isqrt(n))
    b = max(1, n // a)
    lattice = nx.grid_2d_graph(a, b)
    labels = {(i, j): i * b + j for i, j in lattice.nodes}
    return a * b, sorted(canonical_edge(labels[x], labels[y]) for x, y in lattice.edges)


def triangulation_edges(n: int, rng: random.Random) -> Tuple[int, List[Edge]]:
    """Start from a triangle and repeatedly stack a new vertex into a random face."""
    if n < 3:
        return n, [(0, 1)]
    edges = {(0, 1), (1, 2), (0, 2)}
    faces = [(0, 1, 2)]
    for v in range(3, n):
        a, b, c = faces.pop(rng.randrange(len(faces)))
        edges.update({canonical_edge(v, a), canonical_edge(v, b), canonical_edge(v, c)})
        faces.extend([(a, b, v), (b, c, v), (a, c, v)])
    return n, sorted(edges)


def cycle_chords_edges(n: int, rng: random.Random) -> Tuple[int, List[Edge]]:
    """A cycle whose faces are split by random non-crossing chords (outerplanar)."""
    if n < 3:
        return n, [(0, 1)]
    edges = {canonical_edge(v, (v + 1) % n) for v in range(n)}
    faces = [list(range(n))]
    for _ in range(rng.randint(0, n - 3)):
        splittable = [i for i, face in enumerate(faces) if len(face) >= 4]
        if not splittable:
            break
        face = faces.pop(rng.choice(splittable))
        i, j = sorted(rng.sample(range(len(face)), 2))
        if j - i < 2 or (i == 0 and j == len(face) - 1):
            faces.append(face)
            continue
        edges.add(canonical_edge(face[i], face[j]))
        faces.append(face[i:j + 1])
        faces.append(face[j:] + face[:i + 1])
    return n, sorted(edges)


FAMILIES: Dict[str, Callable[[int, random.Random], Tuple[int, List[Edge]]]] = {
    "grid": grid_edges,
    "random_planar_triangulation": triangulation_edges,
    "cycle_chords_planar": cycle_chords_edges,
}


def generate(spec: GeneratorSpec) -> Instance:
    if spec.family not in FAMILIES:
        raise PreconditionError(f"unknown family '{spec.family}', expected one of {sorted(FAMILIES)}")
    if spec.n < 2 or spec.demand_count < 1 or spec.k_max < 1:
        raise PreconditionError(f"need n >= 2, demand_count >= 1 and k_max >= 1, got {spec}")
    lo, hi = spec.weight_range
    if lo < 0 or hi < lo:
        raise PreconditionError(f"bad weight range {spec.weight_range}")
    kind = ProblemKind(spec.kind)

    rng = random.Random(spec.seed)
    n, edges = FAMILIES[spec.family](spec.n, rng)
    weights = [rng.randint(lo, hi) for _ in range(n)]

    pairs = list(itertools.combinations(range(n), 2))
    if spec.demand_count > len(pairs):
        raise PreconditionError(f"{spec.demand_count} demands requested but only {len(pairs)} vertex pairs exist")
    chosen = sorted(rng.sample(pairs, spec.demand_count))
    k_max = min(spec.k_max, 2) if kind is ProblemKind.VC012 else spec.k_max
    wanted = [rng.randint(1, k_max) for _ in chosen]

    terminals = {v for pair in chosen for v in pair}
    if kind is ProblemKind.ELEM:
        reliable = [v in terminals or rng.random() >= NON_RELIABLE_FRACTION for v in range(n)]
    elif kind is ProblemKind.VC012:
        reliable = [v in terminals for v in range(n)]
    else:
        reliable = [True] * n
    g = NodeWeightedGraph(n, tuple(edges), tuple(weights), tuple(reliable))

    demands = []
    for (s, t), r in zip(chosen, wanted):
        offered = pair_connectivity(kind, g.edges, g, s, t, limit=r)
        if offered < 1:
            raise InternalInvariantError(f"generated {spec.family} graph leaves ({s},{t}) disconnected")
        demands.append((s, t, min(r, offered)))

    inst = Instance(g, tuple(demands), kind, planar=True)
    logger.info(
        "generated %s: n=%d m=%d demands=%d k=%d seed=%d", spec.family, n, len(edges), len(demands), inst.k, spec.seed
    )
    return inst
