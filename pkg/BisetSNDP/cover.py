"""
Primal-dual covering of a {0,1} biset function by vertices.

Duals of all minimal violated bisets grow uniformly until a vertex becomes
tight; the tight vertex is bought and the loop repeats until the oracle
reports no violated biset. A reverse-delete pass then drops bought vertices
that are not needed, latest first.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Protocol, TextIO, Tuple

from .biset import Biset, gamma
from .errors import InfeasibleInstanceError, InternalInvariantError
from .graph import Edge, NodeWeightedGraph, VertexSet, as_mask, members, popcount

logger = logging.getLogger(__name__)


class ViolatedBisetsOracle(Protocol):
    """What the engine and the audits need from a phase function."""

    phase_edges: FrozenSet[Edge]

    def violated(self, P: int) -> List[Biset]:
        ...

    def feasible(self, P: int) -> bool:
        ...

    def violated_for_edges(self, edges: Iterable[Edge]) -> List[Biset]:
        ...

    def covers(self, edges: Iterable[Edge]) -> bool:
        ...

    def h(self, b: Biset) -> int:
        ...

    def in_domain(self, b: Biset) -> bool:
        ...


def fraction_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass
class DualState:
    y: Dict[Biset, Fraction]
    residual: List[Fraction]

    @classmethod
    def start(cls, g: NodeWeightedGraph) -> "DualState":
        return cls({}, [Fraction(w) for w in g.weights])

    def raise_family(self, family: List[Biset], gammas: List[int], epsilon: Fraction):
        for b, gm in zip(family, gammas):
            self.y[b] = self.y.get(b, Fraction(0)) + epsilon
            for v in members(gm):
                self.residual[v] -= epsilon

    @property
    def objective(self) -> Fraction:
        return sum(self.y.values(), Fraction(0))


@dataclass
class IterationRecord:
    index: int
    family: List[Biset]
    gammas: List[int]
    epsilon: Fraction
    tight_vertex: int
    P_before: int
    residual: Tuple[Fraction, ...]

    def to_trace(self) -> Dict:
        return {
            "iter": self.index,
            "raised_bisets": [b.describe() for b in self.family],
            "epsilon": fraction_text(self.epsilon),
            "tight_vertex": self.tight_vertex,
        }


@dataclass
class CoverResult:
    Q: int
    P: int
    P0: int
    selection_order: List[Tuple[int, int]]
    dual: DualState
    iterations: List[IterationRecord] = field(default_factory=list)
    removed: List[int] = field(default_factory=list)

    @property
    def dual_objective(self) -> Fraction:
        return self.dual.objective

    @property
    def bought(self) -> int:
        return self.Q & ~self.P0

    def cost(self, g: NodeWeightedGraph) -> int:
        return g.weight_of(self.bought)


def _epsilon(dual: DualState, gammas: List[int]) -> Optional[Tuple[Fraction, int]]:
    counts: Dict[int, int] = {}
    for gm in gammas:
        for v in members(gm):
            counts[v] = counts.get(v, 0) + 1
    if not counts:
        return None
    return min((dual.residual[v] / counts[v], v) for v in counts)


def cover(
    g: NodeWeightedGraph,
    phase_edges: Iterable[Edge],
    oracle: ViolatedBisetsOracle,
    P0: VertexSet,
    trace: Optional[TextIO] = None,
    trace_fields: Optional[Dict] = None,
) -> CoverResult:
    """Run the growth stage and reverse-delete; P0 is taken exactly as given.

    Each iteration is written to trace as one JSON line, prefixed with
    trace_fields when given.
    """
    phase_edges = frozenset(phase_edges)
    P0 = as_mask(P0)
    P = P0
    dual = DualState.start(g)
    order: List[Tuple[int, int]] = []
    records: List[IterationRecord] = []

    while True:
        family = oracle.violated(P)
        if not family:
            break
        index = len(records) + 1
        gammas = [gamma(phase_edges, b) for b in family]
        for b, gm in zip(family, gammas):
            if gm & P:
                raise InternalInvariantError(
                    f"iteration {index}: {b.describe()} has bought neighbours {members(gm & P)}"
                )
        picked = _epsilon(dual, gammas)
        if picked is None:
            raise InfeasibleInstanceError(
                f"violated biset {family[0].describe()} has no vertex that can cover it",
                certificate=family[0],
            )
        epsilon, tight = picked
        dual.raise_family(family, gammas, epsilon)
        negative = [v for v in range(g.n) if dual.residual[v] < 0]
        if negative:
            raise InternalInvariantError(f"iteration {index}: dual infeasible at vertices {negative}")
        record = IterationRecord(index, list(family), gammas, epsilon, tight, P, tuple(dual.residual))
        records.append(record)
        P |= 1 << tight
        order.append((index, tight))
        logger.debug(
            "iteration %d: %d violated bisets, epsilon=%s, bought %d", index, len(family), epsilon, tight
        )
        if trace is not None:
            trace.write(json.dumps({**(trace_fields or {}), **record.to_trace()}) + "\n")

    Q = P
    removed = []
    for _, v in reversed(order):
        if oracle.feasible(Q & ~(1 << v)):
            Q &= ~(1 << v)
            removed.append(v)

    slack = [v for v in members(Q & ~P0) if dual.residual[v] != 0]
    if slack:
        raise InternalInvariantError(f"bought vertices {slack} are not tight")

    result = CoverResult(Q, P, P0, order, dual, records, removed)
    logger.info(
        "cover: %d iterations, bought %d, kept %d, dual objective %s",
        len(records),
        popcount(P & ~P0),
        popcount(result.bought),
        result.dual_objective,
    )
    return result


def dual_lower_bound(result: CoverResult) -> Fraction:
    return result.dual_objective
