"""
Problem-level solvers.

EC and ELEM instances are solved phase by phase: phase ell raises every
demand pair from min(ell-1, r) to min(ell, r) element-disjoint paths by
covering a {0,1} biset function with the primal-dual engine. VC012 instances
are solved in two stages: a Steiner forest connecting every demand pair, then
an augmentation 2-connecting the pairs that ask for it.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, TextIO, Tuple

import networkx as nx

from .biset import Biset, delta_size, in_P_elem, minimal_members
from .constants import MAX_PHASES
from .cover import CoverResult, ViolatedBisetsOracle, cover, dual_lower_bound, fraction_text
from .errors import (
    DomainError,
    InfeasibleInstanceError,
    InternalInvariantError,
    InvalidInstanceError,
    PreconditionError,
)
from .flow import pair_connectivity, pair_cut
from .graph import (
    Edge,
    EdgeSet,
    Instance,
    NodeWeightedGraph,
    ProblemKind,
    as_mask,
    induced_edges,
    members,
    popcount,
    preprocess,
    restrict_edges,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhaseState:
    ell: int
    X: int
    H_edges: EdgeSet
    phase_edges: EdgeSet

    @classmethod
    def start(cls, g: NodeWeightedGraph, ell: int, X: int) -> "PhaseState":
        H = induced_edges(g, X)
        return cls(ell, X, H, g.edge_set - H)


def separated_requirement(inst: Instance, b: Biset) -> int:
    """Largest demand over pairs with one end in S and the other outside S'."""
    best = 0
    for u, v, r in inst.demands:
        if ((b.inner >> u) & 1 and not (b.outer >> v) & 1) or ((b.inner >> v) & 1 and not (b.outer >> u) & 1):
            best = max(best, r)
    return best


r_elem = separated_requirement
r_v = separated_requirement


def r_ell(inst: Instance, ell: int, b: Biset) -> int:
    return min(ell, separated_requirement(inst, b))


def f_ell(inst: Instance, ell: int, b: Biset) -> int:
    return r_ell(inst, ell, b) - popcount(b.boundary)


def h_ell_unclamped(state: PhaseState, inst: Instance, b: Biset) -> int:
    return f_ell(inst, state.ell, b) - delta_size(state.H_edges, b)


def h_ell_value(state: PhaseState, inst: Instance, b: Biset) -> int:
    if not in_P_elem(b, inst.graph):
        raise DomainError(f"{b.describe()} has a reliable vertex on its boundary")
    if separated_requirement(inst, b) < state.ell:
        return 0
    return int(popcount(b.boundary) + delta_size(state.H_edges, b) == state.ell - 1)


def vc_h_value(F1: Iterable[Edge], inst: Instance, b: Biset) -> int:
    if separated_requirement(inst, b) != 2:
        return 0
    return int(delta_size(F1, b) + popcount(b.boundary) == 1)


def _check_family(g: NodeWeightedGraph, family: List[Biset], P: int, label: str):
    for b in family:
        if b.boundary & ~P:
            raise InternalInvariantError(f"{label}: boundary of {b.describe()} leaves the bought set")
        if b.outer & ~P:
            raise InternalInvariantError(f"{label}: {b.describe()} is not contained in the bought set")
        inside = nx.Graph()
        inside.add_nodes_from(members(b.inner))
        inside.add_edges_from(restrict_edges(g.edges, b.inner))
        if not nx.is_connected(inside):
            raise InternalInvariantError(f"{label}: inner part of {b.describe()} is disconnected")


class PairCutOracle:
    """Minimal violated bisets from closest minimum cuts of the deficient pairs.

    base_edges are always present (the edges already paid for); a pair with
    target t is deficient when its connectivity over base_edges plus the
    queried edges is below t, and it is then exactly t-1.
    """

    label = "pair-cut"

    def __init__(
        self,
        inst: Instance,
        kind: ProblemKind,
        base_edges: EdgeSet,
        phase_edges: EdgeSet,
        pairs: List[Tuple[int, int, int]],
    ):
        self.inst = inst
        self.kind = kind
        self.base_edges = frozenset(base_edges)
        self.phase_edges = frozenset(phase_edges)
        self.pairs = pairs

    def violated_for_edges(self, edges: Iterable[Edge]) -> List[Biset]:
        g = self.inst.graph
        support = self.base_edges | frozenset(edges)
        candidates = set()
        for s, t, target in self.pairs:
            value, from_s = pair_cut(self.kind, support, g, s, t)
            if value >= target:
                continue
            if value < target - 1:
                raise InternalInvariantError(
                    f"{self.label}: pair ({s},{t}) has connectivity {value} over paid edges, expected {target - 1}"
                )
            _, from_t = pair_cut(self.kind, support, g, t, s)
            candidates.update((from_s, from_t))
        return minimal_members(candidates)

    def covers(self, edges: Iterable[Edge]) -> bool:
        g = self.inst.graph
        support = self.base_edges | frozenset(edges)
        return all(
            pair_connectivity(self.kind, support, g, s, t, limit=target) >= target for s, t, target in self.pairs
        )

    def violated(self, P: int) -> List[Biset]:
        family = self.violated_for_edges(restrict_edges(self.phase_edges, P))
        _check_family(self.inst.graph, family, P, self.label)
        logger.debug("%s oracle: %d minimal violated bisets at P=%s", self.label, len(family), members(P))
        return family

    def feasible(self, P: int) -> bool:
        return self.covers(restrict_edges(self.phase_edges, P))


class ElemPhaseOracle(PairCutOracle):
    def __init__(self, inst: Instance, state: PhaseState):
        pairs = [(s, t, state.ell) for s, t, r in inst.demands if r >= state.ell]
        super().__init__(inst, inst.kind, state.H_edges, state.phase_edges, pairs)
        self.state = state
        self.label = f"phase {state.ell}"

    def in_domain(self, b: Biset) -> bool:
        return in_P_elem(b, self.inst.graph)

    def h(self, b: Biset) -> int:
        return h_ell_value(self.state, self.inst, b)


class VcStageTwoOracle(PairCutOracle):
    def __init__(self, inst: Instance, F1: EdgeSet):
        F1 = frozenset(F1)
        pairs = [(s, t, 2) for s, t, r in inst.demands if r == 2]
        super().__init__(inst, ProblemKind.VC012, F1, inst.graph.edge_set - F1, pairs)
        self.label = "vc stage 2"

    def in_domain(self, b: Biset) -> bool:
        return True

    def h(self, b: Biset) -> int:
        return vc_h_value(self.base_edges, self.inst, b)


class SteinerForestOracle:
    """Connect every demand pair; violated bisets are components (C, C)."""

    label = "steiner forest"

    def __init__(self, inst: Instance):
        self.inst = inst
        self.phase_edges = inst.graph.edge_set

    def _components(self, edges: Iterable[Edge]) -> List[int]:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.inst.graph.n))
        graph.add_edges_from(edges)
        return [as_mask(c) for c in nx.connected_components(graph)]

    def violated_for_edges(self, edges: Iterable[Edge]) -> List[Biset]:
        family = []
        for c in self._components(edges):
            if any(((c >> u) & 1) != ((c >> v) & 1) for u, v, _ in self.inst.demands):
                family.append(Biset(c, c))
        return sorted(family, key=Biset.sort_key)

    def covers(self, edges: Iterable[Edge]) -> bool:
        return not self.violated_for_edges(edges)

    def violated(self, P: int) -> List[Biset]:
        family = self.violated_for_edges(restrict_edges(self.phase_edges, P))
        _check_family(self.inst.graph, family, P, self.label)
        return family

    def feasible(self, P: int) -> bool:
        return self.covers(restrict_edges(self.phase_edges, P))

    def in_domain(self, b: Biset) -> bool:
        return b.boundary == 0

    def h(self, b: Biset) -> int:
        return int(b.boundary == 0 and separated_requirement(self.inst, b) >= 1)


def elem_violated_bisets(state: PhaseState, inst: Instance, P: int) -> List[Biset]:
    return ElemPhaseOracle(inst, state).violated(as_mask(P))


@dataclass
class Deficiency:
    pair: Tuple[int, int]
    required: int
    achieved: int
    certificate: Biset


def find_deficient_pair(inst: Instance, X: int, cap: Optional[int] = None) -> Optional[Deficiency]:
    """First demand pair (in sorted order) whose connectivity in E[X] is below min(cap, r)."""
    g = inst.graph
    edges = induced_edges(g, X)
    for s, t, r in inst.demands:
        target = r if cap is None else min(cap, r)
        if pair_connectivity(inst.kind, edges, g, s, t, limit=target) < target:
            achieved, cut = pair_cut(inst.kind, edges, g, s, t)
            return Deficiency((s, t), target, achieved, cut)
    return None


def require_feasible(inst: Instance):
    missing = find_deficient_pair(inst, inst.graph.vertex_mask)
    if missing is not None:
        s, t = missing.pair
        raise InfeasibleInstanceError(
            f"pair ({s},{t}) needs {missing.required} but the whole graph allows {missing.achieved}",
            pair=missing.pair,
            required=missing.required,
            achieved=missing.achieved,
            certificate=missing.certificate,
        )


@dataclass
class PhaseReport:
    ell: int
    stage: str
    result: CoverResult
    cost: int
    dual_lower_bound: Fraction
    oracle: Any = field(default=None, repr=False, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ell": self.ell,
            "stage": self.stage,
            "cost": self.cost,
            "dual_lower_bound": fraction_text(self.dual_lower_bound),
            "iterations": len(self.result.iterations),
            "selected": [v for _, v in self.result.selection_order],
            "removed": self.result.removed,
        }


@dataclass
class SolveReport:
    instance: Instance
    solution: int
    phases: List[PhaseReport]
    exact_bound: Optional[int] = None
    audit_flags: Dict[str, bool] = field(default_factory=dict)

    @property
    def weight(self) -> int:
        return self.instance.graph.weight_of(self.solution)

    @property
    def planar(self) -> bool:
        return self.instance.planar

    @property
    def dual_lower_bound(self) -> Fraction:
        return sum((p.dual_lower_bound for p in self.phases), Fraction(0))

    @property
    def ratio_vs_dual(self) -> Optional[Fraction]:
        """weight / summed dual bound; None when the bound is 0 and the weight is not."""
        bound = self.dual_lower_bound
        if bound == 0:
            return Fraction(1) if self.weight == 0 else None
        return Fraction(self.weight) / bound

    @property
    def ratio_certificate(self) -> Optional[Fraction]:
        """weight over the per-phase bounds, each phase bound raised to the exact optimum when known."""
        if self.exact_bound is None:
            bound = self.dual_lower_bound
        else:
            bound = sum((max(p.dual_lower_bound, Fraction(self.exact_bound)) for p in self.phases), Fraction(0))
        if bound == 0:
            return Fraction(1) if self.weight == 0 else None
        return Fraction(self.weight) / bound

    @property
    def iterations(self) -> int:
        return sum(len(p.result.iterations) for p in self.phases)

    def to_dict(self) -> Dict[str, Any]:
        ratio = self.ratio_vs_dual
        certificate = self.ratio_certificate
        return {
            "kind": self.instance.kind.value,
            "k": self.instance.k,
            "n": self.instance.graph.n,
            "planar": self.planar,
            "solution": members(self.solution),
            "weight": self.weight,
            "dual_lower_bound": fraction_text(self.dual_lower_bound),
            "ratio_vs_dual": None if ratio is None else fraction_text(ratio),
            "exact_bound": self.exact_bound,
            "ratio_certificate": None if certificate is None else fraction_text(certificate),
            "audit_flags": dict(sorted(self.audit_flags.items())),
            "phases": [p.to_dict() for p in self.phases],
        }


def _phase(
    g: NodeWeightedGraph,
    ell: int,
    stage: str,
    oracle: ViolatedBisetsOracle,
    P0: int,
    trace: Optional[TextIO],
) -> PhaseReport:
    result = cover(g, oracle.phase_edges, oracle, P0, trace, {"phase": ell, "stage": stage})
    report = PhaseReport(ell, stage, result, result.cost(g), dual_lower_bound(result), oracle)
    logger.info(
        "%s %d: cost=%d dual=%s iterations=%d", stage, ell, report.cost, report.dual_lower_bound, len(result.iterations)
    )
    return report


def _check_cap(inst: Instance):
    if inst.k > MAX_PHASES:
        raise InvalidInstanceError(f"maximum demand {inst.k} exceeds the phase cap {MAX_PHASES}")


def solve_elem_sndp(inst: Instance, trace: Optional[TextIO] = None) -> SolveReport:
    inst = preprocess(inst)
    if inst.kind is ProblemKind.VC012:
        raise PreconditionError("solve_elem_sndp needs an EC or ELEM instance")
    _check_cap(inst)
    require_feasible(inst)
    g = inst.graph
    X = inst.terminal_mask
    phases = []
    for ell in range(1, inst.k + 1):
        state = PhaseState.start(g, ell, X)
        phases.append(_phase(g, ell, "phase", ElemPhaseOracle(inst, state), X | g.zero_weight_mask, trace))
        X |= phases[-1].result.Q
        behind = find_deficient_pair(inst, X, cap=ell)
        if behind is not None:
            raise InternalInvariantError(
                f"after phase {ell} pair {behind.pair} has {behind.achieved} < {behind.required} disjoint paths"
            )
    report = SolveReport(inst, X, phases)
    logger.info("solved %s instance: weight=%d dual=%s", inst.kind.value, report.weight, report.dual_lower_bound)
    return report


def solve_ec_sndp(inst: Instance, trace: Optional[TextIO] = None) -> SolveReport:
    if inst.kind is not ProblemKind.EC:
        raise PreconditionError(f"solve_ec_sndp needs an EC instance, got {inst.kind.value}")
    return solve_elem_sndp(inst, trace)


def solve_vc012(inst: Instance, trace: Optional[TextIO] = None) -> SolveReport:
    inst = preprocess(inst)
    if inst.kind is not ProblemKind.VC012:
        raise PreconditionError(f"solve_vc012 needs a VC012 instance, got {inst.kind.value}")
    require_feasible(inst)
    g = inst.graph

    forest = SteinerForestOracle(inst)
    first = _phase(g, 1, "steiner", forest, inst.terminal_mask | g.zero_weight_mask, trace)
    X1 = first.result.Q
    behind = find_deficient_pair(inst, X1, cap=1)
    if behind is not None:
        raise InternalInvariantError(f"stage 1 left pair {behind.pair} disconnected")

    augment = VcStageTwoOracle(inst, induced_edges(g, X1))
    second = _phase(g, 2, "vc2", augment, X1 | g.zero_weight_mask, trace)
    X = X1 | second.result.Q
    behind = find_deficient_pair(inst, X)
    if behind is not None:
        raise InternalInvariantError(f"pair {behind.pair} has {behind.achieved} < {behind.required} after stage 2")
    report = SolveReport(inst, X, [first, second])
    logger.info("solved VC012 instance: weight=%d dual=%s", report.weight, report.dual_lower_bound)
    return report


def solve(inst: Instance, trace: Optional[TextIO] = None) -> SolveReport:
    if inst.kind is ProblemKind.VC012:
        return solve_vc012(inst, trace)
    if inst.kind is ProblemKind.EC:
        return solve_ec_sndp(inst, trace)
    return solve_elem_sndp(inst, trace)
