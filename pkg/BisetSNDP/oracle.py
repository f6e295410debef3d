"""
Ground truth and audits.

Everything here is exhaustive or close to it: biset enumeration, minimal
violated families by enumeration, exact optima by subset enumeration, the
defining inequalities of the biset function classes, and the witness-tree
counting audit run over the iteration log of every cover.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Set, Tuple

from .biset import (
    Biset,
    LaminarForest,
    build_laminar_forest,
    crosses,
    delta_size,
    gamma,
    holders,
    in_P_elem,
    is_witness,
    minimal_members,
    owner,
    subset_of,
    uncross_witness_family,
)
from .constants import (
    MAIN_COUNTING_FACTOR,
    MAX_ENUM_VERTICES,
    MAX_EXACT_CANDIDATES,
    PLANAR_DEGREE_FACTOR,
    REGULAR_FACTOR,
    SPECIAL_FACTOR,
)
from .cover import CoverResult, ViolatedBisetsOracle
from .errors import (
    InfeasibleInstanceError,
    InternalInvariantError,
    LaminarityError,
    PreconditionError,
    SizeRefusalError,
)
from .flow import flow_runs
from .graph import (
    Edge,
    Instance,
    NodeWeightedGraph,
    ProblemKind,
    VertexSet,
    as_mask,
    induced_edges,
    members,
    popcount,
    preprocess,
    restrict_edges,
)
from .sndp import (
    Deficiency,
    PhaseState,
    SolveReport,
    find_deficient_pair,
    h_ell_value,
    require_feasible,
    separated_requirement,
    vc_h_value,
)

logger = logging.getLogger(__name__)

BisetFunction = Callable[[Biset], int]


def _plain(value: Any) -> Any:
    if isinstance(value, Biset):
        return value.describe()
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value, key=str) if isinstance(value, (set, frozenset)) else value
        return [_plain(v) for v in items]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


@dataclass
class AuditCheck:
    name: str
    instance: str
    passed: bool
    witness: Any = None

    def to_dict(self) -> Dict[str, Any]:
        return {"check": self.name, "instance": self.instance, "passed": self.passed, "witness": _plain(self.witness)}


@dataclass
class AuditReport:
    checks: List[AuditCheck] = field(default_factory=list)
    counters: Dict[str, int] = field(default_factory=lambda: {"bisets_enumerated": 0, "flows_run": 0})
    trees: List[Tuple[str, LaminarForest]] = field(default_factory=list, repr=False)

    def add(self, name: str, instance: str, passed: bool, witness: Any = None):
        if not passed and witness is None:
            raise InternalInvariantError(f"check {name} failed without a witness")
        self.checks.append(AuditCheck(name, instance, bool(passed), None if passed else witness))

    def extend(self, other: "AuditReport"):
        self.checks.extend(other.checks)
        for key, value in other.counters.items():
            self.counters[key] = self.counters.get(key, 0) + value
        self.trees.extend(other.trees)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[AuditCheck]:
        return [c for c in self.checks if not c.passed]

    def to_records(self) -> List[Dict[str, Any]]:
        return [c.to_dict() for c in self.checks]

    def flags(self) -> Dict[str, bool]:
        """One flag per check name: true when every check of that name passed."""
        flags: Dict[str, bool] = {}
        for c in self.checks:
            flags[c.name] = flags.get(c.name, True) and c.passed
        return flags


def enumerate_bisets(
    universe: VertexSet, restrict_P_elem: bool = False, g: Optional[NodeWeightedGraph] = None
) -> Iterator[Biset]:
    """Every biset over the universe: each vertex is inner, boundary or outside."""
    vertices = members(as_mask(universe))
    if len(vertices) > MAX_ENUM_VERTICES:
        raise SizeRefusalError(f"refusing to enumerate 3^{len(vertices)} bisets (cap {MAX_ENUM_VERTICES} vertices)")
    if restrict_P_elem and g is None:
        raise PreconditionError("P_elem filtering needs the graph")
    for assignment in itertools.product((0, 1, 2), repeat=len(vertices)):
        inner = outer = 0
        for v, place in zip(vertices, assignment):
            if place:
                outer |= 1 << v
            if place == 2:
                inner |= 1 << v
        b = Biset(inner, outer)
        if restrict_P_elem and not in_P_elem(b, g):
            continue
        yield b


def minimal_violated_by_enumeration(
    g: NodeWeightedGraph,
    h: BisetFunction,
    edges: Iterable[Edge],
    in_domain: Optional[Callable[[Biset], bool]] = None,
) -> List[Biset]:
    edges = frozenset(edges)
    violated = [
        b
        for b in enumerate_bisets(g.vertex_mask)
        if (in_domain is None or in_domain(b)) and h(b) == 1 and delta_size(edges, b) == 0
    ]
    return minimal_members(violated)


def minimal_violated_bruteforce(state: PhaseState, inst: Instance, P: VertexSet) -> List[Biset]:
    g = inst.graph
    D = restrict_edges(state.phase_edges, as_mask(P))
    return minimal_violated_by_enumeration(
        g, lambda b: h_ell_value(state, inst, b), D, lambda b: in_P_elem(b, g)
    )


def minimal_violated_vc_bruteforce(F1: Iterable[Edge], inst: Instance, P: VertexSet) -> List[Biset]:
    g = inst.graph
    F1 = frozenset(F1)
    D = restrict_edges(g.edge_set - F1, as_mask(P))
    return minimal_violated_by_enumeration(g, lambda b: vc_h_value(F1, inst, b), D)


class EnumerationOracle:
    """Violated-biset oracle for an arbitrary {0,1} biset function, by enumeration."""

    def __init__(
        self,
        g: NodeWeightedGraph,
        h: BisetFunction,
        phase_edges: Iterable[Edge],
        in_domain: Optional[Callable[[Biset], bool]] = None,
    ):
        self.g = g
        self._h = h
        self._in_domain = in_domain
        self.phase_edges = frozenset(phase_edges)

    def in_domain(self, b: Biset) -> bool:
        return self._in_domain is None or self._in_domain(b)

    def h(self, b: Biset) -> int:
        return self._h(b)

    def violated_for_edges(self, edges: Iterable[Edge]) -> List[Biset]:
        return minimal_violated_by_enumeration(self.g, self._h, edges, self._in_domain)

    def covers(self, edges: Iterable[Edge]) -> bool:
        return not self.violated_for_edges(edges)

    def violated(self, P: int) -> List[Biset]:
        return self.violated_for_edges(restrict_edges(self.phase_edges, P))

    def feasible(self, P: int) -> bool:
        return self.covers(restrict_edges(self.phase_edges, P))


def check_feasibility(inst: Instance, X: VertexSet) -> Tuple[bool, Optional[Deficiency]]:
    missing = find_deficient_pair(inst, as_mask(X))
    return missing is None, missing


def check_feasibility_by_enumeration(inst: Instance, X: VertexSet) -> Tuple[bool, Optional[Biset]]:
    """Cut form: |δ_E[X](Ŝ)| + |bd(Ŝ)| >= r(Ŝ) on every biset of the kind's family."""
    g = inst.graph
    edges = induced_edges(g, X)
    for b in enumerate_bisets(g.vertex_mask):
        if inst.kind is ProblemKind.EC and b.boundary:
            continue
        if inst.kind is ProblemKind.ELEM and not in_P_elem(b, g):
            continue
        r = separated_requirement(inst, b)
        if r and delta_size(edges, b) + popcount(b.boundary) < r:
            return False, b
    return True, None


def exact_opt_bruteforce(inst: Instance) -> Tuple[int, int]:
    """Minimum weight of a feasible vertex set and the set itself (as a mask).

    Terminals and zero-weight vertices are always taken; subsets of the
    remaining vertices are tried by (weight, size, mask) and the first
    feasible one wins.
    """
    inst = preprocess(inst)
    g = inst.graph
    base = inst.terminal_mask | g.zero_weight_mask
    candidates = members(g.vertex_mask & ~base)
    if len(candidates) > MAX_EXACT_CANDIDATES:
        raise SizeRefusalError(
            f"{len(candidates)} positive-weight non-terminals exceed the exact cap {MAX_EXACT_CANDIDATES}"
        )
    require_feasible(inst)

    count = 1 << len(candidates)
    weight = [0] * count
    chosen = [0] * count
    for bits in range(1, count):
        low = (bits & -bits).bit_length() - 1
        rest = bits & (bits - 1)
        weight[bits] = weight[rest] + g.weights[candidates[low]]
        chosen[bits] = chosen[rest] | (1 << candidates[low])
    order = sorted(range(count), key=lambda bits: (weight[bits], popcount(bits), chosen[bits]))
    for tried, bits in enumerate(order, 1):
        if find_deficient_pair(inst, base | chosen[bits]) is None:
            logger.info("exact optimum %d after %d candidate sets", weight[bits], tried)
            return weight[bits], base | chosen[bits]
    raise InfeasibleInstanceError("no vertex set satisfies the demands")


def _bisubmodular(f: BisetFunction, a: Biset, b: Biset) -> bool:
    total = f(a) + f(b)
    return total >= f(a & b) + f(a | b) and total >= f(a - b) + f(b - a)


def _bimaximal(f: BisetFunction, a: Biset, b: Biset) -> bool:
    if a.inner & b.inner:
        return True
    return f(a | b) <= max(f(a), f(b))


def _skew_bisupermodular(f: BisetFunction, a: Biset, b: Biset) -> bool:
    total = f(a) + f(b)
    return f(a & b) + f(a | b) >= total or f(a - b) + f(b - a) >= total


def _biuncrossable(f: BisetFunction, a: Biset, b: Biset) -> bool:
    if f(a) <= 0 or f(b) <= 0:
        return True
    return _skew_bisupermodular(f, a, b)


PROPERTY_TESTS = {
    "bisubmodular": _bisubmodular,
    "bimaximal": _bimaximal,
    "skew_bisupermodular": _skew_bisupermodular,
    "biuncrossable": _biuncrossable,
}


def check_function_property(
    prop: str, f: BisetFunction, domain: Iterable[Biset], instance_id: str = ""
) -> AuditReport:
    """Test the defining inequality of prop on every unordered pair of the domain."""
    if prop not in PROPERTY_TESTS:
        raise PreconditionError(f"unknown property {prop!r}; expected one of {sorted(PROPERTY_TESTS)}")
    test = PROPERTY_TESTS[prop]
    items = list(domain)
    report = AuditReport()
    report.counters["bisets_enumerated"] += len(items)
    for a, b in itertools.combinations_with_replacement(items, 2):
        if not test(f, a, b):
            report.add(prop, instance_id, False, (a, b))
            return report
    report.add(prop, instance_id, True)
    return report


def minimalize(oracle: ViolatedBisetsOracle, X: int, Q: int) -> int:
    """Forward pass dropping every vertex of Q that X ∪ Q does not need."""
    for v in members(Q):
        if oracle.feasible(X | (Q & ~(1 << v))):
            Q &= ~(1 << v)
    return Q


def _prune(oracle: ViolatedBisetsOracle, base: frozenset, kept: Set[Edge], candidates: Iterable[Edge]) -> Set[Edge]:
    kept = set(kept)
    for e in sorted(candidates):
        if oracle.covers(base | (kept - {e})):
            kept.discard(e)
    return kept


def _witnesses(
    oracle: ViolatedBisetsOracle, base: frozenset, cover_edges: Set[Edge], keys: Iterable[Edge]
) -> Dict[Edge, Biset]:
    out = {}
    for e in sorted(keys):
        found = oracle.violated_for_edges(base | (cover_edges - {e}))
        if not found:
            raise InternalInvariantError(f"edge {e} survived pruning but is redundant")
        out[e] = found[0]
    return out


def _strictly_below(a: Biset, b: Biset) -> bool:
    return a != b and subset_of(a, b)


def _audit_tree(
    report: AuditReport,
    label: str,
    instance_id: str,
    g: NodeWeightedGraph,
    C: List[Biset],
    cover_edges: Set[Edge],
    witnesses: Dict[Edge, Biset],
    h_prime: Callable[[Biset], bool],
) -> Optional[Tuple[LaminarForest, List[Biset]]]:
    """Laminarity, witness and ownership checks on one witness tree."""
    try:
        forest = build_laminar_forest(witnesses.values(), g.vertex_mask, {b: e for e, b in witnesses.items()})
    except LaminarityError as e:
        report.add(f"{label}_laminar", instance_id, False, e.pair)
        return None
    report.add(f"{label}_laminar", instance_id, True)
    report.trees.append((f"{instance_id} {label}", forest))

    broken = [e for e, b in witnesses.items() if not is_witness(b, e, cover_edges, h_prime)]
    report.add(f"{label}_witness_property", instance_id, not broken, broken)

    shared = [u for u in range(g.n) if len(holders(forest, u)) != 1]
    report.add(f"{label}_unique_owner", instance_id, not shared, shared)

    split = [c for c in C if len({owner(forest, u) for u in members(c.inner)}) != 1]
    report.add(f"{label}_violated_single_owner", instance_id, not split, split)

    owning = {owner(forest, members(c.inner)[0]) for c in C if c.inner}
    bare = [b for b in forest.nodes if forest.is_leaf(b) and b not in owning]
    report.add(f"{label}_leaf_owns_violated", instance_id, not bare, bare)

    unordered = []
    for (u, v), w in witnesses.items():
        su, sv = owner(forest, u), owner(forest, v)
        if not ((w == su and _strictly_below(su, sv)) or (w == sv and _strictly_below(sv, su))):
            unordered.append((u, v))
    report.add(f"{label}_witness_owner_order", instance_id, not unordered, unordered)
    return forest, sorted(owning, key=Biset.sort_key)


def audit_counting(
    inst: Instance,
    oracle: ViolatedBisetsOracle,
    X: VertexSet,
    Q: VertexSet,
    C: List[Biset],
    instance_id: str = "",
) -> AuditReport:
    """Check the critical-vertex counting bounds for one (X, Q, C) triple.

    Q must be a node-minimal set with X ∪ Q feasible; C is the minimal
    violated family at X.
    """
    g = inst.graph
    X = as_mask(X)
    Q = as_mask(Q) & ~X
    report = AuditReport()
    full = X | Q
    if not oracle.feasible(full):
        raise PreconditionError(f"X ∪ Q = {members(full)} is not feasible")
    for v in members(Q):
        if oracle.feasible(full & ~(1 << v)):
            raise PreconditionError(f"Q is not node-minimal: vertex {v} is redundant")

    size = len(C)
    gammas = [gamma(oracle.phase_edges, c) for c in C]
    critical = 0
    for gm in gammas:
        critical |= Q & gm
    report.add(
        "main_counting",
        instance_id,
        popcount(critical) <= MAIN_COUNTING_FACTOR * size,
        {"critical": members(critical), "violated": size},
    )
    if inst.planar:
        degree = sum(popcount(Q & gm) for gm in gammas)
        report.add(
            "planar_degree", instance_id, degree <= PLANAR_DEGREE_FACTOR * size, {"degree": degree, "violated": size}
        )
    if not C:
        return report

    base = restrict_edges(oracle.phase_edges, X)
    K = restrict_edges(oracle.phase_edges, full) - base
    red = {e for e in K if any(crosses(e, c) for c in C)}
    blue = K - red

    def h_prime(b: Biset) -> bool:
        return oracle.in_domain(b) and oracle.h(b) == 1 and delta_size(base, b) == 0

    F = _prune(oracle, base, set(K), blue)
    F_prime = _prune(oracle, base, F, red & F)

    def tree(label: str, cover_edges: Set[Edge], keys: Set[Edge]):
        try:
            family = uncross_witness_family(cover_edges, keys, _witnesses(oracle, base, cover_edges, keys), h_prime)
        except InternalInvariantError as e:
            report.add(f"{label}_uncrossing", instance_id, False, str(e))
            return None
        return _audit_tree(report, label, instance_id, g, C, cover_edges, family, h_prime)

    blue_keys = F & blue
    tree("blue", F, blue_keys)
    red_tree = tree("red", F_prime, F_prime & red)

    touched = set()
    for u, v in blue_keys:
        touched.update((u, v))
    regular = [u for u in members(critical) if u in touched]
    special = [u for u in members(critical) if u not in touched]
    report.add("regular_count", instance_id, len(regular) <= REGULAR_FACTOR * size, {"regular": regular})
    report.add("special_count", instance_id, len(special) <= SPECIAL_FACTOR * size, {"special": special})

    crossing = sum(delta_size(F_prime, c) for c in C)
    report.add("red_crossing", instance_id, crossing <= 2 * size, {"crossing": crossing, "violated": size})
    if red_tree is not None:
        forest, owning = red_tree
        degrees = sum(forest.degree(b) for b in owning)
        chain = crossing <= degrees <= 2 * len(owning) <= 2 * size
        report.add(
            "red_degree_chain",
            instance_id,
            chain,
            {"crossing": crossing, "degrees": degrees, "owners": len(owning), "violated": size},
        )
    logger.debug(
        "counting audit %s: |C|=%d critical=%d regular=%d special=%d",
        instance_id,
        size,
        popcount(critical),
        len(regular),
        len(special),
    )
    return report


def audit_cover_run(
    inst: Instance, oracle: ViolatedBisetsOracle, result: CoverResult, instance_id: str = ""
) -> AuditReport:
    """Engine invariants from the iteration log, then counting on every iteration."""
    g = inst.graph
    report = AuditReport()

    negative = [(r.index, v) for r in result.iterations for v in range(g.n) if r.residual[v] < 0]
    report.add("dual_feasibility", instance_id, not negative, negative)

    slack = [v for v in members(result.bought) if result.dual.residual[v] != 0]
    report.add("complementary_slackness", instance_id, not slack, slack)

    clash = [(r.index, b) for r in result.iterations for b, gm in zip(r.family, r.gammas) if gm & r.P_before]
    report.add("no_neighbor", instance_id, not clash, clash)

    overlapping = [
        r.index
        for r in result.iterations
        if any(a.inner & b.inner for a, b in itertools.combinations(r.family, 2))
    ]
    report.add("disjoint_inner_parts", instance_id, not overlapping, overlapping)

    report.add("cover_feasible", instance_id, oracle.feasible(result.Q), members(result.Q))
    redundant = [v for v in members(result.bought) if oracle.feasible(result.Q & ~(1 << v))]
    report.add("reverse_delete_minimal", instance_id, not redundant, redundant)

    if inst.planar:
        heavy = []
        for r in result.iterations:
            Qi = result.Q & ~r.P_before
            degree = sum(popcount(Qi & gm) for gm in r.gammas)
            if degree > PLANAR_DEGREE_FACTOR * len(r.family):
                heavy.append((r.index, degree, len(r.family)))
        report.add("planar_charging", instance_id, not heavy, heavy)
        cost = result.cost(g)
        bound = PLANAR_DEGREE_FACTOR * result.dual_objective
        report.add("planar_dual_ratio", instance_id, cost <= bound, {"cost": cost, "dual": str(result.dual_objective)})

    for r in result.iterations:
        X = r.P_before
        Qi = result.Q & ~X
        tag = f"{instance_id}#{r.index}"
        trimmed = minimalize(oracle, X, Qi)
        if trimmed != Qi:
            logger.warning("%s: re-minimalized %s to %s before counting", tag, members(Qi), members(trimmed))
            report.add("reminimalized", tag, True)
        report.extend(audit_counting(inst, oracle, X, trimmed, r.family, tag))
    return report


def audit_solve(solved: SolveReport, instance_id: str = "") -> AuditReport:
    """Feasibility of the final solution plus the cover audits of every phase."""
    inst = solved.instance
    started = flow_runs()
    report = AuditReport()
    feasible, missing = check_feasibility(inst, solved.solution)
    witness = missing and {"pair": missing.pair, "cut": missing.certificate}
    report.add("solution_feasible", instance_id, feasible, witness)
    for phase in solved.phases:
        tag = f"{instance_id}:{phase.stage}{phase.ell}"
        report.extend(audit_cover_run(inst, phase.oracle, phase.result, tag))
    report.counters["flows_run"] += flow_runs() - started
    solved.audit_flags = report.flags()
    logger.info("audit %s: %d checks, %d failed", instance_id, len(report.checks), len(report.failures))
    return report
