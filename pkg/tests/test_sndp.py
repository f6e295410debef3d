import io
import json
from fractions import Fraction

import pytest

from BisetSNDP.biset import Biset
from BisetSNDP.constants import PLANAR_DEGREE_FACTOR, VC012_PLANAR_RATIO
from BisetSNDP.errors import DomainError, InfeasibleInstanceError, InvalidInstanceError, PreconditionError
from BisetSNDP.generators import GeneratorSpec, generate
from BisetSNDP.graph import ProblemKind, members, preprocess, restrict_edges
from BisetSNDP.oracle import (
    check_function_property,
    enumerate_bisets,
    exact_opt_bruteforce,
    minimal_violated_bruteforce,
    minimal_violated_by_enumeration,
    minimal_violated_vc_bruteforce,
)
from BisetSNDP.sndp import (
    PhaseState,
    elem_violated_bisets,
    f_ell,
    h_ell_unclamped,
    h_ell_value,
    r_elem,
    r_ell,
    solve,
    solve_ec_sndp,
    solve_elem_sndp,
    solve_vc012,
)

from .conftest import make_instance


def test_square_ec(square_ec):
    report = solve_ec_sndp(square_ec)
    assert report.weight == 2
    assert members(report.solution) == [0, 1, 2, 3]
    assert [p.ell for p in report.phases] == [1, 2]
    assert [p.cost for p in report.phases] == [1, 1]
    assert report.dual_lower_bound == 2
    assert report.ratio_vs_dual == 1
    assert report.iterations == 2


def test_square_elem(square_elem):
    report = solve_elem_sndp(square_elem)
    assert report.weight == 2
    assert members(report.solution) == [0, 1, 2, 3]


def test_square_vc(square_vc):
    report = solve_vc012(square_vc)
    assert report.weight == 2
    assert [p.stage for p in report.phases] == ["steiner", "vc2"]
    assert report.phases[0].result.selection_order == [(1, 1)]
    assert report.phases[1].result.selection_order == [(1, 3)]


def test_dispatch_by_kind(square_ec, square_vc, path_elem):
    assert solve(square_ec).weight == 2
    assert solve(square_vc).weight == 2
    assert solve(path_elem).weight == 5


def test_single_demand_path_buys_the_middle_vertex(path_elem):
    report = solve(path_elem)
    assert members(report.solution) == [0, 1, 2]
    assert report.dual_lower_bound == 5


def test_already_satisfied_demand_costs_nothing():
    # 0-1 reliable-reliable edge is subdivided by a free vertex
    inst = make_instance(2, [(0, 1)], [3, 4], [(0, 1, 1)])
    report = solve(inst)
    assert report.weight == 0
    assert report.instance.graph.n == 3
    assert report.iterations == 0


def test_infeasible_demand_reports_certificate():
    inst = make_instance(3, [(0, 1), (1, 2)], [0, 1, 0], [(0, 2, 2)], kind="EC")
    with pytest.raises(InfeasibleInstanceError) as info:
        solve(inst)
    e = info.value
    assert e.pair == (0, 2)
    assert e.required == 2
    assert e.achieved == 1
    assert isinstance(e.certificate, Biset)


def test_disconnected_demand_is_infeasible():
    inst = make_instance(4, [(0, 1), (2, 3)], [0, 1, 1, 0], [(0, 3, 1)], kind="EC")
    with pytest.raises(InfeasibleInstanceError) as info:
        solve(inst)
    assert info.value.achieved == 0


def test_demand_above_phase_cap():
    inst = make_instance(2, [(0, 1)], [0, 0], [(0, 1, 31)], kind="EC")
    with pytest.raises(InvalidInstanceError):
        solve(inst)


def test_solver_kind_checks(square_elem, square_ec):
    with pytest.raises(PreconditionError):
        solve_ec_sndp(square_elem)
    with pytest.raises(PreconditionError):
        solve_vc012(square_ec)


def test_trace_lines_name_phase_and_stage(square_vc):
    trace = io.StringIO()
    solve(square_vc, trace)
    lines = [json.loads(line) for line in trace.getvalue().splitlines()]
    assert [(line["stage"], line["phase"], line["iter"]) for line in lines] == [("steiner", 1, 1), ("vc2", 2, 1)]
    assert lines[0]["epsilon"] == "1/2"


def test_report_dict(square_ec):
    doc = solve(square_ec).to_dict()
    assert doc["weight"] == 2
    assert doc["dual_lower_bound"] == "2/1"
    assert doc["ratio_vs_dual"] == "1/1"
    assert doc["solution"] == [0, 1, 2, 3]
    assert doc["phases"][0]["selected"] == [1]
    assert doc["phases"][1]["selected"] == [3]
    assert json.loads(json.dumps(doc)) == doc


def test_requirement_functions(square_ec):
    b = Biset.of([0], [0, 1])
    assert r_elem(square_ec, b) == 2
    assert r_ell(square_ec, 1, b) == 1
    assert f_ell(square_ec, 2, b) == 1
    assert r_elem(square_ec, Biset.of([0, 2], [0, 2])) == 0


def test_phase_function_values(square_elem):
    inst = preprocess(square_elem)
    state = PhaseState.start(inst.graph, 2, 0b0111)
    assert state.H_edges == frozenset({(0, 1), (1, 2)})
    assert h_ell_value(state, inst, Biset.of([0], [0])) == 1
    assert h_ell_value(state, inst, Biset.of([0], [0, 1])) == 1
    assert h_ell_value(state, inst, Biset.of([0], [0, 3])) == 0
    assert h_ell_unclamped(state, inst, Biset.of([0], [0, 3])) == 0
    assert h_ell_value(state, inst, Biset.of([1], [1])) == 0
    assert h_ell_unclamped(state, inst, Biset.of([1], [1])) == -2
    with pytest.raises(DomainError):
        h_ell_value(state, inst, Biset.of([1], [1, 2]))


def _oracle_matches_enumeration(solved):
    inst = solved.instance
    for phase in solved.phases:
        state = phase.oracle.state
        for record in phase.result.iterations:
            assert record.family == minimal_violated_bruteforce(state, inst, record.P_before)
            assert elem_violated_bisets(state, inst, record.P_before) == record.family
        assert minimal_violated_bruteforce(state, inst, phase.result.P) == []


def test_flow_oracle_matches_enumeration_on_squares(square_ec, square_elem):
    _oracle_matches_enumeration(solve(square_ec))
    _oracle_matches_enumeration(solve(square_elem))


@pytest.mark.parametrize("seed", range(1, 9))
def test_flow_oracle_matches_enumeration_on_generated(seed):
    family = "grid" if seed % 2 else "cycle_chords_planar"
    inst = generate(
        GeneratorSpec(family=family, n=6, weight_range=(1, 9), demand_count=2, k_max=2, seed=seed, kind=ProblemKind.EC)
    )
    _oracle_matches_enumeration(solve(inst))


def test_vc_oracles_match_enumeration(square_vc):
    solved = solve(square_vc)
    inst = solved.instance
    first, second = solved.phases
    forest = first.oracle
    for record in first.result.iterations:
        present = restrict_edges(forest.phase_edges, record.P_before)
        assert record.family == minimal_violated_by_enumeration(inst.graph, forest.h, present, forest.in_domain)
    F1 = second.oracle.base_edges
    for record in second.result.iterations:
        assert record.family == minimal_violated_vc_bruteforce(F1, inst, record.P_before)


def test_ratio_against_dual_is_exact_fraction(square_ec):
    assert isinstance(solve(square_ec).ratio_vs_dual, Fraction)


@pytest.mark.parametrize("seed", range(1, 7))
@pytest.mark.parametrize("kind", [ProblemKind.EC, ProblemKind.ELEM])
def test_weight_within_planar_bound_of_optimum(seed, kind):
    family = "grid" if seed % 2 else "random_planar_triangulation"
    spec = GeneratorSpec(family=family, n=8, weight_range=(1, 20), demand_count=2, k_max=2, seed=seed, kind=kind)
    inst = generate(spec)
    solved = solve(inst)
    exact, _ = exact_opt_bruteforce(inst)
    assert exact <= solved.weight <= PLANAR_DEGREE_FACTOR * inst.k * exact
    for phase in solved.phases:
        assert phase.cost <= PLANAR_DEGREE_FACTOR * phase.dual_lower_bound


@pytest.mark.parametrize("seed", range(1, 7))
def test_vc012_within_planar_bound_of_optimum(seed):
    family = "grid" if seed % 2 else "cycle_chords_planar"
    kind = ProblemKind.VC012
    spec = GeneratorSpec(family=family, n=8, weight_range=(1, 20), demand_count=2, k_max=2, seed=seed, kind=kind)
    inst = generate(spec)
    solved = solve(inst)
    exact, _ = exact_opt_bruteforce(inst)
    assert exact <= solved.weight <= VC012_PLANAR_RATIO * exact


def kite():
    """Square 0-1-2-3 plus apex 4 on the non-reliable corners 1 and 3."""
    return make_instance(
        5,
        [(0, 1), (1, 2), (2, 3), (0, 3), (1, 4), (3, 4)],
        [0, 2, 0, 3, 0],
        [(0, 2, 2), (0, 4, 1), (2, 4, 1)],
        reliable=[True, False, True, False, True],
    )


def elem_instances():
    yield kite()
    for seed in (1, 2, 3):
        yield generate(GeneratorSpec(family="grid", n=6, demand_count=2, k_max=2, seed=seed, kind=ProblemKind.ELEM))


def p_elem_domain(inst):
    return list(enumerate_bisets(inst.graph.vertex_mask, restrict_P_elem=True, g=inst.graph))


def test_kite_has_boundary_candidates():
    domain = p_elem_domain(kite())
    assert any(b.boundary for b in domain)
    assert all(not (b.boundary & 0b10101) for b in domain)


@pytest.mark.parametrize("inst", list(elem_instances()))
def test_requirement_is_skew_bisupermodular_on_P_elem(inst):
    report = check_function_property("skew_bisupermodular", lambda b: r_elem(inst, b), p_elem_domain(inst))
    assert report.passed, report.to_records()


@pytest.mark.parametrize("inst", list(elem_instances()))
@pytest.mark.parametrize("ell", [1, 2])
def test_phase_requirement_is_skew_bisupermodular_on_P_elem(inst, ell):
    domain = p_elem_domain(inst)
    assert check_function_property("skew_bisupermodular", lambda b: r_ell(inst, ell, b), domain).passed
    assert check_function_property("skew_bisupermodular", lambda b: f_ell(inst, ell, b), domain).passed


@pytest.mark.parametrize("ell", [1, 2])
@pytest.mark.parametrize("bought", [0b10101, 0b11101, 0b11111])
def test_residual_phase_function_is_skew_bisupermodular(ell, bought):
    inst = kite()
    state = PhaseState.start(inst.graph, ell, bought)
    report = check_function_property(
        "skew_bisupermodular", lambda b: h_ell_unclamped(state, inst, b), p_elem_domain(inst)
    )
    assert report.passed, report.to_records()


def test_requirement_skew_fails_off_P_elem():
    # a reliable vertex on the boundary breaks the inequality
    inst = make_instance(4, [(0, 1), (1, 2), (2, 3)], [0, 1, 1, 0], [(0, 3, 2), (1, 2, 1)], kind="EC")
    report = check_function_property(
        "skew_bisupermodular", lambda b: r_elem(inst, b), enumerate_bisets(inst.graph.vertex_mask)
    )
    assert not report.passed


def test_ratio_certificate_uses_exact_bound(square_ec):
    solved = solve(square_ec)
    assert solved.ratio_certificate == 1
    solved.exact_bound = 2
    # both phases have dual 1, so each is raised to the optimum 2
    assert solved.ratio_certificate == Fraction(1, 2)
    doc = solved.to_dict()
    assert doc["exact_bound"] == 2
    assert doc["ratio_certificate"] == "1/2"
    assert doc["audit_flags"] == {}
