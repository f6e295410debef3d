"""
Main CLI entry point for BisetSNDP.
"""

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from .aggregator import BenchConfig, parse_seed_range, run_bench, worker_count
from .constants import (
    DEFAULT_FAMILY,
    DEFAULT_KIND,
    DEFAULT_WEIGHT_RANGE,
    EXIT_INFEASIBLE,
    EXIT_INTERNAL,
    EXIT_OK,
    TEXT_EN,
    THREADS_ENV_VAR,
)
from .cover import fraction_text
from .errors import InfeasibleInstanceError, InvalidInstanceError, SizeRefusalError, SNDPError
from .generators import FAMILIES, GeneratorSpec, generate
from .graph import ProblemKind, as_mask, load, preprocess, save
from .oracle import audit_solve, exact_opt_bruteforce
from .output_formats import WRITERS, format_ratio, write_dot, write_jsonl, write_report_json
from .sndp import solve
from .tree_generator import render_laminar_forest

logger = logging.getLogger(__name__)

KINDS = [k.value for k in ProblemKind]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="BisetSNDP - node-weighted survivable network design on planar graphs")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO logs, -vv for DEBUG (stderr)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a planar instance")
    gen.add_argument("--family", choices=sorted(FAMILIES), default=DEFAULT_FAMILY)
    gen.add_argument("--n", type=int, default=9, help="Number of vertices (grids round down to a full lattice)")
    gen.add_argument("--demands", type=int, default=1, help="Number of demand pairs")
    gen.add_argument("--kmax", type=int, default=1, help="Largest demand value")
    gen.add_argument("--kind", choices=KINDS, default=DEFAULT_KIND)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--weights", type=int, nargs=2, metavar=("LO", "HI"), default=list(DEFAULT_WEIGHT_RANGE))
    gen.add_argument("--out", required=True, help="Instance JSON path")

    solve_cmd = sub.add_parser("solve", help="Solve an instance and write the report")
    solve_cmd.add_argument("--in", dest="input", required=True, help="Instance JSON path")
    solve_cmd.add_argument("--out", help="SolveReport JSON path")
    solve_cmd.add_argument("--trace", help="JSON-lines trace of every primal-dual iteration")
    solve_cmd.add_argument("--exact", action="store_true", help="Exact optimum for the ratio certificate")
    solve_cmd.add_argument("--audit", action="store_true", help="Audit the run and record its flags in the report")

    audit = sub.add_parser("audit", help="Solve and audit every phase and iteration")
    audit.add_argument("--in", dest="input", required=True, help="Instance JSON path")
    audit.add_argument("--report", help="Audit records as JSON lines")
    audit.add_argument("--show-trees", action="store_true", help="Print every witness tree")

    bench = sub.add_parser("bench", help="Generate, solve and audit a seed range")
    bench.add_argument("--seeds", required=True, help="Seed range A..B (inclusive)")
    bench.add_argument("--family", choices=sorted(FAMILIES), default=DEFAULT_FAMILY)
    bench.add_argument("--kind", choices=KINDS, default=DEFAULT_KIND)
    bench.add_argument("--n", type=int, default=9)
    bench.add_argument("--demands", type=int, default=2)
    bench.add_argument("--kmax", type=int, default=2)
    bench.add_argument("--exact", action="store_true", help="Also compute the exact optimum by enumeration")
    bench.add_argument("--format", choices=sorted(WRITERS), default="csv", help="Output format (default: csv)")
    bench.add_argument("--out", required=True)

    dot = sub.add_parser("export-dot", help="Draw an instance and a solution as Graphviz DOT")
    dot.add_argument("--in", dest="input", required=True, help="Instance JSON path")
    dot.add_argument("--solution", help="SolveReport JSON; solved on the fly when omitted")
    dot.add_argument("--out", required=True)
    return parser


def configure_logging(verbose: int):
    level = logging.WARNING if verbose <= 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _infeasible_message(e: InfeasibleInstanceError) -> str:
    s, t = e.pair if e.pair is not None else ("?", "?")
    cut = e.certificate.describe() if hasattr(e.certificate, "describe") else e.certificate
    return TEXT_EN["infeasible"].format(s=s, t=t, required=e.required, achieved=e.achieved, cut=cut)


def cmd_gen(args) -> int:
    spec = GeneratorSpec(
        args.family, args.n, tuple(args.weights), args.demands, args.kmax, args.seed, ProblemKind(args.kind)
    )
    inst = generate(spec)
    save(inst, args.out)
    print(
        TEXT_EN["generated"].format(
            family=args.family, n=inst.graph.n, m=len(inst.graph.edges), demands=len(inst.demands), path=args.out
        )
    )
    return EXIT_OK


def _print_audit_summary(audit) -> bool:
    failed = audit.failures
    total = len(audit.checks)
    print(TEXT_EN["audit_summary"].format(passed=total - len(failed), failed=len(failed), total=total))
    for check in failed:
        record = check.to_dict()
        print(TEXT_EN["audit_failure"].format(name=check.name, instance=check.instance, witness=record["witness"]))
    return not failed


def cmd_solve(args) -> int:
    print(TEXT_EN["loading"].format(path=args.input))
    inst = load(args.input)
    print(TEXT_EN["solving"].format(kind=inst.kind.value, n=inst.graph.n, k=inst.k))
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as trace:
            report = solve(inst, trace)
        print(TEXT_EN["trace_written"].format(path=args.trace))
    else:
        report = solve(inst)
    if args.exact:
        try:
            report.exact_bound, _ = exact_opt_bruteforce(inst)
        except SizeRefusalError as e:
            logger.warning("exact optimum skipped: %s", e)
    audited = _print_audit_summary(audit_solve(report, args.input)) if args.audit else True
    if args.out:
        write_report_json(report.to_dict(), args.out)
        print(TEXT_EN["report_written"].format(path=args.out))
    print(
        TEXT_EN["summary_line"].format(
            weight=report.weight,
            dual_lb=fraction_text(report.dual_lower_bound),
            ratio=format_ratio(report.weight, report.dual_lower_bound),
        )
    )
    return EXIT_OK if audited else EXIT_INTERNAL


def cmd_audit(args) -> int:
    print(TEXT_EN["loading"].format(path=args.input))
    inst = load(args.input)
    audit = audit_solve(solve(inst), args.input)
    if args.report:
        write_jsonl(audit.to_records(), args.report)
        print(TEXT_EN["report_written"].format(path=args.report))
    if args.show_trees:
        for title, forest in audit.trees:
            print(render_laminar_forest(forest, title))
            print("")
    return EXIT_OK if _print_audit_summary(audit) else EXIT_INTERNAL


def cmd_bench(args) -> int:
    try:
        seeds = parse_seed_range(args.seeds)
    except ValueError:
        print(TEXT_EN["bad_seeds"].format(value=args.seeds))
        return EXIT_INTERNAL
    try:
        workers = worker_count()
    except ValueError:
        print(TEXT_EN["bad_threads"].format(var=THREADS_ENV_VAR, value=os.environ.get(THREADS_ENV_VAR)))
        return EXIT_INTERNAL
    config = BenchConfig(
        args.family, ProblemKind(args.kind), args.n, args.demands, args.kmax, DEFAULT_WEIGHT_RANGE, args.exact
    )
    rows = run_bench(seeds, config, workers)
    for row in rows:
        print(
            TEXT_EN["bench_seed"].format(
                seed=row["seed"], weight=row["alg_weight"], exact=row["exact_weight"], audit=row["audit_pass"]
            )
        )
    WRITERS[args.format](rows, args.out)
    print(TEXT_EN["bench_done"].format(rows=len(rows), path=args.out))
    return EXIT_OK if all(row["audit_pass"] for row in rows) else EXIT_INTERNAL


def cmd_export_dot(args) -> int:
    inst = preprocess(load(args.input))
    if args.solution:
        with open(args.solution, "r", encoding="utf-8") as f:
            chosen = json.load(f)["solution"]
        outside = [v for v in chosen if not 0 <= v < inst.graph.n]
        if outside:
            raise InvalidInstanceError(f"solution vertices {outside} are not in the preprocessed instance")
        solution = as_mask(chosen)
    else:
        solution = solve(inst).solution
    write_dot(inst, solution, args.out)
    print(TEXT_EN["dot_written"].format(path=args.out))
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "audit": cmd_audit,
    "bench": cmd_bench,
    "export-dot": cmd_export_dot,
}


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    print(TEXT_EN["app_title"])
    print("=" * 50)
    try:
        return COMMANDS[args.command](args)
    except InfeasibleInstanceError as e:
        print(_infeasible_message(e))
        return EXIT_INFEASIBLE
    except InvalidInstanceError as e:
        print(TEXT_EN["invalid"].format(error=e))
        return EXIT_INTERNAL
    except SNDPError as e:
        print(TEXT_EN["internal"].format(error=e))
        return EXIT_INTERNAL


def main(argv: Optional[List[str]] = None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
