"""
Bench loop: generate, solve, optionally solve exactly, audit, one row per seed.
"""

import logging
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from .constants import DEFAULT_FAMILY, DEFAULT_KIND, DEFAULT_WEIGHT_RANGE, THREADS_ENV_VAR
from .cover import fraction_text
from .errors import SizeRefusalError
from .generators import GeneratorSpec, generate
from .graph import ProblemKind
from .oracle import audit_solve, exact_opt_bruteforce
from .output_formats import format_ratio
from .sndp import solve

logger = logging.getLogger(__name__)

_SEED_RANGE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")


@dataclass(frozen=True)
class BenchConfig:
    family: str = DEFAULT_FAMILY
    kind: ProblemKind = ProblemKind(DEFAULT_KIND)
    n: int = 9
    demand_count: int = 2
    k_max: int = 2
    weight_range: Tuple[int, int] = DEFAULT_WEIGHT_RANGE
    exact: bool = False

    def spec(self, seed: int) -> GeneratorSpec:
        return GeneratorSpec(self.family, self.n, self.weight_range, self.demand_count, self.k_max, seed, self.kind)


def parse_seed_range(text: str) -> range:
    """'A..B' -> range(A, B + 1)."""
    match = _SEED_RANGE.match(text)
    if match is None:
        raise ValueError(text)
    first, last = int(match.group(1)), int(match.group(2))
    if last < first:
        raise ValueError(text)
    return range(first, last + 1)


def worker_count(environ: Optional[Dict[str, str]] = None) -> int:
    """Pool size from BISET_SNDP_THREADS, else the CPU count; at least 1."""
    environ = os.environ if environ is None else environ
    value = environ.get(THREADS_ENV_VAR)
    if value is None or value == "":
        return max(1, os.cpu_count() or 1)
    count = int(value)
    if count < 1:
        raise ValueError(value)
    return count


def bench_row(seed: int, config: BenchConfig) -> Dict[str, Any]:
    inst = generate(config.spec(seed))
    solved = solve(inst)
    weight = solved.weight

    exact: Optional[int] = None
    if config.exact:
        try:
            exact, _ = exact_opt_bruteforce(inst)
        except SizeRefusalError as e:
            logger.warning("seed %d: exact optimum skipped: %s", seed, e)

    audit = audit_solve(solved, f"seed{seed}")
    for failure in audit.failures:
        logger.warning("seed %d: audit check %s failed at %s", seed, failure.name, failure.instance)

    dual = solved.dual_lower_bound
    return {
        "seed": seed,
        "family": config.family,
        "n": inst.graph.n,
        "m": len(inst.graph.edges),
        "kind": inst.kind.value,
        "k": inst.k,
        "alg_weight": weight,
        "exact_weight": -1 if exact is None else exact,
        "dual_lb": fraction_text(dual),
        "ratio_exact": format_ratio(weight, exact) if exact is not None else "-1",
        "ratio_dual": format_ratio(weight, dual),
        "phases": len(solved.phases),
        "iters": solved.iterations,
        "audit_pass": int(audit.passed),
    }


def run_bench(seeds: range, config: BenchConfig, workers: int = 1) -> List[Dict[str, Any]]:
    """Rows in seed order; each seed runs end to end inside one worker."""
    if workers <= 1 or len(seeds) <= 1:
        rows = [bench_row(seed, config) for seed in seeds]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
            rows = list(pool.map(bench_row, seeds, [config] * len(seeds)))
    logger.info("bench %s/%s: %d seeds with %d workers", config.family, config.kind.value, len(rows), workers)
    return sorted(rows, key=lambda row: row["seed"])
