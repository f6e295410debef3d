"""
Constants for the BisetSNDP application.
"""

# Exhaustive biset enumeration visits 3^n bisets
MAX_ENUM_VERTICES = 12

# Exact optimum enumerates subsets of the positive-weight non-terminals
MAX_EXACT_CANDIDATES = 20

# Augmentation phases (maximum demand)
MAX_PHASES = 30

# Planar constants certified by the audits
MAIN_COUNTING_FACTOR = 4
PLANAR_DEGREE_FACTOR = 10
REGULAR_FACTOR = 2
SPECIAL_FACTOR = 2
VC012_PLANAR_RATIO = 13

DEFAULT_WEIGHT_RANGE = (1, 100)
DEFAULT_FAMILY = "grid"
DEFAULT_KIND = "ELEM"

# Probability that a non-terminal is non-reliable in generated ELEM instances
NON_RELIABLE_FRACTION = 0.5

THREADS_ENV_VAR = "BISET_SNDP_THREADS"

CSV_COLUMNS = [
    "seed",
    "family",
    "n",
    "m",
    "kind",
    "k",
    "alg_weight",
    "exact_weight",
    "dual_lb",
    "ratio_exact",
    "ratio_dual",
    "phases",
    "iters",
    "audit_pass",
]

# Exit codes
EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INFEASIBLE = 2

# Text constants for the command line
TEXT_EN = {
    "app_title": "🔗 BISETSNDP",
    "generated": "🧩 Generated {family} instance: n={n} m={m} demands={demands} -> {path}",
    "loading": "📂 Loading instance: {path}",
    "solving": "⚙️  Solving {kind} instance (n={n}, k={k})...",
    "summary_line": "weight={weight} dual_lb={dual_lb} ratio_vs_dual={ratio}",
    "report_written": "✅ Report written: {path}",
    "trace_written": "📝 Trace written: {path}",
    "infeasible": "❌ Infeasible: pair ({s},{t}) requires {required}, graph allows {achieved}; cut {cut}",
    "invalid": "❌ Invalid instance: {error}",
    "internal": "💥 Internal invariant violated: {error}",
    "audit_summary": "📊 Audit: {passed} passed, {failed} failed ({total} checks)",
    "audit_failure": "   - {name} [{instance}]: {witness}",
    "bench_seed": "  📝 seed {seed}: weight={weight} exact={exact} audit={audit}",
    "bench_done": "🎉 Bench finished: {rows} rows -> {path}",
    "dot_written": "✅ DOT written: {path}",
    "bad_threads": "❌ {var} must be a positive integer, got '{value}'",
    "bad_seeds": "❌ --seeds must look like A..B, got '{value}'",
}
