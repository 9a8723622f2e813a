APP_NAME = "csbm_lab"
CLI_NAME = "csbm"
DEFAULT_SETTINGS_PATH = ".csbm/config.toml"
DEFAULT_JOURNAL_DIR = ".csbm"
THREADS_ENV_VAR = "CSBM_THREADS"

# Exhaustive ML refuses graphs above this many vertices.
DEFAULT_EXACT_CAP = 24
DEFAULT_MAX_ROUNDS = 10_000

SCORE_TOLERANCE = 1e-9
ATOM_MERGE_TOLERANCE = 1e-12
TAIL_TOLERANCE = 1e-9
PROBABILITY_SUM_TOLERANCE = 1e-10

# e^{theta * atom} overflows float64 beyond this bracket for admissible params.
THETA_BRACKET = 64.0
THETA_XTOL = 1e-12
THETA_POLISH_XATOL = 1e-10

ORACLE_ATOM_CAP = 1_000_000
MONTE_CARLO_CHUNK = 100_000
SAMPLER_BLOCK_PAIRS = 1 << 20

DEFAULT_BOUNDS_MAX_K = 10
DELTA_BOUND_MIN_N = 16

SWEEP_CSV_HEADER = (
    "n",
    "scale",
    "divergence",
    "success_rate",
    "failure_event_rate",
    "mean_score_gap",
    "trials",
    "seed",
)
