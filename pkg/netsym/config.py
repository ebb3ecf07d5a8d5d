# ================================================
# File: netsym/config.py
# ================================================
import os

def _env_flag(name: str, default: bool = False) -> bool:
    raw = os.getenv(name, "").strip().lower()
    if not raw:
        return default
    return raw in ("1", "true", "yes", "on")

# --- Reproducibility ---
DEFAULT_SEED = 0x5EED
SEED_ENV_VAR = "NETSYM_SEED"

# --- Enumeration / size bounds ---
MONOID_ENUMERATION_BOUND = 5   # tables grow like n^(n^2)
BALANCED_PARTITION_BOUND = 12  # Bell(12) partitions
DECOMPOSE_DIM_BOUND = 64       # ambient dimension n*d
SYNCHRONY_SPACE_CAP = 1000

# --- Representation algebra ---
SPLIT_ATTEMPTS = 10       # random commutant draws before SplitFailure
ISOMORPHISM_SAMPLES = 20  # random Hom combinations tried before certification
RANDOM_COEFF_RANGE = 7    # rational coefficients drawn from [-R, R]

# --- Numerical tolerances ---
NEWTON_TOL = 1e-10
LS_NEWTON_TOL = 1e-12
LS_MAX_ITER = 50
EQUILIBRIUM_TOL = 1e-10
CLUSTER_TOL = 1e-8
CLUSTER_GAP_TOL = 1e-10
RESIDUAL_TOL = 1e-7
EQUIVARIANCE_TOL = 1e-8
BLOWUP_THRESHOLD = 1e12
FD_STEP = 1e-5

# --- Continuation ---
MIN_STEP = 1e-12
MAX_CONTINUATION_STEPS = 4000
SWITCH_PERTURBATION = 1e-6
FIT_POINTS_PER_DECADE = 8
EXPONENT_TOL = 0.05
COEFFICIENT_RTOL = 0.05

# --- Paths ---
PACKAGE_ROOT = os.path.dirname(os.path.realpath(__file__))
NETSYM_HOME = os.path.expanduser(os.getenv("NETSYM_HOME", os.path.join("~", ".netsym")))
JOB_HISTORY_FILE = os.path.join(NETSYM_HOME, "job_history.json")

# --- Jobs / service ---
MAX_CONCURRENT_JOBS = 2
JOB_HISTORY_LIMIT = 100
SERVER_HOST = "127.0.0.1"
SERVER_PORT = 8188

# --- Logging ---
VERBOSE = _env_flag("NETSYM_VERBOSE")

# --- Error code -> exit code / HTTP status ---
EXIT_CODES = {
    "validation": 2,
    "computation": 3,
    "internal": 1,
}
HTTP_STATUS = {
    "validation": 400,
    "computation": 422,
    "internal": 500,
}

# Kinds a job may run; values are the report sections they produce.
JOB_KINDS = {
    "catalogue": "catalogue",
    "decompose": "decomposition",
    "classify": "classification",
    "continue": "continuation",
}
