import os
from dotenv import load_dotenv

load_dotenv()

# ── Discretization ───────────────────────────────────────────────────────────

DEFAULT_DEGREE: int = int(os.getenv("SCHOTTKY_DEGREE", "16"))
ACCEPTANCE_DEGREE: int = 24
CIRCLE_RATIO: float = 0.7
MIN_CIRCLE_SAMPLES: int = 64
TRUNCATION_MASS_LIMIT: float = 1e-8

# ── Word combinatorics ───────────────────────────────────────────────────────

PARTITION_MAX_DEPTH: int = int(os.getenv("SCHOTTKY_MAX_DEPTH", "64"))
POWER_PAIRS_CAP: int = int(os.getenv("SCHOTTKY_PAIRS_CAP", "20000"))
MAX_ENUMERATION_DEPTH: int = 12
UNI_GRID: int = 256

# ── Permutation model ────────────────────────────────────────────────────────

EXHAUSTIVE_CAP: int = 10**7

# ── Contours and quadrature ──────────────────────────────────────────────────

CONTOUR_NODES: int = int(os.getenv("SCHOTTKY_CONTOUR_NODES", "256"))
MAX_CONTOUR_NODES: int = 4096
JENSEN_NODES: int = 1024
BOUNDARY_ZERO_RATIO: float = 1e-10
INTEGER_TOLERANCE: float = 1e-3
QUAD_RADIAL: int = 32
QUAD_ANGULAR: int = 64
QUAD_CHANGE_LIMIT: float = 5e-3
IMAGINARY_RESIDUAL_LIMIT: float = 1e-8
LOCATE_MAX_DEPTH: int = 40
NEWTON_MAX_STEPS: int = 50
PERRON_TOLERANCE: float = 1e-8

# ── Runtime ──────────────────────────────────────────────────────────────────

STRICT_MODE: bool = os.getenv("SCHOTTKY_STRICT", "0").lower() in ("1", "true", "yes")
JOBS: int = int(os.getenv("SCHOTTKY_JOBS", str(os.cpu_count() or 1)))
OUTPUT_ROOT: str = os.getenv("SCHOTTKY_OUTPUT_ROOT", "runs")
LOG_LEVEL: str = os.getenv("SCHOTTKY_LOG_LEVEL", "INFO")
