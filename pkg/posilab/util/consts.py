"""Const values."""

from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

TEMPLATE_DIR = BASE_DIR / "report/templates"

# float boundary tolerance unless POSILAB_EPS is set
DEFAULT_EPS = 1e-12

# truncation orders of the finite-section oracle
DEFAULT_LADDER = (16, 32, 64, 128, 256)
MAX_TRUNCATION = 512
# longest series the oracle expands internally to keep tails converged
MAX_INTERNAL_LENGTH = 1 << 15

SCHEMA_VERSION = "1.0"

# cli exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_SELFMAP = 2
EXIT_MISMATCH = 3
