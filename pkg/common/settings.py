"""
Configuration surface for the dpp-impute pipeline.

Operational settings (log level, log file, report directory) come from the
environment, optionally through a .env file. Numerical tolerances and protocol
defaults are fixed module-level constants so tests can reference them by name.

Usage:
    from common import settings
    if abs(x) <= settings.SYMMETRY_TOL: ...
"""

import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Operational settings
LOG_LEVEL = os.getenv("DPP_LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("DPP_LOG_FILE") or None
REPORT_DIR = os.getenv("DPP_REPORT_DIR", "reports")

# Linear algebra tolerances
SYMMETRY_TOL = 1e-9
PSD_TOL = 1e-9
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
QR_RANK_TOL = 1e-10
DET_PIVOT_FLOOR = 1e-300
PINV_TOL = 1e-10
RANK_TOL = 1e-10
TIE_TOL = 1e-12

# Quantum simulation tolerances
UNIT_NORM_TOL = 1e-9
ORTHONORMAL_TOL = 1e-8
STATE_NORM_TOL = 1e-9

# Capacity bounds
BRUTEFORCE_MAX_N = 22
LOG_SPACE_MIN_N = 50
STATEVECTOR_MAX_QUBITS = 14

# Protocol defaults ("10 trees", "batches of 150 points", "10 iterations")
DEFAULT_N_TREES = 10
DEFAULT_BATCH_SIZE = 150
DEFAULT_N_ITERATIONS = 10
DEFAULT_PMM_DONORS = 5
DEFAULT_MIN_SAMPLES_LEAF = 5
DEFAULT_SHOTS = 1000
DEFAULT_REPEATS = 10

# Seed used for every stream consumed by deterministic samplers
DETERMINISTIC_STREAM_KEY = 0

# Downstream gradient-boosted trees
GBT_N_ROUNDS = 100
GBT_LEARNING_RATE = 0.3
GBT_MAX_DEPTH = 3

# Evaluation protocol
N_FOLDS = 3
MIN_EVAL_ROWS = 30
