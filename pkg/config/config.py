"""
Configuration settings for the delay-tolerant space-time code toolkit.

This module contains all configurable parameters including:
- File paths for reports and logs
- Numerical tolerances shared by the certification oracles
- Search budgets for exhaustive / sampled difference sweeps
- Monte Carlo defaults for the relay -> destination link simulator
- Experiment presets loaded from config_simulation.yaml
"""

import os
from pathlib import Path
from typing import Any, Dict

import yaml
from dotenv import load_dotenv

# =============================================================================
# PROJECT PATHS
# =============================================================================

# Base directory (project root)
BASE_DIR = Path(__file__).parent.parent.absolute()

# Load environment variables
load_dotenv(BASE_DIR / ".env")

# Reports directory (certification reports, simulation CSVs)
REPORTS_DIR = BASE_DIR / "reports"
CERTIFICATION_DIR = REPORTS_DIR / "certification"
SIMULATION_DIR = REPORTS_DIR / "simulation"

# Experiment presets
PRESETS_FILE = Path(__file__).parent / "config_simulation.yaml"

# =============================================================================
# NUMERICAL TOLERANCES
# =============================================================================

# Singular values below RANK_TOL * sigma_max count as zero
RANK_TOL = 1e-9

# ||A A^H - I||_max bounds for closed-form and 5-decimal printed generators
UNITARY_TOL = 1e-12
NUMERIC_UNITARY_TOL = 1e-4

# Slack when comparing against exact constants (1/20, 1/49, ...)
CONSTANT_TOL = 1e-9

# =============================================================================
# SEARCH BUDGETS
# =============================================================================

# Difference sweeps are exhaustive when |alphabet|^k stays below this
EXHAUSTIVE_LIMIT = 10**7

# Random difference vectors drawn when the sweep is not exhaustive
DEFAULT_BUDGET = 10**6

# Vectors encoded per vectorized chunk during sweeps
SWEEP_CHUNK = 4096

# =============================================================================
# SIMULATION SETTINGS
# =============================================================================

# Seed fallback (STC_SEED overrides the built-in default)
DEFAULT_SEED = int(os.environ.get("STC_SEED", "2009"))

# Stopping rule: stop an SNR point at MIN_ERRORS codeword errors or
# MAX_CODEWORDS transmitted codewords, whichever comes first
MIN_ERRORS = 100
MAX_CODEWORDS = 10**6

# Codewords per random sub-stream; the unit of work handed to a worker
BATCH_SIZE = 256

# Worker cap (1 = serial)
MAX_THREADS = int(os.environ.get("STC_THREADS", "1"))

# Default Eb/N0 grid (dB): start, stop (inclusive), step
DEFAULT_SNR_RANGE = (4.0, 20.0, 2.0)

# Confidence level for BER/CER intervals
CONFIDENCE_LEVEL = 0.95

# SimResult CSV header
SIM_CSV_COLUMNS = ["code", "snr_db", "codewords", "bit_errors", "cw_errors", "ber", "cer"]

# =============================================================================
# LOGGING SETTINGS
# =============================================================================

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVEL = os.environ.get("STC_LOG_LEVEL", "INFO")
LOG_FILE = BASE_DIR / "logs" / "stc.log"

# =============================================================================
# HELPER FUNCTIONS
# =============================================================================

def ensure_directories():
    """Create all required directories if they don't exist."""
    directories = [
        REPORTS_DIR,
        CERTIFICATION_DIR,
        SIMULATION_DIR,
        LOG_FILE.parent,
    ]
    for directory in directories:
        directory.mkdir(parents=True, exist_ok=True)


def load_experiment_presets(path: Path = PRESETS_FILE) -> Dict[str, Dict[str, Any]]:
    """Load the named simulation presets (one per comparison figure)."""
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    return data.get("experiments", {})


def get_certification_report_path(name: str) -> Path:
    """Get the path for a certification report."""
    return CERTIFICATION_DIR / f"{name}.txt"


def get_simulation_csv_path(name: str) -> Path:
    """Get the path for a simulation CSV."""
    return SIMULATION_DIR / f"{name}.csv"


# Initialize directories on import
ensure_directories()
