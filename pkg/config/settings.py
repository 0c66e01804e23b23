"""
Configuration module for TrustKey.

This module contains the configuration constants and defaults used by the
trust tree, the keying agents, the churn simulator and the CLI.

Only the log level is read from the environment (or a local .env file).
Everything that shapes results is passed explicitly so that runs stay
reproducible from their flags alone.
"""

import os
from typing import Final

# Try to load environment variables from .env file if python-dotenv is available
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # python-dotenv not installed, rely on system environment variables
    pass

# ============================================================================
# TREE CONFIGURATION
# ============================================================================

# Default number of children per node in the dissemination tree
DEFAULT_FANOUT: Final[int] = 2

# Smallest fanout for which the level formulas are defined
MIN_FANOUT: Final[int] = 2

# ============================================================================
# KEYING CONFIGURATION
# ============================================================================

# Size of the opaque key token produced by the KDC
KEY_MATERIAL_BYTES: Final[int] = 16

# Latency defaults, in simulation time units
DEFAULT_KDC_GEN: Final[int] = 1
DEFAULT_KDC_TO_SERVER: Final[int] = 1
DEFAULT_SERVER_TO_ROOT: Final[int] = 1
DEFAULT_PER_LEVEL: Final[int] = 1

# ============================================================================
# SIMULATION CONFIGURATION
# ============================================================================

# Seed used when the caller does not supply one
DEFAULT_SEED: Final[int] = 42

# Initial group size of `simulate` when no lookup table is loaded
DEFAULT_NODE_COUNT: Final[int] = 333

# Upper bound for seeds (64-bit)
MAX_SEED: Final[int] = 2**64 - 1

# Range of the random initial online times, in seconds
DEFAULT_ONLINE_TIME_LOW: Final[int] = 0
DEFAULT_ONLINE_TIME_HIGH: Final[int] = 10**6

# Share of joins that reuse an offline id when the rejoin pool is enabled
REJOIN_PROBABILITY: Final[float] = 0.5

# Group sizes and fanouts swept by default
DEFAULT_SWEEP_NODE_COUNTS: Final[tuple[int, ...]] = (10, 50, 100, 333, 1000, 5000)
DEFAULT_SWEEP_FANOUTS: Final[tuple[int, ...]] = (2, 3, 4)

# ============================================================================
# OUTPUT FORMATS
# ============================================================================

METRICS_CSV_NAME: Final[str] = "metrics.csv"
COVERAGE_CSV_NAME: Final[str] = "coverage.csv"
CONFIG_JSON_NAME: Final[str] = "config.json"

METRICS_COLUMNS: Final[tuple[str, ...]] = (
    "event_time",
    "trigger",
    "peer_id",
    "key_version",
    "tree_size",
    "height",
    "chart_time_full_coverage",
    "completion_time",
    "messages",
    "swaps",
)

COVERAGE_COLUMNS: Final[tuple[str, ...]] = ("time_unit", "nodes_covered")

LOOKUP_TABLE_COLUMNS: Final[tuple[str, ...]] = ("user_id", "online_time", "status")

SWEEP_COLUMNS: Final[tuple[str, ...]] = (
    "node_count",
    "fanout",
    "height_bound",
    "height",
    "chart_time_full_coverage",
    "completion_time",
    "messages",
    "mean_delivery_time",
    "unbalanced_height",
    "unbalanced_completion_time",
    "unbalanced_mean_delivery_time",
)

# Width, in characters, of the longest bar in the ASCII coverage chart
ASCII_CHART_WIDTH: Final[int] = 50

# ============================================================================
# VERIFY SUITE CONFIGURATION
# ============================================================================

VERIFY_QUICK_OPERATIONS: Final[int] = 10**4
VERIFY_FULL_OPERATIONS: Final[int] = 10**5
VERIFY_QUICK_MAX_N: Final[int] = 2_000
VERIFY_FULL_MAX_N: Final[int] = 10**4
VERIFY_CHURN_EVENTS: Final[int] = 1_000

# ============================================================================
# LOGGING CONFIGURATION
# ============================================================================

# Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
LOG_LEVEL: Final[str] = os.getenv("LOG_LEVEL", "INFO")
