"""
Configuration package for TrustKey.
"""

from config.settings import (
    DEFAULT_FANOUT,
    MIN_FANOUT,
    KEY_MATERIAL_BYTES,
    DEFAULT_KDC_GEN,
    DEFAULT_KDC_TO_SERVER,
    DEFAULT_SERVER_TO_ROOT,
    DEFAULT_PER_LEVEL,
    DEFAULT_SEED,
    DEFAULT_NODE_COUNT,
    MAX_SEED,
    DEFAULT_ONLINE_TIME_LOW,
    DEFAULT_ONLINE_TIME_HIGH,
    REJOIN_PROBABILITY,
    DEFAULT_SWEEP_NODE_COUNTS,
    DEFAULT_SWEEP_FANOUTS,
    METRICS_CSV_NAME,
    COVERAGE_CSV_NAME,
    CONFIG_JSON_NAME,
    METRICS_COLUMNS,
    COVERAGE_COLUMNS,
    LOOKUP_TABLE_COLUMNS,
    SWEEP_COLUMNS,
    ASCII_CHART_WIDTH,
    VERIFY_QUICK_OPERATIONS,
    VERIFY_FULL_OPERATIONS,
    VERIFY_QUICK_MAX_N,
    VERIFY_FULL_MAX_N,
    VERIFY_CHURN_EVENTS,
    LOG_LEVEL,
)

__all__ = [
    "DEFAULT_FANOUT",
    "MIN_FANOUT",
    "KEY_MATERIAL_BYTES",
    "DEFAULT_KDC_GEN",
    "DEFAULT_KDC_TO_SERVER",
    "DEFAULT_SERVER_TO_ROOT",
    "DEFAULT_PER_LEVEL",
    "DEFAULT_SEED",
    "DEFAULT_NODE_COUNT",
    "MAX_SEED",
    "DEFAULT_ONLINE_TIME_LOW",
    "DEFAULT_ONLINE_TIME_HIGH",
    "REJOIN_PROBABILITY",
    "DEFAULT_SWEEP_NODE_COUNTS",
    "DEFAULT_SWEEP_FANOUTS",
    "METRICS_CSV_NAME",
    "COVERAGE_CSV_NAME",
    "CONFIG_JSON_NAME",
    "METRICS_COLUMNS",
    "COVERAGE_COLUMNS",
    "LOOKUP_TABLE_COLUMNS",
    "SWEEP_COLUMNS",
    "ASCII_CHART_WIDTH",
    "VERIFY_QUICK_OPERATIONS",
    "VERIFY_FULL_OPERATIONS",
    "VERIFY_QUICK_MAX_N",
    "VERIFY_FULL_MAX_N",
    "VERIFY_CHURN_EVENTS",
    "LOG_LEVEL",
]
