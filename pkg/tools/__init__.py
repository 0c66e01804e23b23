"""
Tools package for TrustKey.

This package contains the rekey propagation engine. The invariant checkers
and verification suites live in `tools.invariants`, imported on demand since
they drive the simulator.
"""

from tools.propagation import (
    LatencyConfig,
    RekeyReport,
    Trigger,
    TriggerKind,
    propagate,
)

__all__ = [
    "LatencyConfig",
    "RekeyReport",
    "Trigger",
    "TriggerKind",
    "propagate",
]
