"""
Workflow package for TrustKey.

This package contains the churn simulator, its result files and the
group-size sweep.
"""

from workflow.simulator import (
    ChurnSimulator,
    SimConfig,
    SimEvent,
    SimMetrics,
    UniformInt,
    coverage_curve,
    run,
)
from workflow.metrics import (
    metrics_frame,
    coverage_frame,
    write_outputs,
    summary_line,
)
from workflow.sweep import attachment_depths, sweep_frame

__all__ = [
    "ChurnSimulator",
    "SimConfig",
    "SimEvent",
    "SimMetrics",
    "UniformInt",
    "coverage_curve",
    "run",
    "metrics_frame",
    "coverage_frame",
    "write_outputs",
    "summary_line",
    "attachment_depths",
    "sweep_frame",
]
