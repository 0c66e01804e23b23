"""
Result files of a simulation run.

metrics.csv has one row per rekey; coverage.csv holds the coverage curve of
the last rekey. Both are written with LF line endings in a fixed row order,
so identical runs give byte-identical files.
"""

import logging
from pathlib import Path
from typing import Union

import pandas as pd

from config import (
    CONFIG_JSON_NAME,
    COVERAGE_COLUMNS,
    COVERAGE_CSV_NAME,
    METRICS_COLUMNS,
    METRICS_CSV_NAME,
)
from core.trust_tree import DepartureClass
from workflow.simulator import SimMetrics

logger = logging.getLogger(__name__)


def metrics_frame(metrics: SimMetrics) -> pd.DataFrame:
    """One row per rekey, columns as in METRICS_COLUMNS."""
    rows = []
    for event in metrics.events:
        report = event.report
        rows.append((
            event.event_time,
            report.trigger.kind.value,
            # Manual rekeys have no peer; keep the column textual so ids never become floats
            "" if report.trigger.user_id is None else str(report.trigger.user_id),
            report.key_version,
            report.tree_size,
            report.height,
            report.chart_time_full_coverage,
            report.completion_time,
            report.message_count,
            event.swaps,
        ))
    return pd.DataFrame(rows, columns=list(METRICS_COLUMNS))


def coverage_frame(curve: list[tuple[int, int]]) -> pd.DataFrame:
    return pd.DataFrame(curve, columns=list(COVERAGE_COLUMNS))


def to_csv_text(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n")


def write_outputs(metrics: SimMetrics, out_dir: Union[str, Path]) -> dict[str, Path]:
    """
    Write metrics.csv, coverage.csv and config.json into `out_dir`.

    Args:
        metrics: Results of a run
        out_dir: Target directory (created if missing)

    Returns:
        Mapping of file name to written path
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    paths = {
        METRICS_CSV_NAME: out / METRICS_CSV_NAME,
        COVERAGE_CSV_NAME: out / COVERAGE_CSV_NAME,
        CONFIG_JSON_NAME: out / CONFIG_JSON_NAME,
    }
    paths[METRICS_CSV_NAME].write_text(to_csv_text(metrics_frame(metrics)), encoding="utf-8", newline="\n")
    paths[COVERAGE_CSV_NAME].write_text(to_csv_text(coverage_frame(metrics.final_coverage)), encoding="utf-8", newline="\n")
    paths[CONFIG_JSON_NAME].write_text(metrics.config.model_dump_json(indent=2) + "\n", encoding="utf-8", newline="\n")

    logger.info(f"Wrote {len(metrics.events)} metric rows to {out}")
    return paths


def summary_line(metrics: SimMetrics) -> str:
    """One-line human summary of a run."""
    counts = metrics.departure_counts
    dist = metrics.config.initial_time_distribution
    return (
        f"rekeys={metrics.rekey_count} "
        f"mean_completion={metrics.mean_completion_time:.3f} "
        f"max_completion={metrics.max_completion_time} "
        f"messages={metrics.total_messages} "
        f"swaps={metrics.total_swaps} "
        f"no_rebalance={counts[DepartureClass.NO_REBALANCE]} "
        f"rebalance={counts[DepartureClass.REBALANCE]} "
        f"mean_notify={metrics.mean_notify_time:.3f} "
        f"online_times=uniform_int[{dist.lo},{dist.hi}]"
    )
