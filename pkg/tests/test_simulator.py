"""
Integration tests for the churn simulator and its result files.

This module runs small seeded simulations end to end and checks the rekey
discipline, the aggregates and the CSV output.
"""

import json
import logging

import pytest
from pydantic import ValidationError

from core.directory import LookupTable
from core.trust_tree import DepartureClass
from tools.invariants import check_report, check_tree, check_trust_order
from tools.propagation import LatencyConfig, TriggerKind
from workflow.metrics import coverage_frame, metrics_frame, summary_line, to_csv_text, write_outputs
from workflow.simulator import ChurnSimulator, SimConfig, UniformInt, coverage_curve, run


class TestSimConfig:
    """Test suite for SimConfig validation."""

    @pytest.mark.parametrize("field, value", [
        ("node_count", -1),
        ("fanout", 1),
        ("seed", -3),
        ("duration", -1),
        ("join_rate", -0.5),
        ("leave_rate", float("nan")),
    ])
    def test_invalid_values_rejected(self, field, value):
        """Test that out-of-range parameters are rejected before running."""
        with pytest.raises(ValidationError):
            SimConfig(**{field: value})

    def test_inverted_time_range_rejected(self):
        """Test that lo > hi is rejected."""
        with pytest.raises(ValidationError):
            UniformInt(lo=10, hi=5)

    def test_config_is_frozen(self):
        """Test that a config cannot be changed after validation."""
        cfg = SimConfig()
        with pytest.raises(ValidationError):
            cfg.seed = 3


class TestChurnFreeRuns:
    """Test suite for runs without churn."""

    def test_empty_run(self):
        """Test that no peers and no churn give no rekeys."""
        metrics = run(SimConfig(node_count=0))
        assert metrics.rekey_count == 0
        assert metrics.final_coverage == []
        assert metrics_frame(metrics).empty

    def test_333_binary_peers(self):
        """Test that 333 peers at d=2 give one rekey covering everyone at chart time 8."""
        metrics = run(SimConfig(node_count=333, fanout=2))
        assert metrics.rekey_count == 1
        assert metrics.final_coverage[-1] == (8, 333)
        assert metrics.final_coverage == coverage_curve(333, 2)
        assert metrics.max_completion_time == 11

    @pytest.mark.parametrize("latency", [
        LatencyConfig(per_level=2),
        LatencyConfig(per_level=2, include_offsets_in_chart=True),
        LatencyConfig(per_level=0),
    ])
    def test_final_coverage_matches_static_curve(self, latency):
        """Test that the run's final curve equals coverage_curve for other per-level costs."""
        metrics = run(SimConfig(node_count=7, latency=latency))
        assert metrics.final_coverage == coverage_curve(7, 2, latency)

    def test_slow_levels_sampled_per_level(self):
        """Test that per_level = 2 gives one entry per level, two units apart."""
        metrics = run(SimConfig(node_count=7, latency=LatencyConfig(per_level=2)))
        assert metrics.final_coverage == [(0, 1), (2, 3), (4, 7)]

    def test_preloaded_table(self, populated_table):
        """Test that a preloaded table replaces random peer generation."""
        sim = ChurnSimulator(SimConfig(node_count=3), table=populated_table)
        events = list(sim.run_stream())
        assert len(events) == 1
        assert sim.tree.size == 4
        assert sim.server.current_root() == 0


class TestChurnRuns:
    """Test suite for seeded churn runs."""

    def test_rekey_per_event(self, churn_config):
        """Test that every event rekeys once and each report matches the tree it was sent on."""
        sim = ChurnSimulator(churn_config)
        manual = 0
        for index, event in enumerate(sim.run_stream()):
            assert event.report.key_version == index + 1
            assert check_report(event.report, sim.tree, churn_config.latency) == []
            assert check_tree(sim.tree) == []
            assert len(sim.table.online_ids()) == sim.tree.size
            manual += event.trigger.kind is TriggerKind.MANUAL
        assert manual == 1

    def test_events_ordered_within_a_tick(self, churn_config):
        """Test that leaves precede joins at equal times and ids ascend within a kind."""
        metrics = run(churn_config)
        churn = [e for e in metrics.events if e.trigger.kind is not TriggerKind.MANUAL]
        keys = [(e.event_time, e.trigger.kind is TriggerKind.JOIN, e.trigger.user_id) for e in churn]
        assert keys == sorted(keys)

    def test_rejoin_never_loses_trust(self, churn_config):
        """Test that a returning peer is placed with at least the trust it left with."""
        banked: dict[int, int] = {}
        rejoins = 0
        for event in run(churn_config).events:
            trigger = event.trigger
            if trigger.kind is TriggerKind.LEAVE:
                banked[trigger.user_id] = event.trust
            elif trigger.kind is TriggerKind.JOIN and trigger.user_id in banked:
                rejoins += 1
                assert event.trust >= banked[trigger.user_id]
        assert rejoins > 0

    def test_tree_follows_current_trust_after_rejoins(self, churn_config):
        """Test that heap order matches the table's current trust after every event, now and later."""
        sim = ChurnSimulator(churn_config)
        seen: set[int] = set()
        rejoins = 0
        for event in sim.run_stream():
            trigger = event.trigger
            if trigger.kind is TriggerKind.JOIN and trigger.user_id in seen:
                rejoins += 1
            if trigger.user_id is not None:
                seen.add(trigger.user_id)
            for now in (event.event_time, event.event_time + 50):
                assert check_trust_order(sim.tree, sim.table, now) == []
        assert rejoins > 0

    def test_same_seed_same_csv(self, churn_config):
        """Test that two runs with one config give byte-identical CSV text."""
        first, second = run(churn_config), run(churn_config)
        assert to_csv_text(metrics_frame(first)) == to_csv_text(metrics_frame(second))
        assert to_csv_text(coverage_frame(first.final_coverage)) == to_csv_text(coverage_frame(second.final_coverage))

    def test_different_seeds_differ(self, churn_config):
        """Test that changing the seed changes the workload."""
        other = churn_config.model_copy(update={"seed": churn_config.seed + 1})
        assert to_csv_text(metrics_frame(run(churn_config))) != to_csv_text(metrics_frame(run(other)))

    def test_aggregates(self, churn_config):
        """Test that the aggregates agree with the per-event data."""
        metrics = run(churn_config)
        leaves = sum(1 for e in metrics.events if e.trigger.kind is TriggerKind.LEAVE)
        assert sum(metrics.departure_counts.values()) == leaves
        assert metrics.total_messages == sum(r.message_count for r in metrics.reports)
        assert metrics.max_completion_time >= metrics.mean_completion_time > 0

    def test_group_can_drain(self, caplog):
        """Test that leaves beyond the online count are skipped with a warning."""
        caplog.set_level(logging.WARNING, logger="workflow.simulator")
        metrics = run(SimConfig(node_count=2, seed=5, duration=10, leave_rate=3.0))
        assert metrics.reports[-1].tree_size == 0
        assert "skipped" in caplog.text

    def test_drained_run_keeps_last_covered_curve(self):
        """Test that the final curve comes from the last rekey that reached a peer."""
        metrics = run(SimConfig(node_count=2, seed=5, duration=10, leave_rate=3.0))
        assert metrics.reports[-1].tree_size == 0
        assert metrics.final_coverage == [(0, 1)]
        assert (0, 0) not in metrics.final_coverage


class TestCoverageCurve:
    """Test suite for the static coverage curve."""

    def test_seven_binary(self):
        """Test the curve of a full 7-node binary tree."""
        assert coverage_curve(7, 2) == [(0, 1), (1, 3), (2, 7)]

    @pytest.mark.parametrize("d", [2, 3, 10])
    def test_single_peer(self, d):
        """Test that one peer is covered at chart time 0."""
        assert coverage_curve(1, d) == [(0, 1)]

    def test_empty(self):
        """Test that n = 0 gives an empty curve."""
        assert coverage_curve(0, 2) == []

    def test_offsets_shift_the_curve(self):
        """Test that charted offsets shift every entry."""
        assert coverage_curve(3, 2, LatencyConfig(include_offsets_in_chart=True)) == [(3, 1), (4, 3)]


class TestResultFiles:
    """Test suite for the written result files."""

    def test_write_outputs(self, tmp_path, churn_config):
        """Test that metrics, coverage and config files are written with LF endings."""
        metrics = run(churn_config)
        paths = write_outputs(metrics, tmp_path / "out")

        metrics_text = paths["metrics.csv"].read_bytes().decode()
        assert metrics_text.splitlines()[0] == (
            "event_time,trigger,peer_id,key_version,tree_size,height,"
            "chart_time_full_coverage,completion_time,messages,swaps"
        )
        assert len(metrics_text.splitlines()) == metrics.rekey_count + 1
        assert "\r" not in metrics_text
        assert metrics_text.endswith("\n") and not metrics_text.endswith("\n\n")

        coverage_text = paths["coverage.csv"].read_text()
        assert coverage_text.startswith("time_unit,nodes_covered\n")

        saved = json.loads(paths["config.json"].read_text())
        assert SimConfig.model_validate(saved) == churn_config

    def test_manual_row_has_empty_peer(self):
        """Test that the initial distribution has an empty peer_id cell."""
        frame = metrics_frame(run(SimConfig(node_count=5)))
        assert frame.loc[0, "trigger"] == "Manual"
        assert frame.loc[0, "peer_id"] == ""

    def test_summary_line(self, churn_config):
        """Test that the summary names the counts and the online-time distribution."""
        metrics = run(churn_config)
        line = summary_line(metrics)
        assert line.startswith(f"rekeys={metrics.rekey_count} ")
        assert f"rebalance={metrics.departure_counts[DepartureClass.REBALANCE]}" in line
        assert line.endswith("online_times=uniform_int[0,1000000]")

    def test_empty_table_run_writes_header_only(self, tmp_path):
        """Test that a run without peers writes header-only metrics."""
        metrics = run(SimConfig(), LookupTable())
        paths = write_outputs(metrics, tmp_path)
        assert paths["metrics.csv"].read_text().count("\n") == 1
