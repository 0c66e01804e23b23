"""
Tests for the group-size sweep and its unbalanced baseline.
"""

import numpy as np
import pytest

from cli import main
from config import SWEEP_COLUMNS
from core.exceptions import DomainError
from core.trust_tree import levels
from tools.propagation import LatencyConfig
from workflow.metrics import to_csv_text
from workflow.sweep import attachment_depths, sweep_frame


class TestAttachmentDepths:
    """Test suite for the unbalanced arrival-order tree."""

    def test_trivial_groups(self):
        """Test that no peers give no depths and one peer is the root."""
        rng = np.random.default_rng(0)
        assert attachment_depths(0, 2, rng).tolist() == []
        assert attachment_depths(1, 2, rng).tolist() == [0]

    @pytest.mark.parametrize("n, d", [(2, 2), (100, 2), (500, 3), (64, 4)])
    def test_never_shallower_than_complete_tree(self, n, d):
        """Test that no level holds more than d**level peers and the height is at least levels(n, d)."""
        depths = attachment_depths(n, d, np.random.default_rng(n))
        per_level = np.bincount(depths)
        assert all(count <= d**level for level, count in enumerate(per_level.tolist()))
        assert depths.max() >= levels(n, d)

    def test_same_seed_same_depths(self):
        """Test that the attachment is reproducible."""
        first = attachment_depths(200, 3, np.random.default_rng(5))
        second = attachment_depths(200, 3, np.random.default_rng(5))
        assert first.tolist() == second.tolist()


class TestSweepFrame:
    """Test suite for sweep_frame."""

    def test_333_binary_peers(self):
        """Test the balanced figures for 333 peers at d=2."""
        row = sweep_frame([333], [2]).iloc[0]
        assert row["height_bound"] == 7
        assert row["height"] == 8
        assert row["chart_time_full_coverage"] == 8
        assert row["completion_time"] == 11
        assert row["messages"] == 334
        assert row["mean_delivery_time"] == pytest.approx(2162 / 333, abs=1e-6)

    def test_balanced_never_worse(self):
        """Test that the trust tree is never deeper or slower than the unbalanced baseline."""
        frame = sweep_frame([10, 100, 333], [2, 3, 4], seed=3)
        assert (frame["unbalanced_height"] >= frame["height"]).all()
        assert (frame["unbalanced_completion_time"] >= frame["completion_time"]).all()
        assert (frame["unbalanced_mean_delivery_time"] >= frame["mean_delivery_time"]).all()

    def test_layout(self):
        """Test the columns and the fanout-then-size row order."""
        frame = sweep_frame([50, 10], [3, 2])
        assert tuple(frame.columns) == SWEEP_COLUMNS
        assert list(zip(frame["fanout"], frame["node_count"])) == [(3, 50), (3, 10), (2, 50), (2, 10)]

    def test_slow_levels(self):
        """Test that per-level cost scales both completion times."""
        row = sweep_frame([7], [2], latency=LatencyConfig(per_level=2)).iloc[0]
        assert row["completion_time"] == 3 + 2 * 2
        assert row["unbalanced_completion_time"] == 3 + 2 * row["unbalanced_height"]

    def test_deterministic(self):
        """Test that one seed gives identical CSV text."""
        assert to_csv_text(sweep_frame([40, 80], [2], seed=9)) == to_csv_text(sweep_frame([40, 80], [2], seed=9))

    @pytest.mark.parametrize("nodes, fanouts", [([0], [2]), ([5], [1])])
    def test_domain_errors(self, nodes, fanouts):
        """Test that an empty group or a fanout below 2 is rejected."""
        with pytest.raises(DomainError):
            sweep_frame(nodes, fanouts)


class TestSweepCommand:
    """Test suite for the sweep subcommand."""

    def test_stdout(self, capsys):
        """Test that the sweep CSV goes to stdout with one row per pair."""
        assert main(["sweep", "--nodes", "7", "333", "--d", "2"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(SWEEP_COLUMNS)
        assert len(lines) == 3
        assert lines[2].startswith("333,2,7,8,8,11,334,")

    def test_out_file(self, tmp_path, capsys):
        """Test that --out writes the file and keeps stdout empty."""
        path = tmp_path / "sweep.csv"
        assert main(["sweep", "--nodes", "10", "--d", "2", "3", "--out", str(path)]) == 0
        assert capsys.readouterr().out == ""
        assert path.read_text().count("\n") == 3

    def test_empty_group_exits_1(self, capsys):
        """Test that a zero group size is a domain error."""
        assert main(["sweep", "--nodes", "0"]) == 1
        assert "error:" in capsys.readouterr().err
