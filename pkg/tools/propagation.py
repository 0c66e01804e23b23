"""
Level-synchronous rekey propagation.

A new session key enters the tree at the root and every parent forwards it
to all of its children in one `per_level` step, so each level of the tree is
covered one step after the level above. Two clocks are reported:

- the chart clock: root covered at time 0 (the coverage curve), optionally
  shifted by the KDC/server offsets;
- completion time: the full accounting, KDC generation + KDC-to-server +
  server-to-root + per-level propagation.
"""

import logging
from enum import Enum
from typing import TYPE_CHECKING, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import (
    DEFAULT_KDC_GEN,
    DEFAULT_KDC_TO_SERVER,
    DEFAULT_SERVER_TO_ROOT,
    DEFAULT_PER_LEVEL,
)
from core.trust_tree import TrustTree

if TYPE_CHECKING:
    from agents.kdc import SessionKey

logger = logging.getLogger(__name__)

# KDC -> controlling server, controlling server -> root
OFFSET_MESSAGES = 2


class LatencyConfig(BaseModel):
    """Time units spent on each hop of a rekey."""
    model_config = ConfigDict(frozen=True)

    kdc_gen: int = Field(default=DEFAULT_KDC_GEN, ge=0)
    kdc_to_server: int = Field(default=DEFAULT_KDC_TO_SERVER, ge=0)
    server_to_root: int = Field(default=DEFAULT_SERVER_TO_ROOT, ge=0)
    per_level: int = Field(default=DEFAULT_PER_LEVEL, ge=0)
    include_offsets_in_chart: bool = False

    @property
    def offsets(self) -> int:
        """Time before the root holds the key."""
        return self.kdc_gen + self.kdc_to_server + self.server_to_root

    @property
    def chart_shift(self) -> int:
        return self.offsets if self.include_offsets_in_chart else 0


class TriggerKind(str, Enum):
    JOIN = "Join"
    LEAVE = "Leave"
    MANUAL = "Manual"


class Trigger(BaseModel):
    """What caused a rekey."""
    model_config = ConfigDict(frozen=True)

    kind: TriggerKind
    user_id: Optional[int] = None

    @model_validator(mode="after")
    def _user_id_matches_kind(self) -> "Trigger":
        if (self.kind is TriggerKind.MANUAL) != (self.user_id is None):
            raise ValueError("Join/Leave triggers need a user_id, Manual triggers must not have one")
        return self

    @classmethod
    def join(cls, user_id: int) -> "Trigger":
        return cls(kind=TriggerKind.JOIN, user_id=user_id)

    @classmethod
    def leave(cls, user_id: int) -> "Trigger":
        return cls(kind=TriggerKind.LEAVE, user_id=user_id)

    @classmethod
    def manual(cls) -> "Trigger":
        return cls(kind=TriggerKind.MANUAL)

    def __str__(self) -> str:
        if self.user_id is None:
            return self.kind.value
        return f"{self.kind.value}({self.user_id})"


class RekeyReport(BaseModel):
    """
    Outcome of one rekey.

    Attributes:
        key_version: Version of the distributed key
        trigger: Event that caused the rekey
        tree_size: Peers in the tree when the key was distributed
        height: Tree height at that moment
        root_user_id: Peer the key was injected at (None for an empty tree)
        coverage_by_time: Entry t = peers holding the key at chart time t
        chart_time_full_coverage: Chart time at which the last peer is covered
        completion_time: Offsets plus per-level propagation
        message_count: Edge deliveries plus the two offset messages
        notify_time: Time for the membership change to reach the root
        covered_at: Chart time at which each peer received the key
    """
    model_config = ConfigDict(frozen=True)

    key_version: int
    trigger: Trigger
    tree_size: int
    height: int
    root_user_id: Optional[int] = None
    coverage_by_time: list[int]
    chart_time_full_coverage: int
    completion_time: int
    message_count: int
    notify_time: int = 0
    covered_at: dict[int, int] = Field(default_factory=dict)

    @property
    def final_coverage(self) -> int:
        return self.coverage_by_time[-1] if self.coverage_by_time else 0

    def level_curve(self, cfg: LatencyConfig) -> list[tuple[int, int]]:
        """
        Coverage sampled once per tree level, as (chart time, peers covered).

        Uses the same representation as `workflow.simulator.coverage_curve`:
        level t sits at chart time shift + t * per_level, and a zero
        per-level cost collapses the curve to a single point.

        Args:
            cfg: Latency settings the report was produced with

        Returns:
            The sampled curve; empty when the tree was empty
        """
        if self.tree_size == 0:
            return []
        shift = cfg.chart_shift
        if cfg.per_level == 0:
            return [(shift, self.tree_size)]
        return [
            (shift + t * cfg.per_level, self.coverage_by_time[shift + t * cfg.per_level])
            for t in range(self.height + 1)
        ]


def propagate(
    tree: TrustTree,
    key: "SessionKey",
    cfg: Optional[LatencyConfig] = None,
    *,
    trigger: Optional[Trigger] = None,
    notify_time: int = 0,
) -> RekeyReport:
    """
    Push a key from the root down the tree, one level per `per_level` units.

    Args:
        tree: Dissemination tree (invariants must hold)
        key: Session key being distributed
        cfg: Latency settings (defaults to one unit per hop)
        trigger: Event that caused the rekey (defaults to Manual)
        notify_time: Time the membership change took to reach the root

    Returns:
        RekeyReport for this distribution
    """
    cfg = cfg or LatencyConfig()
    trigger = trigger or Trigger.manual()
    shift = cfg.chart_shift

    if tree.size == 0:
        # Nobody to deliver to: the KDC still hands the key to the server
        return RekeyReport(
            key_version=key.version,
            trigger=trigger,
            tree_size=0,
            height=0,
            coverage_by_time=[0] * (shift + 1),
            chart_time_full_coverage=shift,
            completion_time=cfg.offsets,
            message_count=OFFSET_MESSAGES - 1,
            notify_time=notify_time,
        )

    covered_at = {tree.entry_at(0).user_id: shift}
    deliveries = 0
    clock = shift
    frontier = [0]
    while frontier:
        arrival = clock + cfg.per_level
        next_frontier: list[int] = []
        for slot in frontier:
            for child in tree.child_indices(slot):
                covered_at[tree.entry_at(child).user_id] = arrival
                next_frontier.append(child)
        deliveries += len(next_frontier)
        if next_frontier:
            clock = arrival
        frontier = next_frontier

    arrivals = np.bincount(np.fromiter(covered_at.values(), dtype=np.int64), minlength=clock + 1)
    coverage = np.cumsum(arrivals).tolist()

    report = RekeyReport(
        key_version=key.version,
        trigger=trigger,
        tree_size=tree.size,
        height=tree.height,
        root_user_id=tree.entry_at(0).user_id,
        coverage_by_time=coverage,
        chart_time_full_coverage=clock,
        completion_time=cfg.offsets + cfg.per_level * tree.height,
        message_count=deliveries + OFFSET_MESSAGES,
        notify_time=notify_time,
        covered_at=covered_at,
    )
    logger.debug(
        f"Key v{key.version} ({trigger}) covered {tree.size} peers by chart time {clock}, "
        f"completion {report.completion_time}, {report.message_count} messages"
    )
    return report
