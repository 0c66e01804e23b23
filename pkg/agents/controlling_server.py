"""
Controlling server: the mediator between the KDC and the peer tree.

The KDC is never wired to a fixed root, because rebalancing can move any
peer into the root slot. The controlling server keeps the lookup table,
applies joins and leaves to the tree, asks the KDC for a new key after every
membership change and injects it at whichever peer is the root right now.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

from config import DEFAULT_FANOUT
from core.directory import LookupTable
from core.trust_tree import DepartureClass, JoinOutcome, LeaveOutcome, TrustEntry, TrustTree
from agents.kdc import KeyDistributionCenter
from tools.propagation import LatencyConfig, RekeyReport, Trigger, propagate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MembershipChange:
    """
    Everything one join or leave produced.

    Attributes:
        outcome: Tree-level result (slot, swaps, departure class)
        trust: Placement trust for a join; cumulative online time after a leave
        report: The rekey triggered by the change
    """
    outcome: Union[JoinOutcome, LeaveOutcome]
    trust: int
    report: RekeyReport

    @property
    def swaps(self) -> int:
        return self.outcome.swaps

    @property
    def departure_class(self) -> Optional[DepartureClass]:
        return getattr(self.outcome, "departure_class", None)


class ControllingServer:
    """
    Owns the lookup table and the dissemination tree and drives rekeying.

    All mutations must come from a single thread of control.
    """

    def __init__(
        self,
        table: Optional[LookupTable] = None,
        tree: Optional[TrustTree] = None,
        kdc: Optional[KeyDistributionCenter] = None,
        latency: Optional[LatencyConfig] = None,
        fanout: int = DEFAULT_FANOUT,
    ):
        self.table = table if table is not None else LookupTable()
        self.tree = tree if tree is not None else TrustTree(fanout)
        self.kdc = kdc if kdc is not None else KeyDistributionCenter()
        self.latency = latency or LatencyConfig()

    def authenticate(self, user_id: int) -> bool:
        """Admission check; every peer is accepted."""
        return True

    def current_root(self) -> Optional[int]:
        root = self.tree.root
        return root.user_id if root is not None else None

    def rebuild_tree(self, now: int) -> TrustTree:
        """Lay the tree out again from the lookup table's Online peers."""
        self.tree = TrustTree.build(self.table.snapshot_for_build(now), self.tree.fanout)
        logger.info(f"Rebuilt tree from lookup table: n={self.tree.size}, height={self.tree.height}")
        return self.tree

    def rekey_on_event(self, trigger: Trigger, *, notify_time: int = 0) -> RekeyReport:
        """
        Request one new key from the KDC and distribute it from the current root.

        The tree must already reflect the post-event membership.

        Args:
            trigger: Event that caused the rekey
            notify_time: Time the change took to reach the root

        Returns:
            RekeyReport of the distribution
        """
        key = self.kdc.generate_key()
        report = propagate(self.tree, key, self.latency, trigger=trigger, notify_time=notify_time)
        logger.debug(f"Rekey for {trigger}: v{key.version} injected at root {self.current_root()}")
        return report

    def distribute_initial_key(self) -> RekeyReport:
        return self.rekey_on_event(Trigger.manual())

    def admit(self, user_id: int, now: int) -> MembershipChange:
        """
        Handle a join: record the session, place the peer, rekey.

        A returning peer keeps its cumulative online time as trust; a new
        peer starts at 0 and lands in the deepest level. The entry is
        stamped with `now`, so it keeps ranking against the other Online
        peers by their current trust.
        """
        self.authenticate(user_id)
        self.table.upsert(user_id)
        record = self.table.mark_online(user_id, now)
        trust = record.trust_at(now)

        outcome = self.tree.join(TrustEntry(user_id, trust, now))
        notify_time = self.latency.per_level * self.tree.depth(outcome.slot)
        report = self.rekey_on_event(Trigger.join(user_id), notify_time=notify_time)
        return MembershipChange(outcome, trust, report)

    def release(self, user_id: int, now: int) -> MembershipChange:
        """
        Handle a leave: remove the peer, bank its session time, rekey.
        """
        notify_time = self.latency.per_level * self.tree.depth(self.tree.slot_of(user_id))
        outcome = self.tree.leave(user_id)
        record = self.table.mark_offline(user_id, now)

        report = self.rekey_on_event(Trigger.leave(user_id), notify_time=notify_time)
        return MembershipChange(outcome, record.online_time, report)
