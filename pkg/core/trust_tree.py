"""
Trust tree: the height-balanced dissemination tree of the peer group.

Peers are stored one per node in a complete d-ary tree laid out in level
order (slot 0 is the root). Every parent outranks its children: higher
cumulative online time first, ties broken by the smaller user_id. Joins and
leaves are handled with heap sift-up/sift-down so a membership change costs
at most one pass along a root-to-leaf path.

The module also provides the two level formulas used for reporting:
`eq1_height_bound` (the classic B-tree worst-case height) and `levels`
(the actual height of a complete d-ary tree with n nodes).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Iterator, NamedTuple, Optional, TypeAlias

from config import DEFAULT_FANOUT, MIN_FANOUT
from core.exceptions import DomainError, DuplicatePeerError, UnknownPeerError

logger = logging.getLogger(__name__)

# In-order index of a peer's slot in the current tree
RankValue: TypeAlias = int


# ============================================================================
# LEVEL FORMULAS
# ============================================================================

def _check_fanout(d: int) -> None:
    if d < MIN_FANOUT:
        raise DomainError(f"fanout d must be >= {MIN_FANOUT}, got {d}")


def eq1_height_bound(n: int, d: int) -> int:
    """
    Worst-case B-tree height floor(log_d((n + 1) / 2)).

    Evaluated exactly as the largest h with 2 * d**h <= n + 1, so boundary
    values never suffer from floating-point rounding.

    Args:
        n: Number of nodes (>= 1)
        d: Maximum number of children per node (>= 2)

    Returns:
        The height bound

    Raises:
        DomainError: If n < 1 or d < 2

    Example:
        >>> eq1_height_bound(333, 2)
        7
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    _check_fanout(d)

    height = 0
    next_power = d  # d ** (height + 1)
    while 2 * next_power <= n + 1:
        next_power *= d
        height += 1
    return height


def levels(n: int, d: int) -> int:
    """
    Height of the complete d-ary tree holding n single-peer nodes.

    This is the smallest h >= 0 with (d**(h+1) - 1) / (d - 1) >= n, and 0
    for n <= 1.

    Raises:
        DomainError: If d < 2 or n < 0
    """
    _check_fanout(d)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")

    height = 0
    capacity = 1
    width = 1
    while capacity < n:
        width *= d
        capacity += width
        height += 1
    return height


# ============================================================================
# TREE VALUES
# ============================================================================

class TrustEntry(NamedTuple):
    """
    One occupied slot: a peer, its trust and the instant that trust was read.

    Every peer in the tree is Online, so all trusts grow at the same rate and
    `trust - placed_at` stays fixed while the peer remains. Ranking on that
    difference orders peers by their current trust at every instant.
    """
    user_id: int
    trust: int
    placed_at: int = 0

    @property
    def standing(self) -> int:
        """Trust extrapolated back to time 0."""
        return self.trust - self.placed_at

    def trust_at(self, now: int) -> int:
        return self.standing + now


class DepartureClass(str, Enum):
    """Whether removing a peer forces a rebalance."""
    NO_REBALANCE = "NoRebalance"
    REBALANCE = "Rebalance"


@dataclass(frozen=True)
class JoinOutcome:
    """Result of a join: where the peer settled and the slots it swapped through."""
    user_id: int
    slot: int
    swap_path: tuple[int, ...] = ()

    @property
    def swaps(self) -> int:
        return len(self.swap_path)


@dataclass(frozen=True)
class LeaveOutcome:
    """Result of a leave, including which peer (if any) filled the vacated slot."""
    user_id: int
    departure_class: DepartureClass
    vacated_slot: int
    replacement: Optional[int] = None
    swap_path: tuple[int, ...] = ()

    @property
    def swaps(self) -> int:
        return len(self.swap_path)


def rank_key(entry: TrustEntry) -> tuple[int, int]:
    """Sort key: smaller means closer to the root, at any instant."""
    return (-entry.standing, entry.user_id)


def as_entry(item: Any) -> TrustEntry:
    """
    Normalize a peer description into a TrustEntry.

    Accepts a TrustEntry, anything with `user_id` and `online_time`
    attributes (a directory PeerRecord, read at its session start), or a
    `(user_id, trust)` pair.
    """
    if isinstance(item, TrustEntry):
        return item
    if hasattr(item, "online_time"):
        started = getattr(item, "session_started_at", None) or 0
        return TrustEntry(int(item.user_id), int(item.online_time), int(started))
    user_id, trust = item
    return TrustEntry(int(user_id), int(trust))


# ============================================================================
# TRUST TREE
# ============================================================================

class TrustTree:
    """
    Complete d-ary tree with one peer per node, in trust-heap order.

    Slots are kept in a level-order list; parent(i) = (i - 1) // d and the
    children of i are d*i + 1 .. d*i + d. A location map gives O(1) lookup
    from user_id to slot.

    The tree is a single-writer structure: mutate it from one thread only.
    """

    def __init__(self, fanout: int = DEFAULT_FANOUT):
        """
        Create an empty tree.

        Args:
            fanout: Maximum number of children per node (>= 2)
        """
        _check_fanout(fanout)
        self.fanout = fanout
        self._slots: list[TrustEntry] = []
        self._location: dict[int, int] = {}

    @classmethod
    def build(cls, records: Iterable[Any], fanout: int = DEFAULT_FANOUT) -> "TrustTree":
        """
        Lay out a peer set from scratch.

        Peers are sorted by trust descending, then user_id ascending, and
        placed in level order, which satisfies both completeness and heap
        order.

        Args:
            records: PeerRecords, TrustEntries or (user_id, trust) pairs
            fanout: Maximum number of children per node

        Returns:
            A new TrustTree

        Raises:
            DuplicatePeerError: If a user_id appears twice
        """
        tree = cls(fanout)
        entries = [as_entry(r) for r in records]

        seen: set[int] = set()
        for entry in entries:
            if entry.user_id in seen:
                raise DuplicatePeerError(entry.user_id)
            seen.add(entry.user_id)

        entries.sort(key=rank_key)
        tree._slots = entries
        tree._location = {e.user_id: i for i, e in enumerate(entries)}
        logger.debug(f"Built tree with n={tree.size}, d={fanout}, height={tree.height}")
        return tree

    @classmethod
    def from_level_order(cls, entries: Iterable[Any], fanout: int = DEFAULT_FANOUT) -> "TrustTree":
        """
        Adopt an explicit level-order layout.

        Raises:
            DuplicatePeerError: If a user_id appears twice
            DomainError: If the layout violates trust-heap order
        """
        tree = cls(fanout)
        for i, entry in enumerate(as_entry(e) for e in entries):
            if entry.user_id in tree._location:
                raise DuplicatePeerError(entry.user_id)
            if i > 0 and rank_key(entry) < rank_key(tree._slots[(i - 1) // fanout]):
                raise DomainError(f"slot {i} (user {entry.user_id}) outranks its parent")
            tree._slots.append(entry)
            tree._location[entry.user_id] = i
        return tree

    def copy(self) -> "TrustTree":
        """Independent copy, safe to hand to another thread."""
        clone = TrustTree(self.fanout)
        clone._slots = list(self._slots)
        clone._location = dict(self._location)
        return clone

    # ------------------------------------------------------------------
    # Shape
    # ------------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self._slots)

    @property
    def height(self) -> int:
        return levels(len(self._slots), self.fanout)

    @property
    def root(self) -> Optional[TrustEntry]:
        return self._slots[0] if self._slots else None

    @property
    def entries(self) -> tuple[TrustEntry, ...]:
        """Level-order snapshot of the occupied slots."""
        return tuple(self._slots)

    def __len__(self) -> int:
        return len(self._slots)

    def __contains__(self, user_id: object) -> bool:
        return user_id in self._location

    def __iter__(self) -> Iterator[TrustEntry]:
        return iter(list(self._slots))

    def __repr__(self) -> str:
        return f"TrustTree(n={self.size}, d={self.fanout}, h={self.height})"

    def parent_index(self, i: int) -> Optional[int]:
        return (i - 1) // self.fanout if i > 0 else None

    def child_indices(self, i: int) -> range:
        first = self.fanout * i + 1
        return range(first, min(first + self.fanout, len(self._slots)))

    def depth(self, i: int) -> int:
        """Level of slot i (root = 0)."""
        return levels(i + 1, self.fanout)

    def entry_at(self, i: int) -> TrustEntry:
        return self._slots[i]

    def slot_of(self, user_id: int) -> int:
        try:
            return self._location[user_id]
        except KeyError:
            raise UnknownPeerError(user_id) from None

    def level_groups(self) -> list[list[TrustEntry]]:
        """Entries grouped by depth, root level first."""
        groups: list[list[TrustEntry]] = []
        start, width = 0, 1
        while start < len(self._slots):
            groups.append(self._slots[start:start + width])
            start += width
            width *= self.fanout
        return groups

    # ------------------------------------------------------------------
    # Ranks
    # ------------------------------------------------------------------

    def assign_ranks(self) -> dict[int, RankValue]:
        """
        Generalized in-order index of every peer.

        Children 1..ceil(d/2) are visited first, then the node itself, then
        the remaining children. For d = 2 this is the ordinary in-order walk,
        so the root of a full binary tree gets the middle value.

        Returns:
            Mapping of user_id to rank; ranks are a permutation of 0..n-1
        """
        ranks: dict[int, RankValue] = {}
        if not self._slots:
            return ranks

        lead = -(-self.fanout // 2)
        counter = 0

        def visit(i: int) -> None:
            nonlocal counter
            kids = self.child_indices(i)
            for c in kids[:lead]:
                visit(c)
            ranks[self._slots[i].user_id] = counter
            counter += 1
            for c in kids[lead:]:
                visit(c)

        visit(0)
        return ranks

    # ------------------------------------------------------------------
    # Membership
    # ------------------------------------------------------------------

    def join(self, record: Any) -> JoinOutcome:
        """
        Insert a peer at the first free slot and sift it up.

        Args:
            record: PeerRecord, TrustEntry or (user_id, trust) pair

        Returns:
            JoinOutcome with the final slot and swap path

        Raises:
            DuplicatePeerError: If the peer is already in the tree
        """
        entry = as_entry(record)
        if entry.user_id in self._location:
            raise DuplicatePeerError(entry.user_id)

        self._slots.append(entry)
        self._location[entry.user_id] = len(self._slots) - 1
        path = self._sift_up(len(self._slots) - 1)

        outcome = JoinOutcome(entry.user_id, self._location[entry.user_id], tuple(path))
        logger.debug(f"Peer {entry.user_id} joined at slot {outcome.slot} after {outcome.swaps} swaps")
        return outcome

    def classify_departure(self, user_id: int) -> DepartureClass:
        """NoRebalance only for the peer in the last level-order slot."""
        slot = self.slot_of(user_id)
        if slot == len(self._slots) - 1:
            return DepartureClass.NO_REBALANCE
        return DepartureClass.REBALANCE

    def leave(self, user_id: int) -> LeaveOutcome:
        """
        Remove a peer.

        The last-slot peer fills the vacated slot and sifts up or down until
        heap order holds again.

        Raises:
            UnknownPeerError: If the peer is not in the tree
        """
        departure = self.classify_departure(user_id)
        slot = self._location.pop(user_id)
        last = self._slots.pop()

        if departure is DepartureClass.NO_REBALANCE:
            logger.debug(f"Peer {user_id} left from last slot {slot}, no rebalance")
            return LeaveOutcome(user_id, departure, slot)

        self._slots[slot] = last
        self._location[last.user_id] = slot
        path = self._sift_up(slot) or self._sift_down(slot)

        logger.debug(f"Peer {user_id} left slot {slot}; peer {last.user_id} refilled it with {len(path)} swaps")
        return LeaveOutcome(user_id, departure, slot, last.user_id, tuple(path))

    # ------------------------------------------------------------------
    # Heap maintenance
    # ------------------------------------------------------------------

    def _swap(self, i: int, j: int) -> None:
        slots = self._slots
        slots[i], slots[j] = slots[j], slots[i]
        self._location[slots[i].user_id] = i
        self._location[slots[j].user_id] = j

    def _sift_up(self, i: int) -> list[int]:
        path: list[int] = []
        while i > 0:
            parent = (i - 1) // self.fanout
            if rank_key(self._slots[i]) >= rank_key(self._slots[parent]):
                break
            self._swap(i, parent)
            path.append(parent)
            i = parent
        return path

    def _sift_down(self, i: int) -> list[int]:
        path: list[int] = []
        while True:
            kids = self.child_indices(i)
            if not kids:
                break
            best = min(kids, key=lambda c: rank_key(self._slots[c]))
            if rank_key(self._slots[best]) >= rank_key(self._slots[i]):
                break
            self._swap(i, best)
            path.append(best)
            i = best
        return path
