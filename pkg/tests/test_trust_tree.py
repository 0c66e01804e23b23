"""
Unit tests for the trust tree.

This module tests the level formulas, tree construction, rank assignment,
joins and leaves on small hand-checked trees.
"""

import pytest

from core.exceptions import DomainError, DuplicatePeerError, UnknownPeerError
from core.trust_tree import (
    DepartureClass,
    TrustEntry,
    TrustTree,
    eq1_height_bound,
    levels,
    rank_key,
)
from tools.invariants import check_tree


class TestHeightBound:
    """Test suite for eq1_height_bound."""

    @pytest.mark.parametrize("n, d, expected", [(1, 2, 0), (333, 2, 7), (1000, 10, 2), (2, 2, 0), (3, 2, 1)])
    def test_known_values(self, n, d, expected):
        """Test the bound on hand-computed values."""
        assert eq1_height_bound(n, d) == expected

    def test_power_boundary_is_exact(self):
        """Test that n + 1 = 2 * d**h lands exactly on h."""
        assert eq1_height_bound(2 * 3**5 - 1, 3) == 5
        assert eq1_height_bound(2 * 3**5 - 2, 3) == 4

    @pytest.mark.parametrize("n, d", [(0, 2), (-4, 2), (10, 1), (10, 0)])
    def test_domain_errors(self, n, d):
        """Test that n < 1 or d < 2 is rejected."""
        with pytest.raises(DomainError):
            eq1_height_bound(n, d)

    def test_domain_error_is_value_error(self):
        """Test that domain errors can be caught as ValueError."""
        with pytest.raises(ValueError):
            eq1_height_bound(0, 2)


class TestLevels:
    """Test suite for levels."""

    @pytest.mark.parametrize("n, d, expected", [
        (0, 2, 0), (1, 2, 0), (2, 2, 1), (3, 2, 1), (4, 2, 2), (7, 2, 2), (8, 2, 3),
        (333, 2, 8), (333, 3, 5), (4, 3, 1), (5, 3, 2),
    ])
    def test_known_values(self, n, d, expected):
        """Test levels on hand-computed values."""
        assert levels(n, d) == expected

    def test_bound_and_levels_differ_for_333_peers(self):
        """Test that the worst-case bound is below the complete-tree height for n=333."""
        assert eq1_height_bound(333, 2) == 7
        assert levels(333, 2) == 8

    def test_rejects_bad_fanout(self):
        """Test that d < 2 is rejected."""
        with pytest.raises(DomainError):
            levels(5, 1)

    def test_rejects_negative_n(self):
        """Test that negative n is rejected."""
        with pytest.raises(DomainError):
            levels(-1, 2)


class TestBuild:
    """Test suite for TrustTree.build."""

    def test_empty_tree(self):
        """Test that an empty peer set gives an empty tree of height 0."""
        tree = TrustTree.build([], 2)
        assert tree.size == 0
        assert tree.height == 0
        assert tree.root is None

    def test_three_peers(self, abc_tree):
        """Test that the highest trust becomes root with the others as children."""
        assert abc_tree.root == TrustEntry(1, 10)
        assert [abc_tree.entry_at(c).user_id for c in abc_tree.child_indices(0)] == [2, 3]

    def test_descending_trusts_in_level_order(self, seven_tree):
        """Test that distinct descending trusts appear in level order unchanged."""
        assert [e.user_id for e in seven_tree] == list(range(7))
        assert check_tree(seven_tree) == []

    def test_ties_broken_by_user_id(self):
        """Test that equal trust places the smaller user_id closer to the root."""
        tree = TrustTree.build([TrustEntry(9, 5), TrustEntry(4, 5), TrustEntry(6, 5)], 2)
        assert [e.user_id for e in tree] == [4, 6, 9]

    def test_accepts_pairs(self):
        """Test that (user_id, trust) pairs are accepted."""
        tree = TrustTree.build([(1, 3), (2, 8)], 2)
        assert tree.root.user_id == 2

    def test_duplicate_rejected(self):
        """Test that a duplicate user_id is rejected and named."""
        with pytest.raises(DuplicatePeerError, match="7"):
            TrustTree.build([TrustEntry(7, 1), TrustEntry(7, 2)], 2)

    def test_level_groups(self, seven_tree):
        """Test that level groups follow the level-order layout."""
        groups = seven_tree.level_groups()
        assert [[e.user_id for e in g] for g in groups] == [[0], [1, 2], [3, 4, 5, 6]]

    def test_from_level_order_rejects_heap_violation(self):
        """Test that an explicit layout with a child above its parent is rejected."""
        with pytest.raises(DomainError):
            TrustTree.from_level_order([TrustEntry(1, 1), TrustEntry(2, 9)], 2)

    def test_fanout_validated(self):
        """Test that a fanout below 2 is rejected."""
        with pytest.raises(DomainError):
            TrustTree(1)


class TestAssignRanks:
    """Test suite for in-order rank assignment."""

    def test_single_node(self):
        """Test that a lone root gets rank 0."""
        tree = TrustTree.build([TrustEntry(5, 1)], 2)
        assert tree.assign_ranks() == {5: 0}

    def test_three_nodes(self, abc_tree):
        """Test the in-order ranks of a three-node tree."""
        assert abc_tree.assign_ranks() == {2: 0, 1: 1, 3: 2}

    def test_root_of_seven_is_middle(self, seven_tree):
        """Test that the root of a full 7-node binary tree gets rank 3."""
        ranks = seven_tree.assign_ranks()
        assert ranks[seven_tree.root.user_id] == 3
        assert sorted(ranks.values()) == list(range(7))

    def test_ternary_ranks_are_a_permutation(self):
        """Test that d = 3 ranks cover 0..n-1 exactly once."""
        tree = TrustTree.build([TrustEntry(i, 100 - i) for i in range(13)], 3)
        assert sorted(tree.assign_ranks().values()) == list(range(13))

    def test_empty(self):
        """Test that an empty tree has no ranks."""
        assert TrustTree(2).assign_ranks() == {}


class TestJoin:
    """Test suite for TrustTree.join."""

    def test_join_empty_becomes_root(self):
        """Test that the first peer becomes root without swaps."""
        tree = TrustTree(2)
        outcome = tree.join(TrustEntry(1, 0))
        assert tree.root.user_id == 1
        assert outcome.slot == 0
        assert outcome.swaps == 0

    def test_high_trust_sifts_to_root(self, abc_tree):
        """Test that trust 99 climbs to the root in two swaps."""
        outcome = abc_tree.join(TrustEntry(4, 99))
        assert abc_tree.root.user_id == 4
        assert outcome.swaps == 2
        assert outcome.swap_path == (1, 0)
        assert check_tree(abc_tree) == []

    def test_low_trust_stays_leftmost_deepest(self, abc_tree):
        """Test that trust 1 lands in slot 3 without swaps."""
        outcome = abc_tree.join(TrustEntry(4, 1))
        assert outcome.slot == 3
        assert outcome.swaps == 0

    def test_duplicate_join_rejected(self, abc_tree):
        """Test that joining an id already in the tree fails."""
        with pytest.raises(DuplicatePeerError):
            abc_tree.join(TrustEntry(2, 50))
        assert abc_tree.size == 3


class TestLeave:
    """Test suite for departure classification and TrustTree.leave."""

    def test_last_slot_is_no_rebalance(self, abc_tree):
        """Test that the last level-order peer leaves without rebalancing."""
        assert abc_tree.classify_departure(3) is DepartureClass.NO_REBALANCE
        outcome = abc_tree.leave(3)
        assert outcome.swaps == 0
        assert [e.user_id for e in abc_tree] == [1, 2]

    def test_root_is_rebalance(self, abc_tree):
        """Test that the root of a three-node tree forces a rebalance."""
        assert abc_tree.classify_departure(1) is DepartureClass.REBALANCE

    def test_deepest_leaf_not_last_is_rebalance(self):
        """Test that a leaf on the deepest level other than slot n-1 forces a rebalance."""
        tree = TrustTree.build([TrustEntry(i, 50 - i) for i in range(5)], 2)
        assert tree.classify_departure(tree.entry_at(3).user_id) is DepartureClass.REBALANCE

    def test_root_leave_sifts_down(self, abc_tree):
        """Test that C refills the root and sinks below B."""
        outcome = abc_tree.leave(1)
        assert outcome.departure_class is DepartureClass.REBALANCE
        assert outcome.replacement == 3
        assert [e.user_id for e in abc_tree] == [2, 3]
        assert outcome.swaps == 1

    def test_replacement_can_sift_up(self):
        """Test that a refill from the last slot can climb in another subtree."""
        tree = TrustTree.from_level_order(
            [TrustEntry(0, 100), TrustEntry(1, 10), TrustEntry(2, 90), TrustEntry(3, 5),
             TrustEntry(4, 4), TrustEntry(5, 80)],
            2,
        )
        outcome = tree.leave(3)
        assert outcome.replacement == 5
        assert tree.entry_at(1).user_id == 5
        assert check_tree(tree) == []

    def test_size_and_height_after_leave(self, seven_tree):
        """Test that every leave gives size n-1 and the matching height."""
        for user_id in (0, 3, 6, 2):
            before = seven_tree.size
            seven_tree.leave(user_id)
            assert seven_tree.size == before - 1
            assert seven_tree.height == levels(before - 1, 2)
            assert check_tree(seven_tree) == []

    def test_unknown_peer(self, abc_tree):
        """Test that leaving with an unknown id fails."""
        with pytest.raises(UnknownPeerError):
            abc_tree.leave(42)

    def test_last_peer_leaves(self):
        """Test that the tree can be emptied."""
        tree = TrustTree.build([TrustEntry(1, 1)], 2)
        tree.leave(1)
        assert tree.size == 0
        assert tree.root is None


class TestTrustEntry:
    """Test suite for ranking entries placed at different instants."""

    def test_later_placement_with_less_growth_ranks_lower(self):
        """Test that trust 5 read at t=10 ranks below trust 0 read at t=1."""
        early = TrustEntry(1, 0, placed_at=1)
        late = TrustEntry(2, 5, placed_at=10)
        assert late.trust_at(20) == 15
        assert early.trust_at(20) == 19
        assert rank_key(early) < rank_key(late)

    def test_rejoin_does_not_climb_past_more_trusted_peer(self):
        """Test that joins stamped with their instant keep heap order on current trust."""
        tree = TrustTree.build([TrustEntry(0, 1000), TrustEntry(1, 0, placed_at=1)], 2)
        tree.join(TrustEntry(3, 0, placed_at=8))
        outcome = tree.join(TrustEntry(2, 5, placed_at=10))
        assert outcome.swaps == 0
        assert tree.entry_at(tree.parent_index(outcome.slot)).user_id == 1
        assert check_tree(tree) == []

    def test_default_stamp_ranks_on_trust(self):
        """Test that entries without a stamp rank on trust, ties by user_id."""
        assert rank_key(TrustEntry(4, 7)) == (-7, 4)
