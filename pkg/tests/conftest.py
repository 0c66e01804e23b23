"""
Pytest configuration and shared fixtures.

This module provides common test fixtures and configuration for all tests.
"""

import logging

import pytest

from agents import ControllingServer, KeyDistributionCenter
from core.directory import LookupTable
from core.trust_tree import TrustEntry, TrustTree
from tools.propagation import LatencyConfig
from workflow.simulator import SimConfig


@pytest.fixture(autouse=True)
def detach_console_logging():
    """Drop the CLI console handler after each test; its captured stream is closed by then."""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if handler.get_name() == "trustkey-console":
            root.removeHandler(handler)


@pytest.fixture
def abc_entries() -> list[TrustEntry]:
    """
    Three peers A=1, B=2, C=3 with trusts 10, 5 and 2.

    Returns:
        Entries in user_id order
    """
    return [TrustEntry(1, 10), TrustEntry(2, 5), TrustEntry(3, 2)]


@pytest.fixture
def abc_tree(abc_entries) -> TrustTree:
    """Binary tree built from the A/B/C peers: root A, children [B, C]."""
    return TrustTree.build(abc_entries, 2)


@pytest.fixture
def seven_tree() -> TrustTree:
    """Full binary tree of 7 peers with distinct descending trusts."""
    return TrustTree.build([TrustEntry(i, 70 - 10 * i) for i in range(7)], 2)


@pytest.fixture
def populated_table() -> LookupTable:
    """
    Lookup table with three Online peers and one Offline peer.

    Returns:
        LookupTable with sessions opened at time 0
    """
    table = LookupTable()
    for user_id, online_time in [(0, 40), (1, 30), (2, 20), (3, 10)]:
        table.upsert(user_id, online_time)
    for user_id in (0, 1, 2):
        table.mark_online(user_id, 0)
    return table


@pytest.fixture
def server(populated_table) -> ControllingServer:
    """Controlling server over the populated table with its tree built at time 0."""
    srv = ControllingServer(table=populated_table, kdc=KeyDistributionCenter(7), fanout=2)
    srv.rebuild_tree(0)
    return srv


@pytest.fixture
def default_latency() -> LatencyConfig:
    return LatencyConfig()


@pytest.fixture
def churn_config() -> SimConfig:
    """Small seeded churn run that finishes quickly."""
    return SimConfig(
        node_count=40,
        fanout=3,
        seed=1234,
        duration=30,
        join_rate=1.0,
        leave_rate=1.0,
        rejoin_pool=True,
    )
