"""
Agents package for TrustKey.

This package contains the protocol actors: the Key Distribution Center and
the controlling server that mediates between the KDC and the peer tree.
"""

from agents.kdc import (
    KeyDistributionCenter,
    SessionKey,
)
from agents.controlling_server import (
    ControllingServer,
    MembershipChange,
)

__all__ = [
    "KeyDistributionCenter",
    "SessionKey",
    "ControllingServer",
    "MembershipChange",
]
