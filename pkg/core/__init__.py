"""
Core package for TrustKey.

This package contains the trust tree, the lookup table and the shared
exception hierarchy.
"""

from core.exceptions import (
    TrustKeyError,
    DomainError,
    DuplicatePeerError,
    UnknownPeerError,
    PeerStateError,
    LookupTableParseError,
    InvalidConfigError,
)
from core.trust_tree import (
    TrustTree,
    TrustEntry,
    RankValue,
    DepartureClass,
    JoinOutcome,
    LeaveOutcome,
    eq1_height_bound,
    levels,
)
from core.directory import (
    PeerRecord,
    PeerStatus,
    LookupTable,
    save_csv,
    load_csv,
)

__all__ = [
    "TrustKeyError",
    "DomainError",
    "DuplicatePeerError",
    "UnknownPeerError",
    "PeerStateError",
    "LookupTableParseError",
    "InvalidConfigError",
    "TrustTree",
    "TrustEntry",
    "RankValue",
    "DepartureClass",
    "JoinOutcome",
    "LeaveOutcome",
    "eq1_height_bound",
    "levels",
    "PeerRecord",
    "PeerStatus",
    "LookupTable",
    "save_csv",
    "load_csv",
]
