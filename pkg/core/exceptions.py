"""
Exception hierarchy shared by the trust tree, directory, keying and simulator.
"""

from typing import Optional


class TrustKeyError(Exception):
    """Base class for every error raised by TrustKey."""
    pass


class DomainError(TrustKeyError, ValueError):
    """Raised when a parameter lies outside its mathematical domain."""
    pass


class DuplicatePeerError(TrustKeyError):
    """Raised when a user_id is inserted twice."""

    def __init__(self, user_id: int, where: str = "tree"):
        self.user_id = user_id
        super().__init__(f"Duplicate user_id {user_id} in {where}")


class UnknownPeerError(TrustKeyError, KeyError):
    """Raised when a user_id is not present."""

    def __init__(self, user_id: int, where: str = "tree"):
        self.user_id = user_id
        super().__init__(f"Unknown user_id {user_id} in {where}")

    def __str__(self) -> str:
        # KeyError would otherwise wrap the message in quotes
        return str(self.args[0])


class PeerStateError(TrustKeyError):
    """Raised on an invalid Online/Offline transition."""
    pass


class LookupTableParseError(TrustKeyError):
    """Raised when a lookup-table file cannot be parsed."""

    def __init__(self, line: int, reason: str, source: Optional[str] = None):
        self.line = line
        self.reason = reason
        where = f"{source}:" if source else "line "
        super().__init__(f"{where}{line}: {reason}")


class InvalidConfigError(TrustKeyError):
    """Raised when simulation parameters fail validation."""
    pass
