"""
Directory: the lookup table kept by the controlling server.

Each peer has one record holding its cumulative online time (its trust) and
its liveness. Online time is only ever added to: closing a session adds the
session length, and a returning peer keeps everything it accumulated before.

The table can be persisted as a small CSV file:

    user_id,online_time,status
    0,1532,Online
    1,88,Offline

Rows are sorted by user_id, UTF-8, LF line endings.
"""

import logging
import re
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Union

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import LOOKUP_TABLE_COLUMNS
from core.exceptions import (
    DomainError,
    DuplicatePeerError,
    LookupTableParseError,
    PeerStateError,
    UnknownPeerError,
)
from core.trust_tree import TrustEntry

logger = logging.getLogger(__name__)

CsvTarget = Union[str, Path, IO[str]]


class PeerStatus(str, Enum):
    """Liveness of a peer."""
    ONLINE = "Online"
    OFFLINE = "Offline"


class PeerRecord(BaseModel):
    """
    One lookup-table row.

    Attributes:
        user_id: Unique, non-negative peer identifier
        online_time: Cumulative online seconds across all closed sessions
        status: Online or Offline
        session_started_at: Start of the open session (present iff Online)
    """
    model_config = ConfigDict(frozen=True)

    user_id: int = Field(ge=0)
    online_time: int = Field(default=0, ge=0)
    status: PeerStatus = PeerStatus.OFFLINE
    session_started_at: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _session_stamp_matches_status(self) -> "PeerRecord":
        online = self.status is PeerStatus.ONLINE
        if online != (self.session_started_at is not None):
            raise ValueError("session_started_at must be set exactly when the peer is Online")
        return self

    @property
    def is_online(self) -> bool:
        return self.status is PeerStatus.ONLINE

    def trust_at(self, now: int) -> int:
        """Cumulative online time including the open session, if any."""
        if self.session_started_at is None:
            return self.online_time
        return self.online_time + max(0, now - self.session_started_at)


class LookupTable:
    """
    Peer records keyed by user_id, with a revision counter.

    The revision increases on every mutation (new record, status change)
    and never on reads.
    """

    def __init__(self, records: Optional[Iterable[PeerRecord]] = None):
        self._records: dict[int, PeerRecord] = {}
        self.revision = 0
        for record in records or ():
            if record.user_id in self._records:
                raise DuplicatePeerError(record.user_id, "lookup table")
            self._records[record.user_id] = record

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, user_id: object) -> bool:
        return user_id in self._records

    def __iter__(self) -> Iterator[PeerRecord]:
        return iter([self._records[k] for k in sorted(self._records)])

    def get(self, user_id: int) -> PeerRecord:
        try:
            return self._records[user_id]
        except KeyError:
            raise UnknownPeerError(user_id, "lookup table") from None

    def online_ids(self) -> list[int]:
        return sorted(uid for uid, r in self._records.items() if r.is_online)

    def offline_ids(self) -> list[int]:
        return sorted(uid for uid, r in self._records.items() if not r.is_online)

    def rows(self) -> list[tuple[int, int, str]]:
        """Persisted fields of every record, sorted by user_id."""
        return [(r.user_id, r.online_time, r.status.value) for r in self]

    def _store(self, record: PeerRecord) -> PeerRecord:
        self._records[record.user_id] = record
        self.revision += 1
        return record

    # ------------------------------------------------------------------
    # Operations
    # ------------------------------------------------------------------

    def upsert(self, user_id: int, initial_online_time: int = 0) -> PeerRecord:
        """
        Create an Offline record if absent; otherwise return the existing one.

        Args:
            user_id: Peer identifier
            initial_online_time: Online time for a newly created record

        Returns:
            The stored record (unchanged if it already existed)
        """
        existing = self._records.get(user_id)
        if existing is not None:
            return existing
        return self._store(PeerRecord(user_id=user_id, online_time=initial_online_time))

    def mark_online(self, user_id: int, now: int) -> PeerRecord:
        """
        Open a session at `now`.

        Raises:
            UnknownPeerError: If the record does not exist
            PeerStateError: If the peer is already Online
        """
        record = self.get(user_id)
        if record.is_online:
            raise PeerStateError(f"Peer {user_id} is already Online")
        return self._store(record.model_copy(update={
            "status": PeerStatus.ONLINE,
            "session_started_at": now,
        }))

    def mark_offline(self, user_id: int, now: int) -> PeerRecord:
        """
        Close the open session, adding its length to online_time.

        Raises:
            UnknownPeerError: If the record does not exist
            PeerStateError: If the peer is already Offline
            DomainError: If `now` precedes the session start
        """
        record = self.get(user_id)
        if not record.is_online:
            raise PeerStateError(f"Peer {user_id} is already Offline")
        elapsed = now - record.session_started_at
        if elapsed < 0:
            raise DomainError(f"Peer {user_id} cannot go offline at {now}, before its session start {record.session_started_at}")
        return self._store(record.model_copy(update={
            "status": PeerStatus.OFFLINE,
            "session_started_at": None,
            "online_time": record.online_time + elapsed,
        }))

    def snapshot_for_build(self, now: int) -> list[TrustEntry]:
        """
        Trust of every Online peer at instant `now`, sorted by user_id.

        Offline peers are excluded; an Online peer's trust includes the time
        elapsed in its current session. Entries are stamped with `now` so
        they rank consistently against peers placed later.
        """
        return [
            TrustEntry(r.user_id, r.trust_at(now), now)
            for r in self
            if r.is_online
        ]


# ============================================================================
# CSV PERSISTENCE
# ============================================================================

def save_csv(table: LookupTable, destination: CsvTarget) -> None:
    """
    Write the lookup table as CSV (header only when empty).

    Args:
        table: Table to persist
        destination: File path or text stream
    """
    frame = pd.DataFrame(table.rows(), columns=list(LOOKUP_TABLE_COLUMNS))
    frame.to_csv(destination, index=False, lineterminator="\n")
    logger.info(f"Saved lookup table with {len(table)} records")


_INT_PATTERN = re.compile(r"^-?\d+$")
_PARSER_LINE = re.compile(r"line (\d+)")


def _cell(value: object, field: str, line: int) -> str:
    if not isinstance(value, str) or not value.strip():
        raise LookupTableParseError(line, f"missing {field}")
    return value.strip()


def _parse_count(value: object, field: str, line: int) -> int:
    text = _cell(value, field, line)
    if not _INT_PATTERN.match(text):
        raise LookupTableParseError(line, f"{field} is not an integer: {text!r}")
    number = int(text)
    if number < 0:
        raise LookupTableParseError(line, f"{field} must be non-negative, got {number}")
    return number


def _undecodable_line(source: CsvTarget) -> int:
    """Line of the first byte that is not valid UTF-8, or 0 if it cannot be told."""
    if not isinstance(source, (str, Path)):
        return 0
    data = Path(source).read_bytes()
    try:
        data.decode("utf-8")
    except UnicodeDecodeError as exc:
        return data[:exc.start].count(b"\n") + 1
    return 0


def load_csv(source: CsvTarget, now: int = 0) -> LookupTable:
    """
    Read a lookup table written by `save_csv`.

    Online rows get their session clock started at `now`.

    Args:
        source: File path or text stream
        now: Simulation time at which the table is loaded

    Returns:
        A new LookupTable (revision 0)

    Raises:
        LookupTableParseError: On a malformed header or row (with line number)
            or bytes that are not UTF-8
        DuplicatePeerError: If a user_id appears twice
    """
    try:
        frame = pd.read_csv(source, dtype=str, encoding="utf-8", keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise LookupTableParseError(1, "file is empty, expected a header") from None
    except pd.errors.ParserError as exc:
        match = _PARSER_LINE.search(str(exc))
        line = int(match.group(1)) if match else 0
        raise LookupTableParseError(line, "wrong number of fields") from exc
    except UnicodeDecodeError as exc:
        raise LookupTableParseError(_undecodable_line(source), "not valid UTF-8") from exc

    if tuple(frame.columns) != LOOKUP_TABLE_COLUMNS:
        raise LookupTableParseError(1, f"expected header {','.join(LOOKUP_TABLE_COLUMNS)}")

    table = LookupTable()
    # Header is line 1, first data row is line 2
    for line, row in enumerate(frame.itertuples(index=False, name=None), start=2):
        raw_id, raw_time, raw_status = row
        user_id = _parse_count(raw_id, "user_id", line)
        online_time = _parse_count(raw_time, "online_time", line)
        status_text = _cell(raw_status, "status", line)
        try:
            status = PeerStatus(status_text)
        except ValueError:
            raise LookupTableParseError(line, f"unknown status {status_text!r}") from None

        if user_id in table:
            raise DuplicatePeerError(user_id, "lookup table")
        table._records[user_id] = PeerRecord(
            user_id=user_id,
            online_time=online_time,
            status=status,
            session_started_at=now if status is PeerStatus.ONLINE else None,
        )

    logger.info(f"Loaded lookup table with {len(table)} records")
    return table
