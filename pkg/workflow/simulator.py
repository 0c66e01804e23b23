"""
Discrete-event churn simulator.

This module contains the ChurnSimulator class that builds an initial peer
group, distributes the first key and then replays a random join/leave
workload through the controlling server, one rekey per membership event.

Churn model: at every time unit t = 1..duration the number of leaves and
joins are drawn from Poisson distributions with the configured rates.
Leavers are picked uniformly among Online peers; joiners are new ids, or,
with the rejoin pool enabled, a random Offline id half of the time. Events
sharing a timestamp run Leave before Join, then by ascending user_id.
"""

import heapq
import logging
import statistics
from enum import IntEnum
from typing import Generator, Literal, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import (
    DEFAULT_FANOUT,
    DEFAULT_ONLINE_TIME_HIGH,
    DEFAULT_ONLINE_TIME_LOW,
    DEFAULT_SEED,
    MAX_SEED,
    MIN_FANOUT,
    REJOIN_PROBABILITY,
)
from core.directory import LookupTable
from core.trust_tree import DepartureClass, TrustTree, levels
from agents import ControllingServer, KeyDistributionCenter
from tools.propagation import LatencyConfig, RekeyReport, Trigger

logger = logging.getLogger(__name__)


# ============================================================================
# CONFIGURATION MODELS
# ============================================================================

class UniformInt(BaseModel):
    """Uniform integer distribution over [lo, hi] for initial online times."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["uniform_int"] = "uniform_int"
    lo: int = Field(default=DEFAULT_ONLINE_TIME_LOW, ge=0)
    hi: int = Field(default=DEFAULT_ONLINE_TIME_HIGH, ge=0)

    @model_validator(mode="after")
    def _ordered_bounds(self) -> "UniformInt":
        if self.lo > self.hi:
            raise ValueError(f"lo ({self.lo}) must not exceed hi ({self.hi})")
        return self

    def sample(self, rng: np.random.Generator, size: int) -> list[int]:
        return rng.integers(self.lo, self.hi, endpoint=True, size=size).tolist()


class SimConfig(BaseModel):
    """
    Parameters of one simulation run.

    Attributes:
        node_count: Peers online at time 0
        fanout: Children per node in the dissemination tree
        seed: Root seed for every random draw of the run
        duration: Number of churn time units after the initial distribution
        join_rate: Expected joins per time unit
        leave_rate: Expected leaves per time unit
        initial_time_distribution: Distribution of the initial online times
        latency: Rekey latency settings
        rejoin_pool: Let half of the joins reuse Offline ids
    """
    model_config = ConfigDict(frozen=True)

    node_count: int = Field(default=0, ge=0)
    fanout: int = Field(default=DEFAULT_FANOUT, ge=MIN_FANOUT)
    seed: int = Field(default=DEFAULT_SEED, ge=0, le=MAX_SEED)
    duration: int = Field(default=0, ge=0)
    join_rate: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    leave_rate: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    initial_time_distribution: UniformInt = Field(default_factory=UniformInt)
    latency: LatencyConfig = Field(default_factory=LatencyConfig)
    rejoin_pool: bool = False


# ============================================================================
# EVENTS AND RESULTS
# ============================================================================

class EventKind(IntEnum):
    # Value order is the processing order within one timestamp
    LEAVE = 0
    JOIN = 1


class ChurnEvent(NamedTuple):
    time: int
    kind: EventKind
    user_id: int


class SimEvent(BaseModel):
    """
    One processed event and the rekey it caused.

    Attributes:
        event_time: Simulation time of the event (0 for the initial key)
        swaps: Sift swaps the tree needed
        trust: Placement trust (join) or banked online time (leave)
        departure_class: Rebalance classification of a leave
        report: The resulting rekey report
    """
    model_config = ConfigDict(frozen=True)

    event_time: int
    swaps: int = 0
    trust: Optional[int] = None
    departure_class: Optional[DepartureClass] = None
    report: RekeyReport

    @property
    def trigger(self) -> Trigger:
        return self.report.trigger


class SimMetrics(BaseModel):
    """Aggregated results of a run; every aggregate is derived from `events`."""
    config: SimConfig
    events: list[SimEvent] = Field(default_factory=list)

    @property
    def reports(self) -> list[RekeyReport]:
        return [e.report for e in self.events]

    @property
    def rekey_count(self) -> int:
        return len(self.events)

    @property
    def mean_completion_time(self) -> float:
        if not self.events:
            return 0.0
        return statistics.fmean(r.completion_time for r in self.reports)

    @property
    def max_completion_time(self) -> int:
        return max((r.completion_time for r in self.reports), default=0)

    @property
    def total_messages(self) -> int:
        return sum(r.message_count for r in self.reports)

    @property
    def total_swaps(self) -> int:
        return sum(e.swaps for e in self.events)

    @property
    def mean_notify_time(self) -> float:
        if not self.events:
            return 0.0
        return statistics.fmean(r.notify_time for r in self.reports)

    @property
    def departure_counts(self) -> dict[DepartureClass, int]:
        counts = {c: 0 for c in DepartureClass}
        for event in self.events:
            if event.departure_class is not None:
                counts[event.departure_class] += 1
        return counts

    @property
    def final_coverage(self) -> list[tuple[int, int]]:
        """
        Per-level coverage of the last rekey that reached at least one peer.

        Same representation as `coverage_curve`; empty if no rekey ever
        reached a peer.
        """
        for report in reversed(self.reports):
            if report.tree_size:
                return report.level_curve(self.config.latency)
        return []


# ============================================================================
# SIMULATOR
# ============================================================================

class ChurnSimulator:
    """
    Replays a seeded churn workload against a controlling server.

    The run is fully determined by the SimConfig (including its seed) and,
    optionally, a preloaded lookup table.
    """

    def __init__(self, config: SimConfig, table: Optional[LookupTable] = None):
        """
        Initialize the simulator.

        Args:
            config: Validated simulation parameters
            table: Optional initial lookup table; when given, its peers form
                the initial group instead of `node_count` random peers
        """
        self.config = config
        self._initial_table = table

        # Independent streams so that e.g. the key stream does not shift
        # when the churn draws change
        times_seed, churn_seed, kdc_seed = np.random.SeedSequence(config.seed).spawn(3)
        self._times_rng = np.random.default_rng(times_seed)
        self._churn_rng = np.random.default_rng(churn_seed)

        self.server = ControllingServer(
            kdc=KeyDistributionCenter(kdc_seed),
            latency=config.latency,
            fanout=config.fanout,
        )
        self._next_id = 0

    @property
    def table(self) -> LookupTable:
        return self.server.table

    @property
    def tree(self) -> TrustTree:
        return self.server.tree

    def _populate(self) -> None:
        table = self.server.table
        if self._initial_table is not None:
            for record in self._initial_table:
                table.upsert(record.user_id, record.online_time)
                table.mark_online(record.user_id, 0)
        else:
            times = self.config.initial_time_distribution.sample(self._times_rng, self.config.node_count)
            for user_id, online_time in enumerate(times):
                table.upsert(user_id, online_time)
                table.mark_online(user_id, 0)

        self.server.rebuild_tree(0)
        self._next_id = max((r.user_id for r in table), default=-1) + 1

    def _draw_events(self, now: int) -> list[ChurnEvent]:
        rng = self._churn_rng
        cfg = self.config
        leave_count = int(rng.poisson(cfg.leave_rate))
        join_count = int(rng.poisson(cfg.join_rate))

        online = self.table.online_ids()
        take = min(leave_count, len(online))
        if take < leave_count:
            logger.warning(f"t={now}: {leave_count - take} leave(s) skipped, only {len(online)} peer(s) online")
        leavers = [int(u) for u in rng.choice(online, size=take, replace=False)] if take else []

        pool: list[int] = []
        if cfg.rejoin_pool:
            leaving = set(leavers)
            pool = [u for u in self.table.offline_ids() if u not in leaving]

        joiners: list[int] = []
        for _ in range(join_count):
            if pool and rng.random() < REJOIN_PROBABILITY:
                joiners.append(pool.pop(int(rng.integers(len(pool)))))
            else:
                joiners.append(self._next_id)
                self._next_id += 1

        queue: list[ChurnEvent] = []
        for user_id in leavers:
            heapq.heappush(queue, ChurnEvent(now, EventKind.LEAVE, user_id))
        for user_id in joiners:
            heapq.heappush(queue, ChurnEvent(now, EventKind.JOIN, user_id))
        return queue

    def _apply(self, event: ChurnEvent) -> SimEvent:
        if event.kind is EventKind.LEAVE:
            change = self.server.release(event.user_id, event.time)
        else:
            change = self.server.admit(event.user_id, event.time)
        return SimEvent(
            event_time=event.time,
            swaps=change.swaps,
            trust=change.trust,
            departure_class=change.departure_class,
            report=change.report,
        )

    def run_stream(self) -> Generator[SimEvent, None, None]:
        """
        Execute the simulation and yield every processed event.

        The tree and lookup table reflect each event at the moment it is
        yielded.

        Yields:
            SimEvent for the initial distribution (if any peer is online)
            and for every churn event, in processing order
        """
        cfg = self.config
        logger.info(
            f"Simulation started: n={cfg.node_count}, d={cfg.fanout}, seed={cfg.seed}, "
            f"duration={cfg.duration}, join_rate={cfg.join_rate}, leave_rate={cfg.leave_rate}"
        )
        self._populate()

        if self.tree.size:
            yield SimEvent(event_time=0, report=self.server.distribute_initial_key())

        for now in range(1, cfg.duration + 1):
            queue = self._draw_events(now)
            while queue:
                yield self._apply(heapq.heappop(queue))

    def run(self) -> SimMetrics:
        """Execute the simulation and aggregate its results."""
        metrics = SimMetrics(config=self.config, events=list(self.run_stream()))
        logger.info(
            f"Simulation finished: {metrics.rekey_count} rekeys, final size {self.tree.size}, "
            f"max completion {metrics.max_completion_time}"
        )
        return metrics


def run(cfg: SimConfig, table: Optional[LookupTable] = None) -> SimMetrics:
    """Run one simulation (convenience wrapper around ChurnSimulator)."""
    return ChurnSimulator(cfg, table).run()


def coverage_curve(n: int, d: int, latency: Optional[LatencyConfig] = None) -> list[tuple[int, int]]:
    """
    Static coverage curve of a full complete d-ary tree of n peers.

    The entry for level t sits at chart time t * per_level (plus the chart
    shift) and equals min(n, (d**(t+1) - 1) / (d - 1)).

    Returns:
        List of (chart time, cumulative peers covered); empty for n = 0

    Raises:
        DomainError: If n < 0 or d < 2
    """
    latency = latency or LatencyConfig()
    height = levels(n, d)
    if n == 0:
        return []

    shift = latency.chart_shift
    if latency.per_level == 0:
        return [(shift, n)]

    curve: list[tuple[int, int]] = []
    capacity, width = 0, 1
    for t in range(height + 1):
        capacity += width
        width *= d
        curve.append((shift + t * latency.per_level, min(n, capacity)))
    return curve
