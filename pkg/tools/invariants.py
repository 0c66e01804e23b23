"""
Invariant checkers, brute-force oracles and the verification suites.

The checkers return a list of violation messages (empty when everything
holds) rather than raising, so callers can collect every problem at once.
`run_suites` bundles them into the property suites behind the CLI's
`verify` command.
"""

import io
import logging
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Iterable

import numpy as np

from config import (
    DEFAULT_SEED,
    VERIFY_CHURN_EVENTS,
    VERIFY_FULL_MAX_N,
    VERIFY_FULL_OPERATIONS,
    VERIFY_QUICK_MAX_N,
    VERIFY_QUICK_OPERATIONS,
)
from core.directory import LookupTable, PeerRecord, PeerStatus, load_csv, save_csv
from core.trust_tree import TrustEntry, TrustTree, as_entry, eq1_height_bound, levels, rank_key
from tools.propagation import LatencyConfig, RekeyReport, TriggerKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuiteResult:
    """Outcome of one verification suite."""
    name: str
    passed: bool
    checked: int
    detail: str = ""


# ============================================================================
# CHECKERS
# ============================================================================

def structural_height(tree: TrustTree) -> int:
    """Height measured by walking parent links up from the last slot."""
    hops = 0
    slot = tree.size - 1
    while slot > 0:
        slot = tree.parent_index(slot)
        hops += 1
    return hops


def check_tree(tree: TrustTree) -> list[str]:
    """
    Check completeness, trust-heap order and the height formula.

    Completeness is structural (slots are a gap-free list); what can drift is
    the user_id -> slot map, so that is checked instead.
    """
    problems: list[str] = []
    entries = tree.entries

    if len({e.user_id for e in entries}) != len(entries):
        problems.append("duplicate user_id in slots")
    for slot, entry in enumerate(entries):
        if entry.user_id not in tree or tree.slot_of(entry.user_id) != slot:
            problems.append(f"location map disagrees for user {entry.user_id} at slot {slot}")
        parent = tree.parent_index(slot)
        if parent is not None and rank_key(entries[parent]) > rank_key(entry):
            problems.append(f"slot {slot} (user {entry.user_id}) outranks parent slot {parent}")

    expected = levels(tree.size, tree.fanout)
    if tree.height != expected or structural_height(tree) != expected:
        problems.append(f"height {structural_height(tree)} differs from levels({tree.size}, {tree.fanout}) = {expected}")
    return problems


def check_trust_order(tree: TrustTree, table: LookupTable, now: int) -> list[str]:
    """Check heap order against the lookup table's trust at instant `now`."""
    current = {e.user_id: e.trust for e in table.snapshot_for_build(now)}
    problems: list[str] = []
    for slot, entry in enumerate(tree.entries):
        if entry.user_id not in current:
            problems.append(f"user {entry.user_id} is in the tree but not Online")
            continue
        parent_slot = tree.parent_index(slot)
        if parent_slot is None:
            continue
        parent = tree.entry_at(parent_slot).user_id
        if parent in current and (-current[entry.user_id], entry.user_id) < (-current[parent], parent):
            problems.append(
                f"t={now}: user {entry.user_id} (trust {current[entry.user_id]}) sits below "
                f"user {parent} (trust {current[parent]})"
            )
    return problems


def heap_layouts(entries: Iterable[Any], fanout: int) -> set[tuple[int, ...]]:
    """
    Every level-order layout of `entries` satisfying heap order and tie rules.

    Exhaustive; meant for n <= 8.

    Returns:
        Set of user_id tuples in level order
    """
    items = sorted((as_entry(e) for e in entries), key=rank_key)
    layouts: set[tuple[int, ...]] = set()
    placed: list[TrustEntry] = []
    used = [False] * len(items)

    def place(slot: int) -> None:
        if slot == len(items):
            layouts.add(tuple(e.user_id for e in placed))
            return
        parent = placed[(slot - 1) // fanout] if slot else None
        for k, entry in enumerate(items):
            if used[k] or (parent is not None and rank_key(entry) < rank_key(parent)):
                continue
            used[k] = True
            placed.append(entry)
            place(slot + 1)
            placed.pop()
            used[k] = False

    place(0)
    return layouts


def bfs_delivery_times(tree: TrustTree, latency: LatencyConfig) -> dict[int, int]:
    """Chart time of every peer, computed by a plain breadth-first walk."""
    times: dict[int, int] = {}
    if tree.size == 0:
        return times
    queue = deque([(0, latency.chart_shift)])
    while queue:
        slot, at = queue.popleft()
        times[tree.entry_at(slot).user_id] = at
        for child in tree.child_indices(slot):
            queue.append((child, at + latency.per_level))
    return times


def check_report(report: RekeyReport, tree: TrustTree, latency: LatencyConfig) -> list[str]:
    """Check a rekey report against the tree it was produced on."""
    problems: list[str] = []
    coverage = report.coverage_by_time

    if any(a > b for a, b in zip(coverage, coverage[1:])):
        problems.append(f"v{report.key_version}: coverage decreases")
    if report.final_coverage != tree.size:
        problems.append(f"v{report.key_version}: coverage ends at {report.final_coverage}, tree has {tree.size}")
    if tree.size == 0:
        return problems

    if report.message_count != tree.size + 1:
        problems.append(f"v{report.key_version}: {report.message_count} messages for {tree.size} peers")
    if report.covered_at != bfs_delivery_times(tree, latency):
        problems.append(f"v{report.key_version}: delivery times differ from breadth-first oracle")
    for slot in range(1, tree.size):
        child = tree.entry_at(slot).user_id
        parent = tree.entry_at(tree.parent_index(slot)).user_id
        if report.covered_at.get(child, -1) < report.covered_at.get(parent, 0):
            problems.append(f"v{report.key_version}: user {child} covered before its parent {parent}")
    full = latency.chart_shift + latency.per_level * tree.height
    if report.chart_time_full_coverage != full:
        problems.append(f"v{report.key_version}: full coverage at {report.chart_time_full_coverage}, expected {full}")
    return problems


# ============================================================================
# SUITES
# ============================================================================

def _suite_height_bound(max_n: int) -> SuiteResult:
    checked = 0
    for d in range(2, 17):
        for n in range(1, max_n + 1):
            brute = max(h for h in range(0, n.bit_length() + 1) if 2 * d**h <= n + 1)
            if eq1_height_bound(n, d) != brute:
                return SuiteResult("height_bound", False, checked, f"n={n}, d={d}: {eq1_height_bound(n, d)} != {brute}")
            checked += 1
    if eq1_height_bound(333, 2) != 7:
        return SuiteResult("height_bound", False, checked, "eq1_height_bound(333, 2) != 7")
    return SuiteResult("height_bound", True, checked)


def _suite_levels(max_n: int) -> SuiteResult:
    checked = 0
    for d in (2, 3, 4, 8):
        tree = TrustTree(d)
        if levels(0, d) != 0:
            return SuiteResult("levels", False, checked, f"levels(0, {d}) != 0")
        for n in range(1, max_n + 1):
            # Equal trusts with increasing ids: every join lands in slot n-1
            tree.join(TrustEntry(n, 0))
            if levels(n, d) != structural_height(tree):
                return SuiteResult("levels", False, checked, f"n={n}, d={d}: levels={levels(n, d)}, built={structural_height(tree)}")
            checked += 1
    if (levels(333, 2), levels(333, 3)) != (8, 5):
        return SuiteResult("levels", False, checked, "levels(333, 2/3) != (8, 5)")
    return SuiteResult("levels", True, checked)


def _suite_reference_curve() -> SuiteResult:
    from workflow.simulator import SimConfig, coverage_curve, run

    metrics = run(SimConfig(node_count=333, fanout=2))
    expected = [(t, min(333, 2 ** (t + 1) - 1)) for t in range(9)]
    if metrics.rekey_count != 1:
        return SuiteResult("reference_curve", False, 1, f"{metrics.rekey_count} rekeys in a churn-free run")
    if metrics.final_coverage != expected or coverage_curve(333, 2) != expected:
        return SuiteResult("reference_curve", False, 1, f"curve {metrics.final_coverage} != {expected}")
    return SuiteResult("reference_curve", True, len(expected))


def _suite_random_operations(operations: int, seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    problems: list[str] = []
    trees = {d: TrustTree(d) for d in (2, 3, 4)}
    next_id = 0

    for step in range(operations):
        tree = trees[(2, 3, 4)[step % 3]]
        height_before = tree.height
        if tree.size == 0 or rng.random() < 0.5:
            outcome = tree.join(TrustEntry(next_id, int(rng.integers(0, 64))))
            next_id += 1
        else:
            outcome = tree.leave(tree.entry_at(int(rng.integers(tree.size))).user_id)
        if outcome.swaps > max(height_before, tree.height) + 1:
            problems.append(f"step {step}: {outcome.swaps} swaps on height {tree.height}")
        problems.extend(f"step {step}: {p}" for p in check_tree(tree))
        if problems:
            break

    for d, tree in trees.items():
        problems.extend(check_tree(tree))
        rebuilt = TrustTree.build(tree.entries, d)
        if sorted(e.trust for e in rebuilt) != sorted(e.trust for e in tree) or rebuilt.root != tree.root:
            problems.append(f"d={d}: rebuild disagrees with incremental tree")

    return SuiteResult("random_operations", not problems, operations, "; ".join(problems[:3]))


def _suite_exhaustive_oracle(seed: int, trials: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    cache: dict[tuple[frozenset, int], set[tuple[int, ...]]] = {}
    checked = 0

    def layouts(entries: list[TrustEntry], d: int) -> set[tuple[int, ...]]:
        key = (frozenset(entries), d)
        if key not in cache:
            cache[key] = heap_layouts(entries, d)
        return cache[key]

    for d in (2, 3):
        for n in range(0, 9):
            for _ in range(trials):
                entries = [TrustEntry(i, int(t)) for i, t in enumerate(rng.integers(0, 3, size=n))]
                by_id = {e.user_id: e for e in entries}
                newcomer = TrustEntry(n, int(rng.integers(0, 3)))
                for layout in layouts(entries, d):
                    if n < 8:
                        tree = TrustTree.from_level_order([by_id[u] for u in layout], d)
                        tree.join(newcomer)
                        if tuple(e.user_id for e in tree) not in layouts(entries + [newcomer], d):
                            return SuiteResult("exhaustive_oracle", False, checked, f"join of {newcomer} into {layout}, d={d}")
                        checked += 1
                    for user_id in layout:
                        tree = TrustTree.from_level_order([by_id[u] for u in layout], d)
                        tree.leave(user_id)
                        rest = [e for e in entries if e.user_id != user_id]
                        if tuple(e.user_id for e in tree) not in layouts(rest, d):
                            return SuiteResult("exhaustive_oracle", False, checked, f"leave of {user_id} from {layout}, d={d}")
                        checked += 1
    return SuiteResult("exhaustive_oracle", True, checked)


def _suite_rekey_discipline(events: int, seed: int) -> SuiteResult:
    from workflow.simulator import ChurnSimulator, SimConfig

    cfg = SimConfig(node_count=64, fanout=3, seed=seed, duration=max(1, events // 2),
                    join_rate=1.0, leave_rate=1.0, rejoin_pool=True)
    sim = ChurnSimulator(cfg)
    problems: list[str] = []
    banked: dict[int, int] = {}
    manual = churn = 0

    for index, event in enumerate(sim.run_stream()):
        report = event.report
        if report.key_version != index + 1:
            problems.append(f"event {index}: key version {report.key_version}")
        problems.extend(check_report(report, sim.tree, cfg.latency))
        for at in (event.event_time, event.event_time + cfg.duration):
            problems.extend(check_trust_order(sim.tree, sim.table, at))
        if len(sim.table.online_ids()) != sim.tree.size:
            problems.append(f"event {index}: {len(sim.table.online_ids())} online peers, tree holds {sim.tree.size}")

        trigger = report.trigger
        if trigger.kind is TriggerKind.MANUAL:
            manual += 1
        else:
            churn += 1
        if trigger.kind is TriggerKind.LEAVE:
            banked[trigger.user_id] = event.trust
        elif trigger.kind is TriggerKind.JOIN and event.trust < banked.get(trigger.user_id, 0):
            problems.append(f"user {trigger.user_id} rejoined with less trust than it left with")
        if problems:
            break

    if not problems and manual != 1:
        problems.append(f"{manual} initial distributions")
    return SuiteResult("rekey_discipline", not problems, manual + churn, "; ".join(problems[:3]))


def _suite_cumulative_trust() -> SuiteResult:
    table = LookupTable()
    table.upsert(0, 100)
    table.mark_online(0, 0)
    table.mark_offline(0, 5)
    before_rejoin = table.get(0).online_time
    table.mark_online(0, 10)
    rejoin_trust = table.snapshot_for_build(10)[0].trust
    table.mark_offline(0, 17)
    gained = table.get(0).online_time - 100
    passed = gained == 12 and rejoin_trust >= before_rejoin
    return SuiteResult("cumulative_trust", passed, 1, "" if passed else f"gained {gained}, expected 12")


def _suite_determinism(seed: int) -> SuiteResult:
    from workflow.metrics import coverage_frame, metrics_frame, to_csv_text
    from workflow.simulator import SimConfig, run

    cfg = SimConfig(node_count=50, fanout=2, seed=seed, duration=40, join_rate=0.8, leave_rate=0.8, rejoin_pool=True)
    first, second = run(cfg), run(cfg)
    same = (
        to_csv_text(metrics_frame(first)) == to_csv_text(metrics_frame(second))
        and to_csv_text(coverage_frame(first.final_coverage)) == to_csv_text(coverage_frame(second.final_coverage))
    )
    return SuiteResult("determinism", same, 2, "" if same else "repeated run produced different CSV")


def random_table(rng: np.random.Generator, max_rows: int = 50) -> LookupTable:
    """Random lookup table; Online rows carry session start 0 as after a load."""
    ids = rng.choice(10 * max_rows, size=int(rng.integers(0, max_rows + 1)), replace=False)
    records = []
    for user_id in ids.tolist():
        online = bool(rng.random() < 0.5)
        records.append(PeerRecord(
            user_id=user_id,
            online_time=int(rng.integers(0, 10**6)),
            status=PeerStatus.ONLINE if online else PeerStatus.OFFLINE,
            session_started_at=0 if online else None,
        ))
    return LookupTable(records)


def _suite_round_trip(tables: int, seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    for i in range(tables):
        table = random_table(rng)
        buffer = io.StringIO()
        save_csv(table, buffer)
        buffer.seek(0)
        if load_csv(buffer).rows() != table.rows():
            return SuiteResult("directory_round_trip", False, i, f"table {i} changed across save/load")
    return SuiteResult("directory_round_trip", True, tables)


def _guarded(name: str, suite: Callable[[], SuiteResult]) -> SuiteResult:
    try:
        return suite()
    except Exception as e:
        logger.exception(f"Suite {name} crashed")
        return SuiteResult(name, False, 0, f"crashed: {e}")


def run_suites(quick: bool = True, seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    """
    Run every verification suite.

    Args:
        quick: Smaller sweeps (seconds) instead of the full acceptance sizes
        seed: Seed for every randomized suite

    Returns:
        One SuiteResult per suite, in a fixed order
    """
    max_n = VERIFY_QUICK_MAX_N if quick else VERIFY_FULL_MAX_N
    operations = VERIFY_QUICK_OPERATIONS if quick else VERIFY_FULL_OPERATIONS
    events = VERIFY_CHURN_EVENTS // 5 if quick else VERIFY_CHURN_EVENTS

    suites: list[tuple[str, Callable[[], SuiteResult]]] = [
        ("height_bound", lambda: _suite_height_bound(max_n)),
        ("levels", lambda: _suite_levels(max_n)),
        ("reference_curve", _suite_reference_curve),
        ("random_operations", lambda: _suite_random_operations(operations, seed)),
        ("exhaustive_oracle", lambda: _suite_exhaustive_oracle(seed, 2 if quick else 5)),
        ("rekey_discipline", lambda: _suite_rekey_discipline(events, seed)),
        ("cumulative_trust", _suite_cumulative_trust),
        ("determinism", lambda: _suite_determinism(seed)),
        ("directory_round_trip", lambda: _suite_round_trip(100 if quick else 1000, seed)),
    ]

    results = []
    for name, suite in suites:
        result = _guarded(name, suite)
        logger.info(f"Suite {name}: {'PASS' if result.passed else 'FAIL'} ({result.checked} checks)")
        results.append(result)
    return results
