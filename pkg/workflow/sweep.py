"""
Group-size sweeps: how rekey time grows with the number of peers.

For every (n, d) pair a churn-free group of n peers with seeded online
times is laid out as a trust tree and keyed once through the regular
simulator. The same group is also attached in arrival order, each peer
under a random earlier peer that still has a free child slot and without
any rebalancing, which gives the unbalanced baseline the trust tree is
compared against.
"""

import logging
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from config import DEFAULT_SEED, DEFAULT_SWEEP_FANOUTS, DEFAULT_SWEEP_NODE_COUNTS, SWEEP_COLUMNS
from core.trust_tree import eq1_height_bound
from tools.propagation import LatencyConfig
from workflow.simulator import SimConfig, run

logger = logging.getLogger(__name__)


def attachment_depths(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """
    Depth of every peer when peers attach in arrival order, never rebalanced.

    Peer 0 is the root; peer i picks a uniformly random parent among the
    peers 0..i-1 that have fewer than d children.

    Args:
        n: Number of peers
        d: Maximum number of children per peer
        rng: Source of the parent choices

    Returns:
        Integer array of length n
    """
    depths = np.zeros(n, dtype=np.int64)
    children = np.zeros(n, dtype=np.int64)
    open_parents: list[int] = [0] if n else []

    for peer in range(1, n):
        pick = int(rng.integers(len(open_parents)))
        parent = open_parents[pick]
        depths[peer] = depths[parent] + 1
        children[parent] += 1
        if children[parent] == d:
            open_parents[pick] = open_parents[-1]
            open_parents.pop()
        open_parents.append(peer)
    return depths


def sweep_frame(
    node_counts: Sequence[int] = DEFAULT_SWEEP_NODE_COUNTS,
    fanouts: Sequence[int] = DEFAULT_SWEEP_FANOUTS,
    seed: int = DEFAULT_SEED,
    latency: Optional[LatencyConfig] = None,
) -> pd.DataFrame:
    """
    Balanced and unbalanced rekey figures for every fanout and group size.

    Rows are ordered by fanout, then group size, as given.

    Args:
        node_counts: Group sizes (each >= 1)
        fanouts: Tree fanouts (each >= 2)
        seed: Seed for the online times and the unbalanced attachment
        latency: Latency settings (defaults to one unit per hop)

    Returns:
        DataFrame with columns SWEEP_COLUMNS

    Raises:
        DomainError: If a group size is below 1 or a fanout below 2
    """
    latency = latency or LatencyConfig()
    rows = []
    for d in fanouts:
        for n in node_counts:
            bound = eq1_height_bound(n, d)
            report = run(SimConfig(node_count=n, fanout=d, seed=seed, latency=latency)).reports[0]

            depths = attachment_depths(n, d, np.random.default_rng([seed, n, d]))
            unbalanced_height = int(depths.max())

            rows.append((
                n,
                d,
                bound,
                report.height,
                report.chart_time_full_coverage,
                report.completion_time,
                report.message_count,
                round(float(np.mean(list(report.covered_at.values()))), 6),
                unbalanced_height,
                latency.offsets + latency.per_level * unbalanced_height,
                round(latency.chart_shift + latency.per_level * float(depths.mean()), 6),
            ))
            logger.debug(f"Sweep n={n}, d={d}: height {report.height}, unbalanced height {unbalanced_height}")

    logger.info(f"Swept {len(rows)} (n, d) pairs")
    return pd.DataFrame(rows, columns=list(SWEEP_COLUMNS))
