"""
Command-line interface for TrustKey.

Subcommands:
    bound     print the worst-case B-tree height bound for n and d
    levels    print the height of the complete d-ary tree with n peers
    simulate  run a churn simulation and write metrics.csv / coverage.csv
    coverage  print the static coverage curve as CSV or as a bar chart
    sweep     compare balanced and unbalanced rekey times over group sizes
    verify    run the invariant and oracle suites

Results go to stdout, logs and error messages to stderr. Exit status is 0 on
success, 1 on a domain or validation error and 2 on a usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from pydantic import ValidationError

from config import (
    DEFAULT_FANOUT,
    DEFAULT_KDC_GEN,
    DEFAULT_KDC_TO_SERVER,
    DEFAULT_NODE_COUNT,
    DEFAULT_ONLINE_TIME_HIGH,
    DEFAULT_ONLINE_TIME_LOW,
    DEFAULT_PER_LEVEL,
    DEFAULT_SEED,
    DEFAULT_SERVER_TO_ROOT,
    DEFAULT_SWEEP_FANOUTS,
    DEFAULT_SWEEP_NODE_COUNTS,
)
from core.directory import load_csv, save_csv
from core.exceptions import InvalidConfigError, TrustKeyError
from core.trust_tree import eq1_height_bound, levels
from tools.propagation import LatencyConfig
from utils import render_coverage_chart, setup_logging
from workflow.metrics import coverage_frame, summary_line, to_csv_text, write_outputs
from workflow.simulator import ChurnSimulator, SimConfig, UniformInt, coverage_curve
from workflow.sweep import sweep_frame

logger = logging.getLogger(__name__)


# ============================================================================
# PARSER
# ============================================================================

def _add_latency_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("latency")
    group.add_argument("--kdc-gen", type=int, default=DEFAULT_KDC_GEN, help="time to generate a key")
    group.add_argument("--kdc-to-server", type=int, default=DEFAULT_KDC_TO_SERVER, help="KDC to controlling server")
    group.add_argument("--server-to-root", type=int, default=DEFAULT_SERVER_TO_ROOT, help="controlling server to root")
    group.add_argument("--per-level", type=int, default=DEFAULT_PER_LEVEL, help="time per tree level")
    group.add_argument("--include-offsets", action="store_true", help="start the chart clock at the KDC request")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with every subcommand."""
    parser = argparse.ArgumentParser(
        prog="trustkey",
        description="Trust-ranked tree key distribution for peer-to-peer groups",
    )
    parser.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="log verbosity on stderr (default: LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    bound = commands.add_parser("bound", help="worst-case B-tree height floor(log_d((n+1)/2))")
    bound.add_argument("--n", type=int, required=True)
    bound.add_argument("--d", type=int, default=DEFAULT_FANOUT)
    bound.set_defaults(handler=cmd_bound)

    height = commands.add_parser("levels", help="height of the complete d-ary tree with n peers")
    height.add_argument("--n", type=int, required=True)
    height.add_argument("--d", type=int, default=DEFAULT_FANOUT)
    height.set_defaults(handler=cmd_levels)

    simulate = commands.add_parser("simulate", help="run a churn simulation")
    simulate.add_argument("--nodes", type=int, default=DEFAULT_NODE_COUNT, help="initial group size")
    simulate.add_argument("--d", type=int, default=DEFAULT_FANOUT, help="tree fanout")
    simulate.add_argument("--seed", type=int, default=DEFAULT_SEED)
    simulate.add_argument("--duration", type=int, default=0, help="churn time units after the initial key")
    simulate.add_argument("--join-rate", type=float, default=0.0)
    simulate.add_argument("--leave-rate", type=float, default=0.0)
    simulate.add_argument("--time-lo", type=int, default=DEFAULT_ONLINE_TIME_LOW, help="lowest initial online time")
    simulate.add_argument("--time-hi", type=int, default=DEFAULT_ONLINE_TIME_HIGH, help="highest initial online time")
    simulate.add_argument("--rejoin-pool", action="store_true", help="let half of the joins reuse offline ids")
    simulate.add_argument("--out", required=True, help="output directory")
    simulate.add_argument("--load-table", default=None, help="initial lookup table CSV (replaces --nodes)")
    simulate.add_argument("--save-table", default=None, help="write the final lookup table CSV here")
    _add_latency_flags(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    coverage = commands.add_parser("coverage", help="static coverage curve of a complete d-ary tree")
    coverage.add_argument("--n", type=int, required=True)
    coverage.add_argument("--d", type=int, default=DEFAULT_FANOUT)
    coverage.add_argument("--format", choices=["csv", "ascii"], default="csv")
    _add_latency_flags(coverage)
    coverage.set_defaults(handler=cmd_coverage)

    sweep = commands.add_parser("sweep", help="rekey times over group sizes, balanced vs unbalanced")
    sweep.add_argument("--nodes", type=int, nargs="+", default=list(DEFAULT_SWEEP_NODE_COUNTS), help="group sizes")
    sweep.add_argument("--d", type=int, nargs="+", default=list(DEFAULT_SWEEP_FANOUTS), help="tree fanouts")
    sweep.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sweep.add_argument("--out", default=None, help="write the CSV here instead of stdout")
    _add_latency_flags(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    verify = commands.add_parser("verify", help="run the invariant and oracle suites")
    size = verify.add_mutually_exclusive_group()
    size.add_argument("--quick", dest="full", action="store_false", help="reduced sweep sizes (default)")
    size.add_argument("--full", dest="full", action="store_true", help="full sweep sizes")
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    verify.set_defaults(handler=cmd_verify, full=False)

    return parser


def _latency(args: argparse.Namespace) -> LatencyConfig:
    try:
        return LatencyConfig(
            kdc_gen=args.kdc_gen,
            kdc_to_server=args.kdc_to_server,
            server_to_root=args.server_to_root,
            per_level=args.per_level,
            include_offsets_in_chart=args.include_offsets,
        )
    except ValidationError as e:
        raise InvalidConfigError(f"invalid latency settings: {e}") from e


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_bound(args: argparse.Namespace) -> int:
    print(eq1_height_bound(args.n, args.d))
    return 0


def cmd_levels(args: argparse.Namespace) -> int:
    print(levels(args.n, args.d))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    """
    Run one simulation and write its result files.

    Prints the summary line on success.
    """
    table = load_csv(args.load_table) if args.load_table else None
    try:
        cfg = SimConfig(
            node_count=len(table) if table is not None else args.nodes,
            fanout=args.d,
            seed=args.seed,
            duration=args.duration,
            join_rate=args.join_rate,
            leave_rate=args.leave_rate,
            initial_time_distribution=UniformInt(lo=args.time_lo, hi=args.time_hi),
            latency=_latency(args),
            rejoin_pool=args.rejoin_pool,
        )
    except ValidationError as e:
        raise InvalidConfigError(f"invalid simulation settings: {e}") from e

    simulator = ChurnSimulator(cfg, table)
    metrics = simulator.run()
    write_outputs(metrics, args.out)
    if args.save_table:
        save_csv(simulator.table, args.save_table)

    print(summary_line(metrics))
    return 0


def cmd_coverage(args: argparse.Namespace) -> int:
    curve = coverage_curve(args.n, args.d, _latency(args))
    if args.format == "ascii":
        sys.stdout.write(render_coverage_chart(curve, args.n))
    else:
        sys.stdout.write(to_csv_text(coverage_frame(curve)))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    latency = _latency(args)
    try:
        frame = sweep_frame(args.nodes, args.d, seed=args.seed, latency=latency)
    except ValidationError as e:
        raise InvalidConfigError(f"invalid sweep settings: {e}") from e

    text = to_csv_text(frame)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        logger.info(f"Wrote {len(frame)} sweep rows to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    """Run every suite, print one line per suite and a pass/fail tally."""
    # Imported here: the suites pull in the whole simulator stack
    from tools.invariants import run_suites

    results = run_suites(quick=not args.full, seed=args.seed)
    for result in results:
        verdict = "PASS" if result.passed else "FAIL"
        print(f"{result.name}: {verdict} ({result.detail or f'{result.checked} checks'})")

    failed = sum(1 for r in results if not r.passed)
    print(f"passed={len(results) - failed} failed={failed}")
    return 0 if failed == 0 else 1


# ============================================================================
# ENTRY POINT
# ============================================================================

def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse `argv`, run the selected command and return its exit status.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        0 on success, 1 on a domain or validation error, 2 on a usage error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse has already written usage and the offending flag to stderr
        return e.code if isinstance(e.code, int) else 2

    setup_logging(args.log_level)
    handler: Callable[[argparse.Namespace], int] = args.handler
    logger.info(f"Running command: {args.command}")

    try:
        return handler(args)
    except (TrustKeyError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
