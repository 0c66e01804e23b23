"""
Main entry point for TrustKey.

This module runs the command-line interface. Run this file with a
subcommand, for example:

    python main.py bound --n 333 --d 2
    python main.py simulate --nodes 333 --duration 100 --join-rate 1 --leave-rate 1 --out results/
"""

import sys

from cli import main as cli_main


def main():
    """
    Run the CLI with the process arguments.

    Raises:
        SystemExit: Always, with the command's exit status
    """
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
