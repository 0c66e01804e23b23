"""
Command-line package for TrustKey.

This package contains the argparse frontend used by main.py.
"""

from cli.commands import build_parser, main

__all__ = ["build_parser", "main"]
