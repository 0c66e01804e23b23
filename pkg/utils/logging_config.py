"""
Logging configuration for TrustKey.

This module sets up structured logging for the entire application.
Logs go to stderr so that stdout only carries command results.
"""

import logging
import sys
from typing import Optional, TextIO
from config import LOG_LEVEL

_HANDLER_NAME = "trustkey-console"


def setup_logging(level: Optional[str] = None, stream: Optional[TextIO] = None) -> logging.Logger:
    """
    Configure application-wide logging.

    Sets up:
    - Log level from configuration (or the explicit override)
    - Format with timestamps and log levels
    - A single console handler; calling this again replaces it instead of
      adding a second one

    Args:
        level: Optional level name overriding LOG_LEVEL
        stream: Output stream for the handler (defaults to stderr)

    Returns:
        The configured root logger
    """
    root_logger = logging.getLogger()
    level_name = (level or LOG_LEVEL).upper()
    root_logger.setLevel(getattr(logging, level_name, logging.INFO))

    # Replace rather than stack our handler; sys.stderr may have been swapped since
    for handler in list(root_logger.handlers):
        if handler.get_name() == _HANDLER_NAME:
            root_logger.removeHandler(handler)

    # Create formatter
    formatter = logging.Formatter(
        fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )

    # Create console handler
    console_handler = logging.StreamHandler(stream or sys.stderr)
    console_handler.set_name(_HANDLER_NAME)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    return root_logger
