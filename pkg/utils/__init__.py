"""
Utilities package for TrustKey.

This package contains logging setup and text rendering helpers.
"""

from utils.logging_config import setup_logging
from utils.charts import render_coverage_chart

__all__ = ["setup_logging", "render_coverage_chart"]
