"""
Utility functions for incoherenton-lab
"""

from .logging import ArraySummaryFilter, get_logger, setup_logging
from .output import config_hash, validate_csv, write_csv, write_json, write_manifest, write_rows
from .parallel import run_sweep

__all__ = [
  "ArraySummaryFilter",
  "get_logger",
  "setup_logging",
  "config_hash",
  "validate_csv",
  "write_csv",
  "write_json",
  "write_manifest",
  "write_rows",
  "run_sweep",
]
