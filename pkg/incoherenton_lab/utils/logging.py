"""
Logging utilities with array summarization
Keeps matrices and eigenvector stacks out of log lines
"""

import logging
from typing import Any

import numpy as np


class ArraySummaryFilter(logging.Filter):
  """
  Logging filter that replaces numpy array arguments by a short summary

  A D^2 x D^2 superoperator printed verbatim would flood the log; the
  summary keeps shape, dtype and Frobenius norm.
  """

  MAX_INLINE = 8

  def filter(self, record: logging.LogRecord) -> bool:
    """Summarize array-valued format arguments"""
    if record.args:
      if isinstance(record.args, dict):
        record.args = {key: self._summarize(value) for key, value in record.args.items()}
      else:
        record.args = tuple(self._summarize(arg) for arg in record.args)
    return True

  def _summarize(self, value: Any) -> Any:
    if isinstance(value, np.ndarray) and value.size > self.MAX_INLINE:
      norm = float(np.linalg.norm(value)) if value.dtype.kind in "fciu" else float("nan")
      return f"<array shape={value.shape} dtype={value.dtype} norm={norm:.6g}>"
    return value


def setup_logging(level: int = logging.WARNING) -> None:
  """
  Set up logging with the array summary filter

  Args:
      level: Logging level (default: WARNING)
  """
  root_logger = logging.getLogger()
  root_logger.setLevel(level)

  # Remove existing handlers to avoid duplicates
  root_logger.handlers.clear()

  handler = logging.StreamHandler()
  handler.setLevel(level)
  handler.addFilter(ArraySummaryFilter())

  formatter = logging.Formatter(
    fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
  )
  handler.setFormatter(formatter)

  root_logger.addHandler(handler)


def get_logger(name: str) -> logging.Logger:
  """
  Get a logger with the array summary filter applied

  Args:
      name: Logger name (typically __name__)

  Returns:
      Logger instance
  """
  logger = logging.getLogger(name)
  if not any(isinstance(f, ArraySummaryFilter) for f in logger.filters):
    logger.addFilter(ArraySummaryFilter())
  return logger
