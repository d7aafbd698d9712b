"""
Worker pool for parameter sweeps
Results come back in sweep order regardless of completion order
"""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, TypeVar

from .logging import get_logger

logger = get_logger(__name__)

P = TypeVar("P")
R = TypeVar("R")


def run_sweep(fn: Callable[[P], R], points: Sequence[P], jobs: int = 1) -> list[R]:
  """
  Map fn over sweep points

  Args:
      fn: Work function for one point
      points: Sweep points
      jobs: Worker count; 1 runs serially in the calling thread

  Returns:
      Results in the order of points

  Raises:
      Whatever fn raises for the first failing point
  """
  if jobs <= 1 or len(points) <= 1:
    return [fn(point) for point in points]

  results: dict[int, R] = {}
  with ThreadPoolExecutor(max_workers=jobs) as ex:
    futures = {ex.submit(fn, point): i for i, point in enumerate(points)}
    for fut in as_completed(futures):
      results[futures[fut]] = fut.result()
      logger.debug("Sweep point %d/%d done", len(results), len(points))
  return [results[i] for i in range(len(points))]
