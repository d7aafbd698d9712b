"""
Toy density-of-states pipeline namespace
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Optional

import numpy as np

from ..coherence import plateau_window, toy_dos_series
from ..models import ToyDosParams

if TYPE_CHECKING:
  from ..lab import IncoherentonLab


def log_time_grid(t_min: float = 1e-2, t_max: float = 1e4, per_decade: int = 50) -> np.ndarray:
  """Logarithmic grid with t = 0 prepended"""
  decades = np.log10(t_max) - np.log10(t_min)
  count = int(round(decades * per_decade)) + 1
  return np.concatenate(([0.0], np.logspace(np.log10(t_min), np.log10(t_max), count)))


class ToyDosPipeline:
  """Two-band toy model operations namespace"""

  def __init__(self, lab: IncoherentonLab):
    """
    Initialize toy DOS pipeline

    Args:
        lab: IncoherentonLab instance (supplies gamma)
    """
    self._lab = lab

  def params(self, eta: float = 1.0, delta: float = 0.1, a0: float = 0.1, a1: float = 1.0) -> ToyDosParams:
    """Toy parameters; delta sets the width of both bands"""
    return ToyDosParams(a0=a0, a1=a1, delta0=delta, delta1=delta, gamma=self._lab.params.gamma, eta=eta)

  def rows(self, params: ToyDosParams, times: Optional[np.ndarray] = None) -> list[dict[str, Any]]:
    times = times if times is not None else log_time_grid()
    chi, rates = toy_dos_series(params, times)
    return [{"t": float(t), "chi1": float(c), "gamma1": float(g)} for t, c, g in zip(times, chi, rates)]

  def plateaus(self, params: ToyDosParams, times: Optional[np.ndarray] = None) -> dict[str, Optional[tuple[float, float]]]:
    """Windows of the coherent plateau (Gamma_1 near gamma) and the incoherent one (near delta0 / 2)"""
    times = times if times is not None else log_time_grid()
    _, rates = toy_dos_series(params, times)
    return {
      "coherent": plateau_window(times, rates, params.gamma, rel_tol=0.05),
      "incoherent": plateau_window(times, rates, params.delta0 / 2.0, rel_tol=0.4),
    }
