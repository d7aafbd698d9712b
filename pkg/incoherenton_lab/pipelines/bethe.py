"""
Bethe pipeline namespace
k-Lambda string scans and eta-pairing checks on the Hubbard ladder
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any, Optional

import numpy as np

from ..bethe import HubbardLadderOps, build_hubbard_ladder, locate_deconfinement, no_solution_interval, scan_strings
from ..exceptions import InvalidArgumentsError
from ..models import BetheParams
from ..spectrum import match_spectra
from ..utils.logging import get_logger

if TYPE_CHECKING:
  from ..lab import IncoherentonLab

logger = get_logger(__name__)


class BethePipeline:
  """Exact-solution operations namespace"""

  def __init__(self, lab: IncoherentonLab):
    """
    Initialize Bethe pipeline

    Args:
        lab: IncoherentonLab instance
    """
    self._lab = lab
    self._ladders: dict[float, HubbardLadderOps] = {}

  @property
  def params(self) -> BetheParams:
    """
    Ladder parameters derived from the lab's model

    Raises:
        InvalidArgumentsError: If J is not positive
    """
    p = self._lab.params
    if p.J <= 0:
      raise InvalidArgumentsError(f"the Bethe layer needs J > 0, got {p.J}")
    return BetheParams(J=p.J, gamma=p.gamma, L=p.L, N=p.N)

  def string_rows(self, m: int, n_p: int = 200, residual_L: Optional[list[int]] = None) -> list[dict[str, Any]]:  # noqa: N803
    """Strings rows over the p grid; absent strings carry NaN fields"""
    p = self.params
    rows = []
    for row in scan_strings(m, p.J, p.gamma, n_p, residual_L):
      s = row.string
      lam = s.lam if s is not None else complex(math.nan, math.nan)
      record: dict[str, Any] = {
        "m": m,
        "p": row.p,
        "kappa": s.kappa if s is not None else math.nan,
        "mu": s.mu if s is not None else math.nan,
        "K": 2.0 * row.p,
        "re_lambda": lam.real,
        "im_lambda": lam.imag,
        "exists": row.exists,
      }
      for L in residual_L or []:
        record[f"residual_L{L}"] = row.residuals.get(L, math.nan)
      rows.append(record)
    return rows

  def gap_interval(self, m: int, n_p: int = 200) -> Optional[tuple[float, float]]:
    """p interval without confined strings, None when the whole window is covered"""
    p = self.params
    return no_solution_interval(scan_strings(m, p.J, p.gamma, n_p))

  def deconfinement(self, m: int, J_values: list[float], n_p: int = 200) -> Optional[float]:  # noqa: N803
    return locate_deconfinement(m, self._lab.params.gamma, J_values, n_p)

  def ladder(self, phi: Optional[float] = None) -> HubbardLadderOps:
    """Hubbard ladder at the lab's L, cached per flux"""
    params = self.params
    key = params.phi if phi is None else phi
    if key not in self._ladders:
      self._ladders[key] = build_hubbard_ladder(params, phi=key, dense_limit=self._lab.dense_limit)
    return self._ladders[key]

  def ladder_report(self) -> dict[str, Any]:
    """
    eta-pairing diagnostics at the lab's N

    Returns:
        steady-state residual of (eta^+)^N |vac>, the largest generator
        commutator and the mismatch between the (N, N) ladder spectrum and
        i times the hard-core Liouvillian spectrum
    """
    lab = self._lab
    ops = self.ladder()
    N = lab.params.N
    steady = ops.steady_state_residual(N)
    commutators = ops.commutator_norms()
    with lab.with_params(model="hardcore-dephasing", U=0.0) as hardcore:
      liouvillian = hardcore.modes.eigenvalues
    mismatch = match_spectra(ops.sector_spectrum(N, N), 1j * liouvillian)
    logger.info("Ladder L=%d N=%d: steady residual %.3g, spectrum mismatch %.3g", ops.L, N, steady, mismatch)
    return {
      "L": ops.L,
      "N": N,
      "phi": ops.phi,
      "steady_residual": steady,
      "max_commutator": float(np.max(list(commutators.values()))),
      "commutators": commutators,
      "spectrum_mismatch": mismatch,
    }
