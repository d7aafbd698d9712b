"""
Single-particle pipeline namespace
Bound-state scans over the momentum grid and block/full-spectrum comparison
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

from ..analytic import block_spectrum_union, bound_state_scan, k_crit, qc_gap_analytic
from ..exceptions import InvalidArgumentsError
from ..spectrum import match_spectra

if TYPE_CHECKING:
  from ..lab import IncoherentonLab


class SingleParticlePipeline:
  """One-particle analytic operations namespace"""

  def __init__(self, lab: IncoherentonLab):
    """
    Initialize single-particle pipeline

    Args:
        lab: IncoherentonLab instance
    """
    self._lab = lab

  def rows(self) -> list[dict[str, Any]]:
    """Bound-state rows over the centred k grid of L"""
    p = self._lab.params
    gap = qc_gap_analytic(p.J, p.gamma)
    return [
      {
        "k": s.k,
        "re_lambda": s.lam.real,
        "im_lambda": s.lam.imag,
        "re_alpha": s.alpha.real,
        "im_alpha": s.alpha.imag,
        "xi_con": s.xi_con,
        "exists": s.exists,
        "qc_gap": gap,
      }
      for s in bound_state_scan(p.J, p.gamma, p.L)
    ]

  def summary(self) -> dict[str, Any]:
    p = self._lab.params
    return {"L": p.L, "J": p.J, "gamma": p.gamma, "qc_gap": qc_gap_analytic(p.J, p.gamma), "k_crit": k_crit(p.J, p.gamma)}

  def block_mismatch(self) -> float:
    """
    Largest deviation between the momentum-block union and the full spectrum

    Raises:
        InvalidArgumentsError: Outside the one-particle hard-core sector
    """
    p = self._lab.params
    if p.N != 1 or not p.hardcore:
      raise InvalidArgumentsError("momentum blocks describe the one-particle hard-core model only")
    return match_spectra(block_spectrum_union(p.J, p.gamma, p.L), self._lab.modes.eigenvalues)
