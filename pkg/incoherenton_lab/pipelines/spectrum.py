"""
Spectrum pipeline namespace
Eigenvalue tables, QC gaps, invariants and gap sweeps for one model
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any, Optional

import numpy as np

from ..analytic import lambda_inc
from ..exceptions import FitError
from ..models import QcGapReport, SpectralInvariantsReport, SweepSpec
from ..spectrum import confinement_length, degeneracy_counts, qc_gap, verify_spectral_invariants
from ..utils.logging import get_logger
from ..utils.parallel import run_sweep

if TYPE_CHECKING:
  from ..lab import IncoherentonLab

logger = get_logger(__name__)


class SpectrumPipeline:
  """Liouvillian spectrum operations namespace"""

  def __init__(self, lab: IncoherentonLab):
    """
    Initialize spectrum pipeline

    Args:
        lab: IncoherentonLab instance
    """
    self._lab = lab

  def rows(self) -> list[dict[str, Any]]:
    """
    One row per eigenmode, in eigenvalue order

    s_diag and s_off are NaN outside the one-particle sector.
    """
    modes, table = self._lab.modes, self._lab.table
    nan = np.full(modes.count, math.nan)
    s_diag = table.s_diag if table.s_diag is not None else nan
    s_off = table.s_off if table.s_off is not None else nan
    return [
      {
        "re_lambda": float(modes.eigenvalues[i].real),
        "im_lambda": float(modes.eigenvalues[i].imag),
        "n_b": float(table.n_b[i]),
        "s_diag": float(s_diag[i]),
        "s_off": float(s_off[i]),
        "group": int(table.groups[i]),
        "class": table.classes[i],
        "residual": float(modes.residual_norms[i]),
      }
      for i in range(modes.count)
    ]

  def qc_gap(self) -> QcGapReport:
    return qc_gap(self._lab.modes, self._lab.table, self._lab.params.gamma)

  def invariants(self, seed: int = 0) -> SpectralInvariantsReport:
    """Measured general spectral invariants of the dense Liouvillian"""
    return verify_spectral_invariants(self._lab.modes, self._lab.superoperator, seed=seed)

  def degeneracies(self) -> list[tuple[complex, int]]:
    return degeneracy_counts(self._lab.modes.eigenvalues)

  def confinement(self) -> Optional[float]:
    """
    Confinement length of the k = pi incoherent bound state

    Returns:
        xi_con, or None outside the one-particle sector or when that mode is not incoherent
    """
    lab = self._lab
    if lab.params.N != 1:
      return None
    modes, table = lab.modes, lab.table
    edge = modes.nearest(lambda_inc(math.pi, lab.params.J, lab.params.gamma))
    if table.classes[edge] != "incoherent" or abs(modes.eigenvalues[edge]) <= 1e-9:
      return None
    return confinement_length(modes.right_modes[:, edge], lab.basis)

  def summary(self) -> dict[str, Any]:
    """Headline numbers of the spectrum for display and JSON reports"""
    lab = self._lab
    report = self.qc_gap()
    try:
      xi_con = self.confinement()
    except FitError as e:
      logger.debug("No confinement length: %s", e)
      xi_con = None
    return {
      "model": lab.params.model,
      "L": lab.params.L,
      "N": lab.params.N,
      "J": lab.params.J,
      "gamma": lab.params.gamma,
      "U": lab.params.U,
      "D2": lab.modes.count,
      "liouvillian_gap": lab.modes.liouvillian_gap,
      "qc_gaps": report.gaps,
      "gap_closed": report.gap_closed,
      "ambiguous_modes": report.n_ambiguous,
      "xi_con": xi_con,
    }

  def qc_sweep(self, sweep: SweepSpec) -> list[dict[str, Any]]:
    """
    QC gaps along a parameter sweep

    Returns:
        qc_sweep rows, one per (sweep point, group n), in sweep order
    """
    lab = self._lab

    def point(value: float) -> QcGapReport:
      with lab.with_params(**{sweep.parameter: value}) as sub:
        return sub.spectrum.qc_gap()

    values = sweep.values()
    reports = run_sweep(point, values, jobs=lab.jobs)
    rows = []
    for value, report in zip(values, reports):
      for n in range(1, report.N + 1):
        rows.append({"param": value, "n": n, "gap": report.gaps[n - 1], "gap_real": report.gaps_real[n - 1], "closed": report.gap_closed[n - 1]})
    return rows

  def first_closing(self, sweep: SweepSpec) -> Optional[float]:
    """First sweep value at which every QC gap is closed"""
    closed: dict[float, list[bool]] = {}
    for row in self.qc_sweep(sweep):
      closed.setdefault(row["param"], []).append(row["closed"])
    for value in sweep.values():
      if closed.get(value) and all(closed[value]):
        return value
    return None
