"""
Dynamics pipeline namespace
Trajectories, density-modulation fits and ensemble coherence series
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Literal, Optional

import numpy as np

from ..coherence import CoherenceSeries, average_series, coherence_series, estimate_crossovers, incoherent_band_edge
from ..constants import DEFAULT_CHI_TILDE_C
from ..dynamics import Trajectory, evolve_integrate, expansion_trajectory, fit_critical, fit_relaxation, make_initial, n_of_k, output_grid
from ..liouvillian import DensityMatrix
from ..models import FitResult, InitialState, SweepSpec
from ..utils.logging import get_logger
from ..utils.parallel import run_sweep

if TYPE_CHECKING:
  from ..lab import IncoherentonLab

logger = get_logger(__name__)

Method = Literal["integrate", "expansion"]


@dataclass(frozen=True)
class SweepPoint:
  """Rows and fit of one relaxation-sweep point"""

  value: float
  rows: list[dict[str, Any]]
  fit: FitResult


class DynamicsPipeline:
  """Time-evolution operations namespace"""

  def __init__(self, lab: IncoherentonLab):
    """
    Initialize dynamics pipeline

    Args:
        lab: IncoherentonLab instance
    """
    self._lab = lab

  def times(self, tmax: Optional[float] = None, dt_out: Optional[float] = None) -> np.ndarray:
    return output_grid(self._lab.params.gamma, tmax, dt_out)

  def initial(self, state: InitialState) -> DensityMatrix:
    return make_initial(state, self._lab.basis)

  def evolve(self, state: InitialState, times: np.ndarray, method: Method = "integrate", dt: Optional[float] = None) -> Trajectory:
    """
    Evolve an initial-state recipe over an output grid

    Args:
        state: Initial-state recipe
        times: Output times starting at 0
        method: RK4 integration (matrix-free) or eigenmode expansion (dense)
        dt: Maximum RK4 step (integration only)

    Returns:
        Trajectory on the output grid
    """
    lab = self._lab
    rho0 = self.initial(state)
    if method == "expansion":
      return expansion_trajectory(rho0, lab.modes, times, fallback=lab.matrix_free)
    return evolve_integrate(rho0, lab.matrix_free, times, dt=dt)

  def rows(self, trajectory: Trajectory, k: float, c: float = DEFAULT_CHI_TILDE_C, series: Optional[CoherenceSeries] = None) -> list[dict[str, Any]]:
    """Dynamics rows: n(k), coherence measures and state diagnostics"""
    series = series if series is not None else coherence_series(trajectory, c)
    return _dynamics_rows(
      trajectory.times,
      np.asarray(n_of_k(trajectory.states, trajectory.basis, k)),
      series,
      trajectory.trace_errors(),
      trajectory.min_eigenvalues(),
    )

  def fit(self, trajectory: Trajectory, k: float, critical: bool = False) -> FitResult:
    """Fit Re n(k, t); critical=True fits the early-window power law instead"""
    p = self._lab.params
    y = np.real(np.asarray(n_of_k(trajectory.states, trajectory.basis, k)))
    if critical:
      return fit_critical(trajectory.times, y, k, p.J, p.gamma)
    return fit_relaxation(trajectory.times, y, k, p.J, p.gamma)

  def relaxation_sweep(
    self,
    sweep: SweepSpec,
    state: InitialState,
    tmax: Optional[float] = None,
    dt_out: Optional[float] = None,
    dt: Optional[float] = None,
    c: float = DEFAULT_CHI_TILDE_C,
  ) -> list[SweepPoint]:
    """
    Density-modulation fits along a parameter sweep

    A sweep over k changes the modulation wave vector; any other parameter
    changes the model.
    """
    lab = self._lab

    def point(value: float) -> SweepPoint:
      if sweep.parameter == "k":
        sub, recipe = lab.with_params(), state.model_copy(update={"k": value})
      else:
        sub, recipe = lab.with_params(**{sweep.parameter: value}), state
      with sub:
        trajectory = sub.dynamics.evolve(recipe, sub.dynamics.times(tmax, dt_out), dt=dt)
        fit = sub.dynamics.fit(trajectory, recipe.k)
        logger.info("%s=%.4g: %s %.6g (R^2=%.4f)", sweep.parameter, value, fit.fit_kind, fit.rate_or_omega, fit.r2)
        return SweepPoint(value=value, rows=sub.dynamics.rows(trajectory, recipe.k, c), fit=fit)

    return run_sweep(point, sweep.values(), jobs=lab.jobs)

  def ensemble(
    self,
    size: int,
    seed: int = 0,
    k: float = math.pi,
    tmax: Optional[float] = None,
    dt_out: Optional[float] = None,
    dt: Optional[float] = None,
    c: float = DEFAULT_CHI_TILDE_C,
  ) -> tuple[CoherenceSeries, list[dict[str, Any]]]:
    """
    Random-pure-state ensemble with seeds seed .. seed + size - 1

    chi_s is averaged over members before Gamma_s is taken.

    Returns:
        (averaged series, dynamics rows)
    """
    lab = self._lab
    times = self.times(tmax, dt_out)
    generator = lab.matrix_free

    def member(member_seed: int) -> tuple[CoherenceSeries, np.ndarray, np.ndarray, np.ndarray]:
      rho0 = make_initial(InitialState(kind="random-pure", seed=member_seed), lab.basis)
      trajectory = evolve_integrate(rho0, generator, times, dt=dt)
      nk = np.asarray(n_of_k(trajectory.states, trajectory.basis, k))
      return coherence_series(trajectory, c), nk, trajectory.trace_errors(), trajectory.min_eigenvalues()

    members = run_sweep(member, list(range(seed, seed + size)), jobs=lab.jobs)
    series = average_series([m[0] for m in members])
    rows = _dynamics_rows(
      times,
      np.mean([m[1] for m in members], axis=0),
      series,
      np.max([m[2] for m in members], axis=0),
      np.min([m[3] for m in members], axis=0),
    )
    logger.info("Averaged %d ensemble members over %d output times", size, times.size)
    return series, rows

  def crossovers(self) -> tuple[float, float]:
    """(tau1, tau2) from the incoherent band edge of the dense spectrum"""
    lab = self._lab
    lambda_star = incoherent_band_edge(lab.modes, lab.table)
    return estimate_crossovers(lab.params.J, lab.params.gamma, lab.params.L, lambda_star)


def _dynamics_rows(times: np.ndarray, nk: np.ndarray, series: CoherenceSeries, trace_err: np.ndarray, min_eig: np.ndarray) -> list[dict[str, Any]]:
  return [
    {
      "t": float(times[i]),
      "re_n_k": float(nk[i].real),
      "im_n_k": float(nk[i].imag),
      "chi1": float(series.chi1[i]),
      "chi2": float(series.chi2[i]),
      "chi1_tilde": float(series.chi1_tilde[i]),
      "gamma1": float(series.gamma1[i]),
      "gamma2": float(series.gamma2[i]),
      "trace_err": float(trace_err[i]),
      "min_eig": float(min_eig[i]),
    }
    for i in range(times.size)
  ]
