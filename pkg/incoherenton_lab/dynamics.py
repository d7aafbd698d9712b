"""
Time evolution of density matrices
Eigenmode expansion, fixed-step Runge-Kutta integration and relaxation fits
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import curve_fit

from .basis import SectorBasis, number_operators
from .constants import CONDITION_LIMIT, DT_STABILITY
from .exceptions import FitError, IllConditionedBasisError, InvalidArgumentsError, StepSizeError
from .liouvillian import DensityMatrix, Generator
from .models import FitResult, InitialState, ModelParams
from .spectrum import EigenmodeSet
from .utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Trajectory:
  """Density matrices sampled on an output time grid"""

  times: np.ndarray
  states: np.ndarray
  basis: SectorBasis
  method: str = "integrate"

  def __len__(self) -> int:
    return int(self.times.shape[0])

  def at(self, i: int) -> DensityMatrix:
    return DensityMatrix(matrix=self.states[i], basis=self.basis)

  def trace_errors(self) -> np.ndarray:
    return np.abs(np.trace(self.states, axis1=1, axis2=2) - 1.0)

  def hermiticity_errors(self) -> np.ndarray:
    return np.max(np.abs(self.states - np.conj(np.swapaxes(self.states, 1, 2))), axis=(1, 2))

  def min_eigenvalues(self) -> np.ndarray:
    hermitian = 0.5 * (self.states + np.conj(np.swapaxes(self.states, 1, 2)))
    return np.linalg.eigvalsh(hermitian)[:, 0]


@dataclass(frozen=True)
class EigenExpansion:
  """Coefficients of an initial state in the right-eigenmode basis"""

  coefficients: np.ndarray
  modes: EigenmodeSet
  condition: float

  def reconstruct(self) -> np.ndarray:
    D = self.modes.dim
    return np.asarray(self.modes.right_modes @ self.coefficients).reshape(D, D)

  def group_weights(self, groups: np.ndarray) -> dict[int, float]:
    """Sum of |c_alpha| per unbound-pair group"""
    weights: dict[int, float] = {}
    for group in np.unique(groups):
      weights[int(group)] = float(np.sum(np.abs(self.coefficients[groups == group])))
    return weights


def stability_limit(params: ModelParams) -> float:
  """Largest admissible RK4 step 0.1 / max(gamma, 4J, |U|, 1)"""
  return DT_STABILITY / max(params.gamma, 4.0 * abs(params.J), abs(params.U), 1.0)


def default_dt(params: ModelParams) -> float:
  return 0.1 * stability_limit(params)


def make_initial(state: InitialState, basis: SectorBasis, matrix: Optional[np.ndarray] = None) -> DensityMatrix:
  """
  Build an initial density matrix

  Args:
      state: Recipe (kind, k, delta_n, seed)
      basis: Sector basis
      matrix: Explicit matrix for kind 'custom'

  Returns:
      Validated DensityMatrix

  Raises:
      InvalidArgumentsError: If the recipe does not fit the sector
  """
  D = basis.dimension
  if state.kind == "density-modulated":
    if basis.N < 1:
      raise InvalidArgumentsError("density modulation needs at least one particle")
    occupations = number_operators(basis)
    profile = np.cos(state.k * np.arange(basis.L))
    weights = 1.0 + state.delta_n * (profile @ occupations) / basis.N
    rho = np.diag(weights / weights.sum()).astype(np.complex128)
  elif state.kind == "random-pure":
    rng = np.random.default_rng(state.seed)
    psi = rng.normal(size=D) + 1j * rng.normal(size=D)
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
  else:
    if matrix is None:
      raise InvalidArgumentsError("custom initial state needs an explicit matrix")
    rho = np.asarray(matrix, dtype=np.complex128)
    if rho.shape != (D, D):
      raise InvalidArgumentsError(f"custom matrix of shape {rho.shape} does not match D={D}")

  result = DensityMatrix(matrix=rho, basis=basis)
  result.validate(check_psd=True)
  return result


def expand(rho0: DensityMatrix, modes: EigenmodeSet) -> EigenExpansion:
  """
  Solve V c = vec(rho0) in the right-eigenmode basis

  Raises:
      IllConditionedBasisError: If cond(V) exceeds 1e10
  """
  V = modes.right_modes
  if V.shape[0] != V.shape[1]:
    raise InvalidArgumentsError("expansion needs the complete set of eigenmodes")
  condition = float(np.linalg.cond(V))
  if not math.isfinite(condition) or condition > CONDITION_LIMIT:
    raise IllConditionedBasisError(f"eigenbasis condition number {condition:.3g} exceeds {CONDITION_LIMIT:.0e}", condition)
  coefficients = np.linalg.solve(V, rho0.vec())
  return EigenExpansion(coefficients=coefficients, modes=modes, condition=condition)


def _hermitize(states: np.ndarray) -> tuple[np.ndarray, float]:
  adjoint = np.conj(np.swapaxes(states, -1, -2))
  asymmetry = float(np.max(np.abs(states - adjoint), initial=0.0))
  return 0.5 * (states + adjoint), asymmetry


def expansion_trajectory(rho0: DensityMatrix, modes: EigenmodeSet, times: np.ndarray, fallback: Optional[Generator] = None) -> Trajectory:
  """
  rho(t) = sum_alpha c_alpha e^{lambda_alpha t} rho_alpha on a time grid

  Args:
      rho0: Initial state
      modes: Complete eigen-decomposition
      times: Output times
      fallback: Generator integrated instead when the eigenbasis is ill-conditioned

  Returns:
      Trajectory, re-Hermitized
  """
  times = np.asarray(times, dtype=np.float64)
  try:
    expansion = expand(rho0, modes)
  except IllConditionedBasisError as e:
    if fallback is None:
      raise
    logger.warning("%s; falling back to direct integration", e)
    return evolve_integrate(rho0, fallback, times)

  D = modes.dim
  amplitudes = expansion.coefficients[None, :] * np.exp(np.outer(times, modes.eigenvalues))
  states = (amplitudes @ modes.right_modes.T).reshape(times.shape[0], D, D)
  states, asymmetry = _hermitize(states)
  if asymmetry > 1e-8:
    logger.warning("Expansion asymmetry %.3g before re-Hermitization", asymmetry)
  return Trajectory(times=times, states=states, basis=rho0.basis, method="expansion")


def evolve_expansion(rho0: DensityMatrix, modes: EigenmodeSet, t: float, fallback: Optional[Generator] = None) -> DensityMatrix:
  """Density matrix at a single time from the eigenmode expansion"""
  return expansion_trajectory(rho0, modes, np.array([t]), fallback=fallback).at(0)


def _rk4_step(generator: Generator, rho: np.ndarray, h: float) -> np.ndarray:
  k1 = generator.apply(rho)
  k2 = generator.apply(rho + 0.5 * h * k1)
  k3 = generator.apply(rho + 0.5 * h * k2)
  k4 = generator.apply(rho + h * k3)
  return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve_integrate(rho0: DensityMatrix, generator: Generator, times: np.ndarray, dt: Optional[float] = None) -> Trajectory:
  """
  Classical fourth-order Runge-Kutta integration of d rho / dt = L(rho)

  Each output interval is split into equal substeps no longer than dt.

  Args:
      rho0: State at times[0]
      generator: Dense or matrix-free Liouvillian
      times: Non-decreasing output times
      dt: Maximum step (defaults to a tenth of the stability limit)

  Returns:
      Trajectory on the output grid

  Raises:
      StepSizeError: If dt exceeds 0.1 / max(gamma, 4J, |U|, 1)
  """
  times = np.asarray(times, dtype=np.float64)
  if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) < 0):
    raise InvalidArgumentsError("output times must be a non-empty non-decreasing grid")
  params = generator.params
  limit = stability_limit(params) if params is not None else DT_STABILITY
  if dt is None:
    dt = 0.1 * limit
  if dt <= 0 or dt > limit * (1 + 1e-12):
    raise StepSizeError(f"dt={dt} exceeds the stability limit {limit:.4g}")

  if rho0.matrix.shape != (generator.dim, generator.dim):
    raise InvalidArgumentsError(f"rho0 of shape {rho0.matrix.shape} does not match generator dimension {generator.dim}")
  rho = rho0.matrix.astype(np.complex128)
  states = np.empty((times.size, *rho.shape), dtype=np.complex128)
  states[0] = rho
  for i in range(1, times.size):
    interval = times[i] - times[i - 1]
    if interval > 0:
      steps = max(1, math.ceil(interval / dt - 1e-9))
      h = interval / steps
      for _ in range(steps):
        rho = _rk4_step(generator, rho, h)
    states[i] = rho
  logger.debug("Integrated %d output points with dt=%.4g", times.size, dt)
  return Trajectory(times=times, states=states, basis=rho0.basis, method="integrate")


def convergence_gate(rho0: DensityMatrix, generator: Generator, times: np.ndarray, dt: float) -> float:
  """Largest state change when the integration step is halved"""
  coarse = evolve_integrate(rho0, generator, times, dt)
  fine = evolve_integrate(rho0, generator, times, dt / 2.0)
  return float(np.max(np.abs(coarse.states - fine.states)))


def site_densities(states: np.ndarray, basis: SectorBasis) -> np.ndarray:
  """<n_l> for every state in a stack, shape (T, L)"""
  stack = states if states.ndim == 3 else states[None]
  populations = np.real(np.diagonal(stack, axis1=1, axis2=2))
  return np.asarray(populations @ number_operators(basis).T)


def n_of_k(rho: Union[DensityMatrix, np.ndarray], basis: SectorBasis, k: float) -> Union[complex, np.ndarray]:
  """
  Density-modulation amplitude sum_l <n_l> e^{-ikl}

  Accepts a single matrix or a (T, D, D) stack; returns a complex or a (T,) array.
  """
  matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
  phases = np.exp(-1j * k * np.arange(basis.L))
  amplitudes = site_densities(matrix, basis) @ phases
  if matrix.ndim == 2:
    return complex(amplitudes[0])
  return np.asarray(amplitudes)


def _window_mask(t: np.ndarray, window: tuple[float, float]) -> np.ndarray:
  return (t >= window[0] - 1e-12) & (t <= window[1] + 1e-12)


def _r_squared(y: np.ndarray, fitted: np.ndarray) -> float:
  total = float(np.sum((y - y.mean()) ** 2))
  if total == 0.0:
    return 1.0
  return 1.0 - float(np.sum((y - fitted) ** 2)) / total


def decay_window(gamma: float) -> tuple[float, float]:
  """Default decay-fit window [1/gamma, 5/gamma]"""
  scale = 1.0 / max(gamma, 1e-12)
  return (1.0 * scale, 5.0 * scale)


def fit_decay(t: np.ndarray, y: np.ndarray, window: tuple[float, float]) -> tuple[float, float]:
  """
  Least-squares fit of ln y = ln a - Gamma t

  Samples below 1e-6 y(0) are dropped from the window.

  Returns:
      (Gamma, R^2)

  Raises:
      FitError: On non-positive samples or fewer than 3 usable points
  """
  t = np.asarray(t, dtype=np.float64)
  y = np.asarray(y, dtype=np.float64)
  mask = _window_mask(t, window)
  if y.size and y[0] > 0:
    mask &= np.abs(y) > 1e-6 * y[0]
  if np.any(y[mask] <= 0):
    raise FitError("decay fit needs positive samples in the window")
  if np.count_nonzero(mask) < 3:
    raise FitError(f"decay fit window {window} holds fewer than 3 samples")
  slope, intercept = np.polyfit(t[mask], np.log(y[mask]), 1)
  r2 = _r_squared(np.log(y[mask]), slope * t[mask] + intercept)
  return float(-slope), r2


def _sine(t: np.ndarray, a: float, omega: float, b: float) -> np.ndarray:
  return a * np.sin(omega * t + b)


def dominant_frequency(t: np.ndarray, z: np.ndarray) -> float:
  """Angular frequency of the largest discrete-Fourier peak"""
  spacing = float(np.mean(np.diff(t)))
  spectrum = np.abs(np.fft.rfft(z))
  peak = int(np.argmax(spectrum))
  if peak == 0:
    raise FitError("no oscillation detected (Fourier peak at zero frequency)")
  return float(2.0 * np.pi * np.fft.rfftfreq(z.size, d=spacing)[peak])


def fit_oscillation(t: np.ndarray, z: np.ndarray, start: float, window: Optional[tuple[float, float]] = None) -> tuple[float, float, float, float, tuple[float, float]]:
  """
  Nonlinear least-squares fit of z = a sin(omega t + b)

  The frequency is seeded from the Fourier peak of z on t >= start; the
  default window spans the first two seeded periods after start.

  Returns:
      (omega, phase, amplitude, R^2, window)

  Raises:
      FitError: If no oscillation is found or the window is too short
  """
  t = np.asarray(t, dtype=np.float64)
  z = np.asarray(z, dtype=np.float64)
  tail = t >= start - 1e-12
  if np.count_nonzero(tail) < 8:
    raise FitError("oscillation fit needs at least 8 samples after the start time")
  omega0 = dominant_frequency(t[tail], z[tail])
  if window is None:
    window = (start, start + 2.0 * (2.0 * np.pi / omega0))
  if window[1] > t[-1] + 1e-12:
    raise FitError(f"series ends at t={t[-1]:.4g}, before two periods ({window[1]:.4g})")
  mask = _window_mask(t, window)

  amplitude0 = math.sqrt(2.0) * float(np.std(z[mask])) or 1.0
  best: Optional[tuple[np.ndarray, float]] = None
  for b0 in (0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi):
    try:
      popt, _ = curve_fit(_sine, t[mask], z[mask], p0=(amplitude0, omega0, b0), xtol=1e-14, ftol=1e-14, maxfev=20000)
    except RuntimeError:
      continue
    cost = float(np.sum((_sine(t[mask], *popt) - z[mask]) ** 2))
    if best is None or cost < best[1]:
      best = (popt, cost)
  if best is None:
    raise FitError("oscillation fit did not converge")

  a, omega, b = (float(v) for v in best[0])
  if a < 0:
    a, b = -a, b + np.pi
  if omega < 0:
    omega, b, a = -omega, np.pi - b, a
  b = float(np.mod(b, 2.0 * np.pi))
  return omega, b, a, _r_squared(z[mask], _sine(t[mask], a, omega, b)), window


def fit_power_law(t: np.ndarray, z: np.ndarray, window: tuple[float, float]) -> tuple[float, float, float]:
  """
  Fit z = a t^b in log-log coordinates

  Returns:
      (a, b, R^2)
  """
  t = np.asarray(t, dtype=np.float64)
  z = np.asarray(z, dtype=np.float64)
  mask = _window_mask(t, window) & (t > 0)
  if np.any(z[mask] <= 0) or np.count_nonzero(mask) < 3:
    raise FitError("power-law fit needs at least 3 positive samples at t > 0")
  slope, intercept = np.polyfit(np.log(t[mask]), np.log(z[mask]), 1)
  r2 = _r_squared(np.log(z[mask]), slope * np.log(t[mask]) + intercept)
  return float(math.exp(intercept)), float(slope), r2


def classify_fit_kind(t: np.ndarray, y: np.ndarray, gamma: float) -> str:
  """'decay' when e^{gamma t} y keeps its sign, 'oscillation' otherwise"""
  z = np.exp(gamma * np.asarray(t)) * np.asarray(y)
  signs = np.sign(z[np.abs(z) > 1e-14 * np.max(np.abs(z), initial=1.0)])
  return "oscillation" if np.any(signs[1:] * signs[:-1] < 0) else "decay"


def fit_relaxation(t: np.ndarray, y: np.ndarray, k: float, J: float, gamma: float) -> FitResult:  # noqa: N803
  """
  Classify and fit a density-modulation amplitude

  Decaying series are fitted by a e^{-Gamma t}; oscillating ones by
  e^{gamma t} y = a sin(omega t + b).
  """
  kind = classify_fit_kind(t, y, gamma)
  if kind == "decay":
    window = decay_window(gamma)
    rate, r2 = fit_decay(t, y, window)
    return FitResult(k=k, J=J, gamma=gamma, fit_kind="decay", rate_or_omega=rate, r2=r2, window=window)
  z = np.exp(gamma * np.asarray(t)) * np.asarray(y)
  omega, phase, amplitude, r2, window = fit_oscillation(t, z, start=1.0 / max(gamma, 1e-12))
  return FitResult(k=k, J=J, gamma=gamma, fit_kind="oscillation", rate_or_omega=omega, r2=r2, window=window, phase=phase, amplitude=amplitude)


def fit_critical(t: np.ndarray, y: np.ndarray, k: float, J: float, gamma: float) -> FitResult:  # noqa: N803
  """Early-window power law e^{gamma t} y = a t^b over [1/gamma, 4/gamma]"""
  window = (1.0 / gamma, 4.0 / gamma)
  z = np.exp(gamma * np.asarray(t)) * np.asarray(y)
  amplitude, exponent, r2 = fit_power_law(t, z, window)
  return FitResult(k=k, J=J, gamma=gamma, fit_kind="power-law", rate_or_omega=exponent, r2=r2, window=window, amplitude=amplitude)


def locate_relaxation_transition(results: list[FitResult]) -> Optional[float]:
  """First J, in ascending order, whose fit kind is 'oscillation'"""
  for result in sorted(results, key=lambda r: r.J):
    if result.fit_kind == "oscillation":
      return result.J
  return None


def output_grid(gamma: float, tmax: Optional[float] = None, dt_out: Optional[float] = None) -> np.ndarray:
  """Default output grid: t up to 40/gamma in steps of 0.05/gamma"""
  scale = 1.0 / max(gamma, 1e-12)
  tmax = tmax if tmax is not None else 40.0 * scale
  dt_out = dt_out if dt_out is not None else 0.05 * scale
  count = int(round(tmax / dt_out))
  return np.linspace(0.0, count * dt_out, count + 1)

