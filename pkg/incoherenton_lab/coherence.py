"""
Coherence measures of many-body density matrices
Reduced density matrices, chi_s amplitudes, decay rates Gamma_s and the two-band toy model
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .basis import SectorBasis, annihilation_stack, lower_sector
from .constants import DEFAULT_CHI_TILDE_C
from .dynamics import Trajectory
from .exceptions import InvalidArgumentsError, QuadratureError
from .liouvillian import DensityMatrix
from .models import ToyDosParams
from .spectrum import EigenmodeSet, ModeTable, ring_distance
from .utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class CoherenceSeries:
  """chi_s(t) and Gamma_s(t) on a time grid"""

  times: np.ndarray
  chi1: np.ndarray
  chi2: np.ndarray
  chi1_tilde: np.ndarray
  gamma1: np.ndarray
  gamma2: np.ndarray


class CoherenceOperators:
  """
  Cached annihilation stacks of a sector

  b_l maps N -> N-1; b_l b_m maps N -> N-2.
  """

  def __init__(self, basis: SectorBasis, c: float = DEFAULT_CHI_TILDE_C):
    self.basis = basis
    self.c = c
    L = basis.L
    if basis.N >= 1:
      lower = lower_sector(basis)
      self.b1: Optional[np.ndarray] = annihilation_stack(basis, lower)
    else:
      self.b1 = None
    if basis.N >= 2:
      lower2 = lower_sector(lower)
      b_second = annihilation_stack(lower, lower2)
      self.b2: Optional[np.ndarray] = np.einsum("aij,bjk->abik", b_second, self.b1)
    else:
      self.b2 = None

    distance = ring_distance(L)
    self.off_diagonal = ~np.eye(L, dtype=bool)
    self.weights = np.exp(-c * distance) * self.off_diagonal
    idx = np.arange(L)
    l1, l2, l3, l4 = np.meshgrid(idx, idx, idx, idx, indexing="ij")
    self.mask2 = (l1 != l3) & (l1 != l4) & (l2 != l3) & (l2 != l4)

  def g1(self, rho: np.ndarray) -> np.ndarray:
    """G1[a, b] = Tr[b_a rho b_b^dag]"""
    L = self.basis.L
    if self.b1 is None:
      return np.zeros((L, L), dtype=np.complex128)
    return np.asarray(np.einsum("aij,jk,bik->ab", self.b1, rho, self.b1.conj(), optimize=True))

  def g2(self, rho: np.ndarray) -> np.ndarray:
    """G2[a, b, c, d] = Tr[b_a b_b rho b_c^dag b_d^dag]"""
    L = self.basis.L
    if self.b2 is None:
      return np.zeros((L, L, L, L), dtype=np.complex128)
    # b_c^dag b_d^dag = (b_d b_c)^dag
    return np.asarray(np.einsum("abij,jk,dcik->abcd", self.b2, rho, self.b2.conj(), optimize=True))

  def chi(self, rho: np.ndarray) -> tuple[float, float, float]:
    """(chi1, chi2, chi1_tilde) of one density matrix"""
    g1 = np.abs(self.g1(rho))
    chi1 = float(np.sum(g1[self.off_diagonal]))
    chi1_tilde = float(np.sum(g1 * self.weights))
    chi2 = float(np.sum(np.abs(self.g2(rho))[self.mask2])) if self.b2 is not None else 0.0
    return chi1, chi2, chi1_tilde


def _matrix(rho: Union[DensityMatrix, np.ndarray]) -> np.ndarray:
  return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)


def reduced_g1(rho: Union[DensityMatrix, np.ndarray], basis: SectorBasis) -> np.ndarray:
  """One-particle reduced density matrix, L x L"""
  return CoherenceOperators(basis).g1(_matrix(rho))


def reduced_g2(rho: Union[DensityMatrix, np.ndarray], basis: SectorBasis) -> np.ndarray:
  """Two-particle reduced density matrix as an L^2 x L^2 matrix, row (l1, l2), column (l3, l4)"""
  L = basis.L
  return CoherenceOperators(basis).g2(_matrix(rho)).reshape(L * L, L * L)


def chi_measures(rho: Union[DensityMatrix, np.ndarray], basis: SectorBasis, c: float = DEFAULT_CHI_TILDE_C) -> tuple[float, float, float]:
  """
  Off-diagonal coherence amplitudes

  Returns:
      (chi1, chi2, chi1_tilde) where chi1_tilde weights |G1| by e^{-c d(l1, l2)}
  """
  return CoherenceOperators(basis, c).chi(_matrix(rho))


def gamma_s(times: np.ndarray, chi: np.ndarray) -> np.ndarray:
  """
  Gamma_s(t) = -d/dt ln chi_s(t)

  Central differences inside the grid, one-sided at the ends.

  Raises:
      InvalidArgumentsError: If any chi is non-positive
  """
  times = np.asarray(times, dtype=np.float64)
  chi = np.asarray(chi, dtype=np.float64)
  if times.size < 2 or times.shape != chi.shape:
    raise InvalidArgumentsError("gamma_s needs matching series of at least two samples")
  if np.any(chi <= 0):
    raise InvalidArgumentsError("gamma_s needs strictly positive chi")
  return np.asarray(-np.gradient(np.log(chi), times))


def coherence_series(trajectory: Trajectory, c: float = DEFAULT_CHI_TILDE_C) -> CoherenceSeries:
  """chi_s and Gamma_s along a trajectory; Gamma_s is NaN where chi_s vanishes"""
  ops = CoherenceOperators(trajectory.basis, c)
  values = np.array([ops.chi(state) for state in trajectory.states]).reshape(len(trajectory), 3)
  return series_from_chi(trajectory.times, values[:, 0], values[:, 1], values[:, 2])


def series_from_chi(times: np.ndarray, chi1: np.ndarray, chi2: np.ndarray, chi1_tilde: np.ndarray) -> CoherenceSeries:
  def rates(chi: np.ndarray) -> np.ndarray:
    if np.all(chi > 0):
      return gamma_s(times, chi)
    return np.full(times.shape, np.nan)

  return CoherenceSeries(times=times, chi1=chi1, chi2=chi2, chi1_tilde=chi1_tilde, gamma1=rates(chi1), gamma2=rates(chi2))


def average_series(series: list[CoherenceSeries]) -> CoherenceSeries:
  """Average chi_s over an ensemble first, then differentiate"""
  if not series:
    raise InvalidArgumentsError("cannot average an empty ensemble")
  times = series[0].times
  chi1 = np.mean([s.chi1 for s in series], axis=0)
  chi2 = np.mean([s.chi2 for s in series], axis=0)
  chi1_tilde = np.mean([s.chi1_tilde for s in series], axis=0)
  return series_from_chi(times, chi1, chi2, chi1_tilde)


def _quad(func: "object", a: float, b: float, **kwargs: "object") -> float:
  with warnings.catch_warnings():
    warnings.simplefilter("error", IntegrationWarning)
    try:
      value, _ = quad(func, a, b, limit=200, **kwargs)  # type: ignore[call-overload]
    except IntegrationWarning as e:
      raise QuadratureError(f"quadrature did not converge on [{a}, {b}]: {e}") from e
  return float(value)


def _low_band(params: ToyDosParams, t: float, moment: int) -> float:
  """integral_0^delta0 mu^{eta-1+moment} e^{-mu t} d mu"""
  eta, d = params.eta, params.delta0
  if d == 0.0:
    return 0.0
  power = eta - 1.0 + moment
  x = d * t
  if power == 0.0:
    return d if t == 0.0 else -math.expm1(-x) / t
  if power == 1.0:
    if t == 0.0:
      return d * d / 2.0
    return (1.0 - math.exp(-x) * (1.0 + x)) / (t * t)
  if power == 2.0:
    if t == 0.0:
      return d**3 / 3.0
    return (2.0 - math.exp(-x) * (2.0 + 2.0 * x + x * x)) / t**3
  return _quad(lambda mu: math.exp(-mu * t), 0.0, d, weight="alg", wvar=(power, 0.0))


def _upper_band(params: ToyDosParams, t: float, moment: int) -> float:
  """integral_gamma^{gamma+delta1} mu^moment e^{-mu t} d mu"""
  g, d = params.gamma, params.delta1
  if d == 0.0:
    return 0.0
  if t == 0.0:
    return d if moment == 0 else ((g + d) ** 2 - g * g) / 2.0
  edge = math.exp(-g * t)
  if moment == 0:
    return edge * -math.expm1(-d * t) / t
  inner = (1.0 + g * t) - math.exp(-d * t) * (1.0 + (g + d) * t)
  return edge * inner / (t * t)


def toy_dos_chi(params: ToyDosParams, t: float) -> float:
  """chi_1(t) = a0 int_0^delta0 mu^{eta-1} e^{-mu t} + a1 int_gamma^{gamma+delta1} e^{-mu t}"""
  if t < 0:
    raise InvalidArgumentsError(f"t must be >= 0, got {t}")
  return params.a0 * _low_band(params, t, 0) + params.a1 * _upper_band(params, t, 0)


def toy_dos_gamma(params: ToyDosParams, t: float) -> float:
  """Gamma_1(t) = int mu D(mu) e^{-mu t} / int D(mu) e^{-mu t}"""
  if t < 0:
    raise InvalidArgumentsError(f"t must be >= 0, got {t}")
  numerator = params.a0 * _low_band(params, t, 1) + params.a1 * _upper_band(params, t, 1)
  denominator = toy_dos_chi(params, t)
  if denominator <= 0:
    raise QuadratureError(f"toy chi vanished at t={t}")
  return numerator / denominator


def toy_dos_series(params: ToyDosParams, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
  chi = np.array([toy_dos_chi(params, float(t)) for t in times])
  rates = np.array([toy_dos_gamma(params, float(t)) for t in times])
  return chi, rates


def plateau_window(times: np.ndarray, rates: np.ndarray, level: float, rel_tol: float = 0.25, min_ratio: float = 2.0) -> Optional[tuple[float, float]]:
  """
  Longest contiguous window where rates stay within rel_tol of level

  Returns:
      (t_start, t_end) when the window spans at least a factor min_ratio in
      time, otherwise None
  """
  inside = np.abs(np.asarray(rates) - level) <= rel_tol * abs(level)
  best: Optional[tuple[float, float]] = None
  best_ratio = 0.0
  start: Optional[int] = None
  for i, flag in enumerate([*inside, False]):
    if flag and start is None:
      start = i
    elif not flag and start is not None:
      t0, t1 = float(times[start]), float(times[i - 1])
      ratio = t1 / t0 if t0 > 0 else math.inf
      if ratio > best_ratio:
        best, best_ratio = (t0, t1), ratio
      start = None
  if best is None or best_ratio < min_ratio:
    return None
  return best


def estimate_crossovers(J: float, gamma: float, L: int, lambda_star: complex) -> tuple[float, float]:  # noqa: N803
  """
  Crossover times of the coherence decay

  tau1 = ln(L gamma / J) / gamma ends incoherenton production;
  tau2 = 1 / |Re lambda*| ends the incoherenton plateau.

  Raises:
      InvalidArgumentsError: If J or gamma is not positive
  """
  if J <= 0 or gamma <= 0:
    raise InvalidArgumentsError("crossover estimates need J > 0 and gamma > 0")
  tau1 = math.log(L * gamma / J) / gamma
  tau2 = math.inf if lambda_star.real == 0 else 1.0 / abs(lambda_star.real)
  return tau1, tau2


def incoherent_band_edge(modes: EigenmodeSet, table: ModeTable) -> complex:
  """Most negative real part among nonzero group-0 (bound-pair dominated) eigenvalues"""
  incoherent = np.asarray(table.groups) == 0
  candidates = modes.eigenvalues[incoherent & (np.abs(modes.eigenvalues) > 1e-9)]
  if candidates.size == 0:
    raise InvalidArgumentsError("no nonzero incoherent eigenvalue in the spectrum")
  return complex(candidates[np.argmin(candidates.real)])
