"""
Closed-form one-particle solution
Momentum blocks of the relative coordinate, bound-state exponents and the QC gap
"""

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.optimize import newton

from .constants import EXISTS_TOL, NEWTON_MAXITER, NEWTON_TOL
from .exceptions import InvalidArgumentsError, SolverFailureError
from .utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class MomentumBlock:
  """L x L generator of the relative coordinate at centre-of-mass momentum k = 2 pi s / L"""

  k: float
  s: int
  L: int
  J: float
  gamma: float
  matrix: np.ndarray

  def eigenvalues(self) -> np.ndarray:
    return np.asarray(scipy.linalg.eigvals(self.matrix))


@dataclass(frozen=True)
class BoundStateSolution:
  """Incoherenton exponents of the relative-coordinate bound state"""

  k: float
  alpha: complex
  beta: complex
  lam: complex
  xi_con: float
  exists: bool
  residual: float


def momentum_grid(L: int, centered: bool = False) -> np.ndarray:  # noqa: N803
  """
  Allowed momenta 2 pi s / L

  Args:
      L: Ring length
      centered: Return the grid in (-pi, pi] instead of [0, 2 pi)
  """
  s = np.arange(L)
  if centered:
    s = np.arange(-((L - 1) // 2), L // 2 + 1)
  return 2.0 * np.pi * s / L


def _grid_index(k: float, L: int) -> int:  # noqa: N803
  s = k * L / (2.0 * math.pi)
  nearest = round(s)
  if abs(s - nearest) > 1e-9:
    raise InvalidArgumentsError(f"k={k} is not on the momentum grid of L={L}")
  return int(nearest) % L


def build_momentum_block(k: float, J: float, gamma: float, L: int) -> MomentumBlock:  # noqa: N803
  """
  Relative-coordinate tight-binding model of the one-particle Liouvillian

  Diagonal -gamma except 0 at r = 0; hopping iJ(1 - e^{-ik}) from r+1 to r
  and iJ(1 - e^{ik}) from r-1 to r, periodic in r. For L = 2 the two
  neighbours coincide and the amplitudes add.

  Raises:
      InvalidArgumentsError: If k is off the grid or L < 2
  """
  if L < 2:
    raise InvalidArgumentsError(f"L must be >= 2, got {L}")
  s = _grid_index(k, L)
  k_grid = 2.0 * math.pi * s / L
  forward = 1j * J * (1.0 - cmath.exp(-1j * k_grid))
  backward = 1j * J * (1.0 - cmath.exp(1j * k_grid))
  matrix = np.zeros((L, L), dtype=np.complex128)
  for r in range(L):
    if r != 0:
      matrix[r, r] = -gamma
    matrix[r, (r + 1) % L] += forward
    matrix[r, (r - 1) % L] += backward
  return MomentumBlock(k=k_grid, s=s, L=L, J=J, gamma=gamma, matrix=matrix)


def block_spectrum_union(J: float, gamma: float, L: int) -> np.ndarray:  # noqa: N803
  """Eigenvalues of every momentum block, concatenated over the grid"""
  return np.concatenate([build_momentum_block(k, J, gamma, L).eigenvalues() for k in momentum_grid(L)])


def block_mode_to_ladder(psi: np.ndarray, k: float, L: int) -> np.ndarray:  # noqa: N803
  """
  One-particle density-matrix mode of a block eigenvector

  rho[(m + r) mod L, m] = e^{ikm} psi_r / sqrt(L), indexed by site.
  """
  psi = np.asarray(psi)
  if psi.shape != (L,):
    raise InvalidArgumentsError(f"block vector of shape {psi.shape} does not match L={L}")
  rho = np.zeros((L, L), dtype=np.complex128)
  m = np.arange(L)
  for r in range(L):
    rho[(m + r) % L, m] = np.exp(1j * k * m) * psi[r] / math.sqrt(L)
  return rho


def lambda_inc(k: float, J: float, gamma: float) -> complex:  # noqa: N803
  """Incoherent-branch eigenvalue -gamma + sqrt(gamma^2 - 16 J^2 sin^2(k/2)), principal root"""
  return -gamma + cmath.sqrt(complex(gamma * gamma - 16.0 * J * J * math.sin(k / 2.0) ** 2))


def j_crit(k: float, gamma: float) -> float:
  """
  Deconfinement hopping gamma / (4 |sin(k/2)|)

  Returns:
      Critical J, or inf at k = 0 (no transition)
  """
  s = abs(math.sin(k / 2.0))
  if s < 1e-15:
    return math.inf
  return gamma / (4.0 * s)


def k_crit(J: float, gamma: float) -> Optional[float]:  # noqa: N803
  """Smallest |k| without a bound state, or None when one exists for every k"""
  if J <= gamma / 4.0:
    return None
  return 2.0 * math.asin(gamma / (4.0 * J))


def _eigenvalue_from_growth(alpha: complex, k: float, J: float, gamma: float) -> complex:  # noqa: N803
  return 1j * J * (cmath.exp(alpha) + cmath.exp(-alpha) - cmath.exp(1j * k + alpha) - cmath.exp(-1j * k - alpha)) - gamma


def _eigenvalue_from_pair(alpha: complex, beta: complex, k: float, J: float) -> complex:  # noqa: N803
  return 1j * J * (1.0 - cmath.exp(1j * k)) * cmath.exp(-beta) + 1j * J * (1.0 - cmath.exp(-1j * k)) * cmath.exp(-alpha)


def solve_bound_state(k: float, J: float, gamma: float) -> BoundStateSolution:  # noqa: N803
  """
  Bound state of the relative coordinate at momentum k

  alpha solves cosh(alpha + ik/2) = gamma / (4 J sin(k/2)), seeded by the
  principal arccosh and polished by Newton iteration; beta = alpha + i(k - pi).
  At k = pi this is sinh(alpha) = -i gamma / (4J).

  Returns:
      BoundStateSolution; exists when Re alpha > 1e-9, in which case lam equals
      lambda_inc(k). Otherwise lam is lambda_inc(k) and xi_con is inf.

  Raises:
      SolverFailureError: If Newton iteration does not converge
  """
  s = math.sin(k / 2.0)
  if J == 0.0 or abs(s) < 1e-15:
    return BoundStateSolution(k=k, alpha=complex(math.inf, 0.0), beta=complex(math.inf, 0.0), lam=0j, xi_con=0.0, exists=True, residual=0.0)

  x = gamma / (4.0 * J * s)
  alpha = cmath.acosh(x) - 0.5j * k

  def defining(a: complex) -> complex:
    return 4.0 * J * s * cmath.cosh(a + 0.5j * k) - gamma

  def derivative(a: complex) -> complex:
    return 4.0 * J * s * cmath.sinh(a + 0.5j * k)

  exists = alpha.real > EXISTS_TOL
  if exists and abs(cmath.sinh(alpha + 0.5j * k)) > 1e-8:
    try:
      alpha = complex(newton(defining, alpha, fprime=derivative, tol=NEWTON_TOL, maxiter=NEWTON_MAXITER))
    except RuntimeError as e:
      raise SolverFailureError(f"bound-state Newton iteration failed at k={k}: {e}", residual=abs(defining(alpha))) from e
    exists = alpha.real > EXISTS_TOL

  beta = alpha + 1j * (k - math.pi)
  growth = _eigenvalue_from_growth(alpha, k, J, gamma)
  pair = _eigenvalue_from_pair(alpha, beta, k, J)
  residual = abs(growth - pair)
  if exists:
    lam = pair
    residual = max(residual, abs(pair - lambda_inc(k, J, gamma)))
    xi_con = 1.0 / alpha.real
  else:
    lam = lambda_inc(k, J, gamma)
    xi_con = math.inf
  return BoundStateSolution(k=k, alpha=alpha, beta=beta, lam=lam, xi_con=xi_con, exists=exists, residual=residual)


def bound_state_scan(J: float, gamma: float, L: int) -> list[BoundStateSolution]:  # noqa: N803
  """Bound-state solutions over the centred momentum grid of L"""
  return [solve_bound_state(float(k), J, gamma) for k in momentum_grid(L, centered=True)]


def qc_gap_analytic(J: float, gamma: float) -> float:  # noqa: N803
  """Large-L one-particle gap sqrt(gamma^2 - 16 J^2), clamped at 0"""
  return math.sqrt(max(gamma * gamma - 16.0 * J * J, 0.0))


def confinement_length_analytic(J: float, gamma: float) -> float:  # noqa: N803
  """xi_con of the k = pi bound state, 1 / arccosh(gamma / 4J)"""
  return solve_bound_state(math.pi, J, gamma).xi_con
