"""
Exact-solution layer of the one-dimensional dephasing model
k-Lambda strings of the non-Hermitian Hubbard ladder and its eta/spin symmetries
"""

import cmath
import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .config import get_dense_limit
from .constants import STRING_TOL
from .exceptions import InvalidArgumentsError, NoStringSolutionError, SizeLimitError, StringValidationError
from .models import BetheParams
from .utils.logging import get_logger

logger = get_logger(__name__)

MAX_LADDER_SITES = 6


@dataclass(frozen=True)
class KLambdaString:
  """
  k-Lambda string of order m

  quasimomenta holds k_1..k_{2m}; rapidities holds Lambda_1..Lambda_m.
  """

  m: int
  p: float
  kappa: float
  mu: float
  J: float
  gamma: float
  quasimomenta: tuple[complex, ...]
  rapidities: tuple[complex, ...]
  confined: bool = True

  @property
  def q(self) -> float:
    return self.p + math.pi

  @property
  def u(self) -> complex:
    return complex(0.0, self.gamma / (4.0 * self.J))

  @property
  def K(self) -> float:  # noqa: N802
    """Total momentum 2p"""
    return 2.0 * self.p

  @property
  def lam(self) -> complex:
    return string_eigenvalue(self)


def j_crit_m(m: int, gamma: float) -> float:
  """Deconfinement threshold m gamma / 4 of order-m strings"""
  if m < 1:
    raise InvalidArgumentsError(f"string order must be >= 1, got {m}")
  return m * gamma / 4.0


def _arcsin(x: complex) -> complex:
  """Principal arcsin, -pi/2 <= Re <= pi/2"""
  return complex(cmath.asin(x))


def _build(m: int, p: float, kappa: float, J: float, gamma: float, confined: bool) -> KLambdaString:  # noqa: N803
  iu = -gamma / (4.0 * J)
  mu = -math.cos(p) * math.sinh(kappa)
  centre = 1j * mu
  momenta: list[complex] = [complex(p, -kappa)]
  for j in range(1, m):
    x = centre + (m - 2 * j) * iu
    a = _arcsin(x)
    momenta.extend([math.pi - a, a])
  momenta.append(complex(p + math.pi, kappa))
  rapidities = tuple(centre + (m - 2 * j + 1) * iu for j in range(1, m + 1))
  return KLambdaString(m=m, p=p, kappa=kappa, mu=mu, J=J, gamma=gamma, quasimomenta=tuple(momenta), rapidities=rapidities, confined=confined)


def solve_string(m: int, p: float, J: float, gamma: float, allow_deconfined: bool = False) -> KLambdaString:  # noqa: N803
  """
  Construct the order-m k-Lambda string with Re k_1 = p

  cosh(kappa) = -m gamma / (4 J sin p), mu = -cos(p) sinh(kappa). The
  boundary kappa = 0 counts as no solution.

  Args:
      m: String order
      p: Real part of k_1, inside (-pi, 0)
      J: Hopping amplitude
      gamma: Dephasing rate
      allow_deconfined: Return a trial string with kappa = 0 instead of raising

  Raises:
      NoStringSolutionError: If the string is deconfined at (m, p, J)
      StringValidationError: If the constructed string violates its pattern
  """
  if m < 1:
    raise InvalidArgumentsError(f"string order must be >= 1, got {m}")
  if J <= 0:
    raise InvalidArgumentsError(f"J must be positive, got {J}")
  if not -math.pi < p < 0:
    raise InvalidArgumentsError(f"p={p} outside (-pi, 0)")

  argument = -m * gamma / (4.0 * J * math.sin(p))
  if argument <= 1.0:
    if allow_deconfined:
      return _build(m, p, 0.0, J, gamma, confined=False)
    raise NoStringSolutionError(f"no order-{m} string at p={p:.6f}, J={J}: cosh(kappa) = {argument:.6f} <= 1")
  kappa = math.acosh(argument)
  string = _build(m, p, kappa, J, gamma, confined=True)
  validate_string(string)
  return string


def validate_string(s: KLambdaString) -> None:
  """
  Check the string pattern, the momentum sum rule and eigenvalue agreement

  Raises:
      StringValidationError: On any violation beyond 1e-10
  """
  iu = 1j * s.u
  k = s.quasimomenta
  split = cmath.sin(k[0]) - cmath.sin(k[-1]) - 2 * s.m * iu
  if abs(split) > 1e-12 * max(1.0, abs(2 * s.m * iu)):
    raise StringValidationError(f"sin k_1 - sin k_2m deviates from 2 m i u by {abs(split):.3g}")
  for j, rapidity in enumerate(s.rapidities, start=1):
    expected = 1j * s.mu + (s.m - 2 * j + 1) * iu
    if abs(rapidity - expected) > STRING_TOL:
      raise StringValidationError(f"rapidity {j} off its string position by {abs(rapidity - expected):.3g}")
  if abs(sum(k).imag) > 1e-12 * max(1.0, s.m):
    raise StringValidationError(f"momentum sum has imaginary part {sum(k).imag:.3g}")
  summed = eigenvalue_sum(s)
  closed = eigenvalue_closed(s.m, s.K, s.J, s.gamma)
  if abs(summed - closed) > STRING_TOL * max(1.0, abs(closed)):
    raise StringValidationError(f"string eigenvalue forms disagree by {abs(summed - closed):.3g}")


def eigenvalue_sum(s: KLambdaString) -> complex:
  """lambda = -gamma (N_up + N_down) / 2 + 2iJ sum_a cos k_a"""
  return -s.m * s.gamma + 2j * s.J * sum(cmath.cos(k) for k in s.quasimomenta)


def eigenvalue_closed(m: int, K: float, J: float, gamma: float) -> complex:  # noqa: N803
  """lambda = -m gamma + sqrt(m^2 gamma^2 - 16 J^2 sin^2(K/2))"""
  return -m * gamma + cmath.sqrt(complex(m * m * gamma * gamma - 16.0 * J * J * math.sin(K / 2.0) ** 2))


def string_eigenvalue(s: KLambdaString) -> complex:
  """
  Eigenvalue of a confined string, from the quasimomentum sum

  Raises:
      StringValidationError: If the sum and closed forms disagree beyond 1e-10
  """
  summed = eigenvalue_sum(s)
  if s.confined:
    closed = eigenvalue_closed(s.m, s.K, s.J, s.gamma)
    if abs(summed - closed) > STRING_TOL * max(1.0, abs(closed)):
      raise StringValidationError(f"string eigenvalue forms disagree by {abs(summed - closed):.3g}")
  return summed


def hermitian_string_kappa(m: int, p: float, u: float) -> float:
  """
  kappa of the string of the Hermitian Hubbard model with real u

  sinh(kappa) = -m u / cos(p) has a solution for every p with cos(p) != 0.
  """
  c = math.cos(p)
  if abs(c) < 1e-15:
    raise InvalidArgumentsError("cos(p) vanishes; the Hermitian string is singular at p = -pi/2")
  return math.asinh(-m * u / c)


def _log_equation_residual(lhs_log: complex, numerators: list[complex], denominators: list[complex], tol: float) -> float:
  """
  Log of the deviation one Bethe equation e^{lhs_log} = prod(num) / prod(den) demands

  Factors below tol count as vanishing. With a net order d != 0 of vanishing
  factors the equation fixes their size eps through eps^d = e^{lhs_log} / F,
  F the product of the finite factors. Balanced vanishing factors only fix
  ratios and give -inf; an equation without any is compared directly.
  """
  log_f = 0j
  order = 0
  vanishing = 0
  for f in numerators:
    if abs(f) <= tol:
      order += 1
      vanishing += 1
    else:
      log_f += cmath.log(f)
  for f in denominators:
    if abs(f) <= tol:
      order -= 1
      vanishing += 1
    else:
      log_f -= cmath.log(f)
  if order != 0:
    return (lhs_log.real - log_f.real) / order
  if vanishing:
    return -math.inf
  w = log_f - lhs_log
  if w.real > 0:
    w = -w
  return math.log(max(abs(cmath.exp(w) - 1.0), 1e-300))


def bethe_residual(s: KLambdaString, L: int, phi: Optional[float] = None) -> float:  # noqa: N803
  """
  Finite-size deviation of a string from the Bethe equations

  Forms all 2m momentum equations e^{i k_a L - i phi} = prod_alpha
  (Lambda_alpha - sin k_a - iu) / (Lambda_alpha - sin k_a + iu) and all m
  rapidity equations, and returns the largest deviation any of them demands,
  evaluated in log space. A confined string leaves one vanishing factor in
  the k_1 and k_2m equations, so the residual decays like e^{-kappa L}; a
  deconfined or broken string leaves finite mismatches that do not decay.

  Args:
      s: String to test
      L: Ring length
      phi: Flux (defaults to 0 for odd m and pi for even m)
  """
  if L < 2:
    raise InvalidArgumentsError(f"L must be >= 2, got {L}")
  phi = (0.0 if s.m % 2 == 1 else math.pi) if phi is None else phi
  iu = 1j * s.u
  tol = STRING_TOL * max(1.0, abs(iu))
  sines = [cmath.sin(k) for k in s.quasimomenta]
  logs = []
  for k, sin_k in zip(s.quasimomenta, sines):
    numerators = [lam - sin_k - iu for lam in s.rapidities]
    denominators = [lam - sin_k + iu for lam in s.rapidities]
    logs.append(_log_equation_residual(1j * k * L - 1j * phi, numerators, denominators, tol))
  for lam in s.rapidities:
    numerators = [lam - sin_k - iu for sin_k in sines] + [lam - other + 2 * iu for other in s.rapidities]
    denominators = [lam - sin_k + iu for sin_k in sines] + [lam - other - 2 * iu for other in s.rapidities]
    logs.append(_log_equation_residual(1j * math.pi, numerators, denominators, tol))
  return float(math.exp(min(max(logs), 700.0)))


@dataclass(frozen=True)
class StringScanRow:
  m: int
  p: float
  J: float
  gamma: float
  string: Optional[KLambdaString]
  residuals: dict[int, float]

  @property
  def exists(self) -> bool:
    return self.string is not None


def string_p_grid(n_p: int) -> np.ndarray:
  """Interior grid p_j = -pi + pi j / n_p, j = 1 .. n_p - 1"""
  return -math.pi + math.pi * np.arange(1, n_p) / n_p


def scan_strings(m: int, J: float, gamma: float, n_p: int = 200, residual_L: Optional[list[int]] = None) -> list[StringScanRow]:  # noqa: N803
  """Strings over the p grid, with Bethe residuals at each requested L"""
  rows = []
  for p in string_p_grid(n_p):
    try:
      string: Optional[KLambdaString] = solve_string(m, float(p), J, gamma)
    except NoStringSolutionError:
      string = None
    residuals = {L: bethe_residual(string, L) for L in residual_L or []} if string is not None else {}
    rows.append(StringScanRow(m=m, p=float(p), J=J, gamma=gamma, string=string, residuals=residuals))
  return rows


def no_solution_interval(rows: list[StringScanRow]) -> Optional[tuple[float, float]]:
  """Smallest p interval holding every no-solution grid point"""
  missing = [row.p for row in rows if not row.exists]
  if not missing:
    return None
  return min(missing), max(missing)


def locate_deconfinement(m: int, gamma: float, J_values: list[float], n_p: int = 200) -> Optional[float]:  # noqa: N803
  """First J, in ascending order, where some grid point has no string"""
  for J in sorted(J_values):
    if no_solution_interval(scan_strings(m, J, gamma, n_p)) is not None:
      return J
  return None


# Jordan-Wigner construction of the spinful ring: modes 0..L-1 carry spin up
# on sites 1..L, modes L..2L-1 spin down; mode 0 is the most significant factor.
_CREATE = sp.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]))
_PARITY = sp.csr_matrix(np.diag([1.0, -1.0]))
_IDENTITY = sp.identity(2, format="csr")


def _creation(mode: int, n_modes: int) -> sp.csr_matrix:
  factors = [_PARITY] * mode + [_CREATE] + [_IDENTITY] * (n_modes - mode - 1)
  return sp.csr_matrix(reduce(lambda a, b: sp.kron(a, b, format="csr"), factors))


@dataclass(frozen=True)
class HubbardLadderOps:
  """Non-Hermitian Hubbard Hamiltonian under flux and its symmetry generators"""

  L: int
  params: BetheParams
  phi: float
  H: sp.csr_matrix
  eta_plus: sp.csr_matrix
  eta_minus: sp.csr_matrix
  eta_z: sp.csr_matrix
  s_plus: sp.csr_matrix
  s_minus: sp.csr_matrix
  s_z: sp.csr_matrix
  n_up: np.ndarray
  n_down: np.ndarray

  @property
  def dim(self) -> int:
    return int(self.H.shape[0])

  def generators(self) -> dict[str, sp.csr_matrix]:
    return {
      "eta_plus": self.eta_plus,
      "eta_minus": self.eta_minus,
      "eta_z": self.eta_z,
      "s_plus": self.s_plus,
      "s_minus": self.s_minus,
      "s_z": self.s_z,
    }

  def commutator_norms(self) -> dict[str, float]:
    """max |[H, X]_ij| for every generator X"""
    norms = {}
    for name, op in self.generators().items():
      commutator = (self.H @ op - op @ self.H).tocoo()
      norms[name] = float(np.max(np.abs(commutator.data), initial=0.0))
    return norms

  def sector_indices(self, n_up: int, n_down: int) -> np.ndarray:
    return np.flatnonzero((self.n_up == n_up) & (self.n_down == n_down))

  def sector_hamiltonian(self, n_up: int, n_down: int) -> np.ndarray:
    idx = self.sector_indices(n_up, n_down)
    return np.asarray(self.H[idx][:, idx].toarray())

  def sector_spectrum(self, n_up: int, n_down: int) -> np.ndarray:
    return np.asarray(scipy.linalg.eigvals(self.sector_hamiltonian(n_up, n_down)))

  def vacuum(self) -> np.ndarray:
    v = np.zeros(self.dim, dtype=np.complex128)
    v[0] = 1.0
    return v

  def pair_state(self, n: int) -> np.ndarray:
    """(eta^+)^n |vac>"""
    v = self.vacuum()
    for _ in range(n):
      v = self.eta_plus @ v
    return np.asarray(v)

  def steady_state_residual(self, n: int) -> float:
    """|| H (eta^+)^n |vac> ||"""
    return float(np.linalg.norm(self.H @ self.pair_state(n)))


def build_hubbard_ladder(params: BetheParams, phi: Optional[float] = None, dense_limit: Optional[int] = None) -> HubbardLadderOps:
  """
  Assemble H_phi and the eta/spin generators on the 4^L Fock space

  H_phi = -J sum_{l,sigma} (e^{-i phi/L} c^dag_{l,sigma} c_{l+1,sigma} + h.c.)
          + i gamma sum_l n_{l,up} n_{l,down} - (i gamma / 2)(N_up + N_down)

  Args:
      params: J, gamma, L and the particle number fixing the default flux
      phi: Flux override (defaults to 0 for odd N and pi for even N)
      dense_limit: Cap on 4^L

  Raises:
      SizeLimitError: If L > 6 or 4^L exceeds the dense limit
  """
  L = params.L
  limit = dense_limit if dense_limit is not None else get_dense_limit()
  if L > MAX_LADDER_SITES or 4**L > limit:
    raise SizeLimitError(f"Hubbard ladder of L={L} needs dimension {4**L}", size=4**L, limit=min(limit, 4**MAX_LADDER_SITES))
  phi = params.phi if phi is None else phi
  n_modes = 2 * L
  create = [_creation(mode, n_modes) for mode in range(n_modes)]
  annihilate = [c.T.tocsr() for c in create]
  number = [create[i] @ annihilate[i] for i in range(n_modes)]
  up = range(L)
  down = range(L, 2 * L)

  dim = 2**n_modes
  H = sp.csr_matrix((dim, dim), dtype=np.complex128)
  twist = cmath.exp(-1j * phi / L)
  for spin in (up, down):
    modes = list(spin)
    for l in range(L):
      a, b = modes[l], modes[(l + 1) % L]
      hop = twist * (create[a] @ annihilate[b])
      H = H - params.J * (hop + hop.conj().T)
  gamma = params.gamma
  for l in range(L):
    H = H + 1j * gamma * (number[l] @ number[L + l])
  total = reduce(lambda x, y: x + y, number)
  H = (H - 0.5j * gamma * total).tocsr()

  eta_plus = sp.csr_matrix((dim, dim), dtype=np.complex128)
  for l in range(L):
    site = l + 1
    eta_plus = eta_plus + ((-1) ** site) * cmath.exp(2j * phi * site / L) * (create[l] @ create[L + l])
  identity = sp.identity(dim, format="csr")
  eta_z = 0.5 * (total - L * identity)
  s_plus = reduce(lambda x, y: x + y, [create[l] @ annihilate[L + l] for l in range(L)])
  n_up_op = reduce(lambda x, y: x + y, [number[l] for l in up])
  n_down_op = reduce(lambda x, y: x + y, [number[l] for l in down])

  ops = HubbardLadderOps(
    L=L,
    params=params,
    phi=phi,
    H=H,
    eta_plus=eta_plus.tocsr(),
    eta_minus=eta_plus.conj().T.tocsr(),
    eta_z=eta_z.tocsr(),
    s_plus=s_plus.tocsr(),
    s_minus=s_plus.conj().T.tocsr(),
    s_z=(0.5 * (n_up_op - n_down_op)).tocsr(),
    n_up=np.rint(n_up_op.diagonal().real).astype(np.int64),
    n_down=np.rint(n_down_op.diagonal().real).astype(np.int64),
  )
  logger.debug("Built Hubbard ladder L=%d phi=%.4f, dim %d", L, phi, dim)
  return ops


def eta_tower_residual(ops: HubbardLadderOps, target: complex, n: int = 1) -> tuple[complex, float]:
  """
  Eigenvalue shift under eta^+ for the (n, n) eigenstate nearest target

  Returns:
      (eigenvalue, ||H v - E v|| / ||v||) with v = eta^+ psi
  """
  idx = ops.sector_indices(n, n)
  w, vecs = scipy.linalg.eig(ops.sector_hamiltonian(n, n))
  for j in np.argsort(np.abs(w - target)):
    psi = np.zeros(ops.dim, dtype=np.complex128)
    psi[idx] = vecs[:, j]
    v = ops.eta_plus @ psi
    norm = float(np.linalg.norm(v))
    if norm > 1e-6:
      return complex(w[j]), float(np.linalg.norm(ops.H @ v - w[j] * v)) / norm
  raise InvalidArgumentsError(f"eta^+ annihilates every ({n}, {n}) eigenstate")
