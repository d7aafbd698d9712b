"""
Diagonalization of the Liouvillian and incoherenton classification
Eigenmode metrics, QC gaps, confinement lengths and spectral invariants
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .basis import SectorBasis
from .config import get_dense_limit
from .constants import (
  CONJUGATION_TOL,
  DEGENERACY_TOL,
  GROUP_EDGE_MARGIN,
  INCOHERENT_RATIO,
  POSITIVE_REAL_TOL,
  RESIDUAL_REL_TOL,
  STEADY_TOL,
)
from .exceptions import FitDegenerateError, InvalidArgumentsError, SizeLimitError, SolverFailureError
from .liouvillian import Superoperator
from .models import ModeMetrics, QcGapReport, SpectralInvariantsReport
from .utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class EigenmodeSet:
  """
  Eigen-decomposition of a superoperator

  Columns of right_modes are ket-major vectorized eigenmodes normalized to
  unit ladder 2-norm, ordered by ascending |Re lambda| (ties by Im lambda).
  """

  eigenvalues: np.ndarray
  right_modes: np.ndarray
  residual_norms: np.ndarray
  basis: SectorBasis
  frobenius_norm: float
  left_modes: Optional[np.ndarray] = None

  @property
  def dim(self) -> int:
    return self.basis.dimension

  @property
  def count(self) -> int:
    return int(self.eigenvalues.shape[0])

  def mode_matrix(self, alpha: int) -> np.ndarray:
    D = self.dim
    return np.asarray(self.right_modes[:, alpha]).reshape(D, D)

  def steady_indices(self) -> np.ndarray:
    return np.flatnonzero(np.abs(self.eigenvalues) <= STEADY_TOL)

  @property
  def liouvillian_gap(self) -> float:
    """|Re lambda_1|; zero when the steady state is not unique"""
    steady = self.steady_indices()
    if steady.size != 1:
      return 0.0
    rest = np.delete(self.eigenvalues, steady)
    if rest.size == 0:
      return 0.0
    return float(np.min(np.abs(rest.real)))

  def nearest(self, target: complex) -> int:
    """Index of the eigenvalue closest to target"""
    return int(np.argmin(np.abs(self.eigenvalues - target)))


@dataclass(frozen=True)
class ModeTable:
  """Metrics of every mode in an EigenmodeSet, as parallel arrays"""

  n_b: np.ndarray
  s_diag: Optional[np.ndarray]
  s_off: Optional[np.ndarray]
  trace: np.ndarray
  groups: np.ndarray
  classes: list[str]
  ambiguous: np.ndarray
  N: int

  def to_models(self) -> list[ModeMetrics]:
    models = []
    for i in range(self.n_b.shape[0]):
      models.append(
        ModeMetrics(
          n_b=float(self.n_b[i]),
          s_diag=None if self.s_diag is None else float(self.s_diag[i]),
          s_off=None if self.s_off is None else float(self.s_off[i]),
          trace_abs=float(abs(self.trace[i])),
          mode_class=self.classes[i],  # type: ignore[arg-type]
          group=int(self.groups[i]),
        )
      )
    return models


def diagonalize(M: Superoperator, left: bool = False, dense_limit: Optional[int] = None) -> EigenmodeSet:  # noqa: N803
  """
  Full dense eigen-decomposition of a superoperator

  Args:
      M: Superoperator
      left: Also compute left eigenvectors, normalized so that vl^H vr = 1
      dense_limit: Cap on D^2 (defaults to INCOH_DENSE_LIMIT)

  Returns:
      EigenmodeSet with residuals ||M v - lambda v||

  Raises:
      SizeLimitError: If D^2 exceeds the limit
      SolverFailureError: If the LAPACK driver does not converge
  """
  size = M.matrix.shape[0]
  limit = dense_limit if dense_limit is not None else get_dense_limit()
  if size > limit:
    raise SizeLimitError(f"D^2 = {size} exceeds the dense limit {limit}", size=size, limit=limit)

  try:
    if left:
      w, vl, vr = scipy.linalg.eig(M.matrix, left=True, right=True)
    else:
      w, vr = scipy.linalg.eig(M.matrix, right=True)
      vl = None
  except (np.linalg.LinAlgError, ValueError) as e:
    raise SolverFailureError(f"dense eigensolver failed: {e}") from e
  if not np.all(np.isfinite(w)):
    raise SolverFailureError("dense eigensolver returned non-finite eigenvalues")

  order = np.lexsort((w.imag, np.abs(w.real)))
  w = w[order]
  vr = vr[:, order]
  vr = vr / np.linalg.norm(vr, axis=0)
  # fix the global phase: largest component real and positive
  pivot = np.argmax(np.abs(vr), axis=0)
  phases = vr[pivot, np.arange(vr.shape[1])]
  vr = vr * (np.abs(phases) / phases)

  if vl is not None:
    vl = vl[:, order]
    overlaps = np.einsum("ij,ij->j", vl.conj(), vr)
    safe = np.where(np.abs(overlaps) > 1e-300, overlaps, 1.0)
    vl = vl / safe.conj()

  residuals = np.linalg.norm(M.matrix @ vr - vr * w, axis=0)
  frobenius = float(np.linalg.norm(M.matrix))
  worst = float(np.max(residuals, initial=0.0))
  if worst > RESIDUAL_REL_TOL * max(frobenius, 1.0):
    logger.warning("Eigen-residual degraded: max %.3g vs tolerance %.3g (possible exceptional point)", worst, RESIDUAL_REL_TOL * frobenius)
  logger.debug("Diagonalized D^2=%d, max residual %.3g", size, worst)
  return EigenmodeSet(eigenvalues=w, right_modes=vr, residual_norms=residuals, basis=M.basis, frobenius_norm=frobenius, left_modes=vl)


def _as_matrix(mode: np.ndarray, basis: SectorBasis) -> np.ndarray:
  D = basis.dimension
  mode = np.asarray(mode)
  if mode.shape == (D * D,):
    return mode.reshape(D, D)
  if mode.shape == (D, D):
    return mode
  raise InvalidArgumentsError(f"mode of shape {mode.shape} does not match D={D}")


def bound_pair_kernel(basis: SectorBasis) -> np.ndarray:
  """K[i, j] = sum_l n_l(i) n_l(j)"""
  occ = basis.occupations.astype(np.float64)
  return np.asarray(occ @ occ.T)


def bound_pair_fraction(mode: np.ndarray, basis: SectorBasis) -> float:
  """
  Expected number of rung-doubly-occupied pairs of a normalized ladder mode

  N_b = sum_{ij} |rho_ij|^2 sum_l n_l(i) n_l(j)
  """
  rho = _as_matrix(mode, basis)
  return float(np.sum(np.abs(rho) ** 2 * bound_pair_kernel(basis)))


def ring_distance(L: int) -> np.ndarray:  # noqa: N803
  """Periodic distance between every pair of sites"""
  sites = np.arange(L)
  diff = np.abs(sites[:, None] - sites[None, :])
  return np.asarray(np.minimum(diff, L - diff))


def _one_particle_sites(basis: SectorBasis) -> np.ndarray:
  if basis.N != 1:
    raise InvalidArgumentsError("diagonal/off-diagonal weights are defined for the one-particle sector only")
  return np.asarray(np.argmax(basis.occupations, axis=1))


def _site_ordered(rho: np.ndarray, basis: SectorBasis) -> np.ndarray:
  """Reindex a one-particle matrix by site"""
  sites = _one_particle_sites(basis)
  out = np.empty_like(rho)
  out[np.ix_(sites, sites)] = rho
  return out


def diag_off_weights(mode: np.ndarray, basis: SectorBasis) -> tuple[float, float]:
  """
  Near-diagonal and far-off-diagonal weights of a one-particle mode

  Returns:
      (s_diag, s_off) with s_diag summing |rho_lm| over ring distance < L/4
  """
  rho = _site_ordered(_as_matrix(mode, basis), basis)
  near = ring_distance(basis.L) < basis.L / 4.0
  magnitude = np.abs(rho)
  return float(magnitude[near].sum()), float(magnitude[~near].sum())


def group_edges(N: int) -> np.ndarray:  # noqa: N803
  """Edges of N+1 uniform bins over [0, N]"""
  return np.array([(j + 1) * N / (N + 1) for j in range(N)], dtype=np.float64)


def eigenvalue_clusters(eigenvalues: np.ndarray, tol: float = DEGENERACY_TOL) -> np.ndarray:
  """Label eigenvalues connected by chains of separations below tol"""
  n = eigenvalues.shape[0]
  if n == 0:
    return np.zeros(0, dtype=np.int64)
  points = np.column_stack((eigenvalues.real, eigenvalues.imag))
  pairs = cKDTree(points).query_pairs(r=tol, output_type="ndarray")
  graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)) if len(pairs) else coo_matrix((n, n))
  _, labels = connected_components(graph, directed=False)
  return np.asarray(labels)


def assign_groups(n_b: np.ndarray, N: int, eigenvalues: Optional[np.ndarray] = None) -> tuple[np.ndarray, np.ndarray]:  # noqa: N803
  """
  Number of unbound pairs for every mode by N_b binning

  Degenerate clusters are binned by their mean N_b, which does not depend on
  the basis chosen inside the cluster.

  Returns:
      (groups, ambiguous) where ambiguous flags N_b within 0.05 of an edge
  """
  values = np.asarray(n_b, dtype=np.float64)
  if eigenvalues is not None:
    labels = eigenvalue_clusters(eigenvalues)
    sums = np.bincount(labels, weights=values)
    counts = np.bincount(labels)
    values = (sums / counts)[labels]
  if N == 0:
    return np.zeros(values.shape, dtype=np.int64), np.zeros(values.shape, dtype=bool)
  edges = group_edges(N)
  bins = np.searchsorted(edges, values, side="right")
  groups = N - bins
  ambiguous = np.any(np.abs(values[:, None] - edges[None, :]) < GROUP_EDGE_MARGIN, axis=1)
  return np.asarray(groups, dtype=np.int64), np.asarray(ambiguous)


def mode_metrics(modes: EigenmodeSet) -> ModeTable:
  """
  Classify every eigenmode

  One particle: incoherent when s_off / s_diag < 0.1, otherwise coherent.
  Many body: group 0 is incoherent, group N coherent, the rest intermediate.
  """
  basis = modes.basis
  D, N = basis.dimension, basis.N
  weights = np.abs(modes.right_modes) ** 2
  n_b = np.einsum("f,fa->a", bound_pair_kernel(basis).reshape(D * D), weights)
  trace = modes.right_modes[np.arange(D) * (D + 1), :].sum(axis=0)
  groups, ambiguous = assign_groups(n_b, N, modes.eigenvalues)

  s_diag: Optional[np.ndarray] = None
  s_off: Optional[np.ndarray] = None
  if N == 1:
    sites = _one_particle_sites(basis)
    near = (ring_distance(basis.L) < basis.L / 4.0)[np.ix_(sites, sites)].reshape(D * D)
    magnitude = np.abs(modes.right_modes)
    s_diag = magnitude[near, :].sum(axis=0)
    s_off = magnitude[~near, :].sum(axis=0)
    ratio = s_off / np.maximum(s_diag, 1e-300)
    classes = ["incoherent" if r < INCOHERENT_RATIO else "coherent" for r in ratio]
  else:
    classes = ["incoherent" if g == 0 else ("coherent" if g == N else "intermediate") for g in groups]

  if np.any(ambiguous):
    logger.warning("Ambiguous grouping: %d modes have N_b within %.2f of a bin edge", int(np.sum(ambiguous)), GROUP_EDGE_MARGIN)
  return ModeTable(n_b=n_b, s_diag=s_diag, s_off=s_off, trace=trace, groups=groups, classes=classes, ambiguous=ambiguous, N=N)


def _min_distance(a: np.ndarray, b: np.ndarray) -> float:
  if a.size == 0 or b.size == 0:
    return float("inf")
  tree = cKDTree(np.column_stack((b.real, b.imag)))
  distances, _ = tree.query(np.column_stack((a.real, a.imag)))
  return float(np.min(distances))


def _min_real_distance(a: np.ndarray, b: np.ndarray) -> float:
  if a.size == 0 or b.size == 0:
    return float("inf")
  sorted_b = np.sort(b.real)
  positions = np.clip(np.searchsorted(sorted_b, a.real), 1, sorted_b.size) - 1
  left = np.abs(a.real - sorted_b[positions])
  right = np.abs(a.real - sorted_b[np.minimum(positions + 1, sorted_b.size - 1)])
  return float(np.min(np.minimum(left, right)))


def qc_gap(modes: EigenmodeSet, table: ModeTable, gamma: float) -> QcGapReport:
  """
  Quantum-coherence gaps between groups n and n-1

  Delta^(n) = min |lambda_a^(n) - lambda_b^(n-1)| (complex modulus); the
  real-part-only gap is reported alongside. Closed when Delta^(n) is below
  max(1e-3, 5/L) * gamma.
  """
  N, L = table.N, modes.basis.L
  threshold = max(1e-3, 5.0 / L) * gamma
  gaps, gaps_real, closed = [], [], []
  for n in range(1, N + 1):
    upper = modes.eigenvalues[table.groups == n]
    lower = modes.eigenvalues[table.groups == n - 1]
    gap = _min_distance(upper, lower)
    gaps.append(gap)
    gaps_real.append(_min_real_distance(upper, lower))
    closed.append(bool(gap < threshold))
  return QcGapReport(
    N=N,
    gaps=gaps,
    gaps_real=gaps_real,
    bins=group_edges(N).tolist(),
    gap_closed=closed,
    threshold=threshold,
    ambiguous=bool(np.any(table.ambiguous)),
    n_ambiguous=int(np.sum(table.ambiguous)),
  )


def confinement_length(mode: np.ndarray, basis: SectorBasis) -> float:
  """
  Confinement length of a one-particle incoherent mode

  Fits ln(max |rho_lm| at fixed ring distance d) against d over
  2 <= d <= L/2 - 2 and returns -1/slope.

  Returns:
      xi_con; 0 for an exactly diagonal mode, inf when the profile does not decay

  Raises:
      FitDegenerateError: If fewer than 4 distances carry usable weight
  """
  rho = _site_ordered(_as_matrix(mode, basis), basis)
  L = basis.L
  distance = ring_distance(L)
  magnitude = np.abs(rho)
  profile = np.array([magnitude[distance == d].max() for d in range(L // 2 + 1)])
  peak = float(profile.max())
  floor = 1e-13 * peak
  if peak == 0.0:
    raise FitDegenerateError("mode is identically zero")
  if np.all(profile[1:] <= floor):
    return 0.0

  d = np.arange(2, L // 2 - 1)
  y = profile[d] if d.size else np.zeros(0)
  usable = y > floor
  if np.count_nonzero(usable) < 4:
    raise FitDegenerateError(f"only {int(np.count_nonzero(usable))} usable distances for the confinement fit (L={L})")
  slope, _ = np.polyfit(d[usable].astype(np.float64), np.log(y[usable]), 1)
  if slope >= 0:
    return float("inf")
  return float(-1.0 / slope)


def degeneracy_counts(eigenvalues: np.ndarray, tol: float = DEGENERACY_TOL) -> list[tuple[complex, int]]:
  """Clusters of (numerically) equal eigenvalues, ordered by |Re| then Im"""
  labels = eigenvalue_clusters(np.asarray(eigenvalues), tol)
  result = []
  for label in np.unique(labels):
    members = eigenvalues[labels == label]
    result.append((complex(np.mean(members)), int(members.size)))
  result.sort(key=lambda item: (abs(item[0].real), item[0].imag))
  return result


def match_spectra(a: np.ndarray, b: np.ndarray) -> float:
  """
  Largest deviation of the optimal one-to-one matching of two multisets

  Returns:
      max |a_i - b_pi(i)| under the assignment minimizing the total distance
  """
  a, b = np.asarray(a).ravel(), np.asarray(b).ravel()
  if a.shape != b.shape:
    return float("inf")
  cost = np.abs(a[:, None] - b[None, :])
  rows, cols = linear_sum_assignment(cost)
  return float(np.max(cost[rows, cols], initial=0.0))


def verify_spectral_invariants(modes: EigenmodeSet, M: Superoperator, seed: int = 0) -> SpectralInvariantsReport:  # noqa: N803
  """
  Measure the general spectral invariants of a dephasing Liouvillian

  Checks Re lambda <= 0, conjugation closure, traceless non-steady modes,
  biorthogonality of left and right modes, L(rho^dag) = L(rho)^dag and the
  infinite-temperature steady state.
  """
  w = modes.eigenvalues
  D = modes.dim
  scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))

  max_real = float(np.max(w.real, initial=-np.inf))

  tree = cKDTree(np.column_stack((w.real, w.imag)))
  distances, _ = tree.query(np.column_stack((w.real, -w.imag)))
  conjugation = float(np.max(distances, initial=0.0))

  trace = np.abs(modes.right_modes[np.arange(D) * (D + 1), :].sum(axis=0))
  nonzero = np.abs(w) > 1e-8
  max_trace = float(np.max(trace[nonzero], initial=0.0))

  if modes.left_modes is None:
    modes = diagonalize(M, left=True, dense_limit=max(M.matrix.shape[0], 1))
    w = modes.eigenvalues
  if modes.left_modes is None:
    raise SolverFailureError("left eigenvectors unavailable for the biorthogonality check")
  vl = modes.left_modes / np.linalg.norm(modes.left_modes, axis=0)
  overlap = np.abs(vl.conj().T @ modes.right_modes)
  distinct = np.abs(w[:, None] - w[None, :]) > 1e-6
  biorthogonality = float(np.max(overlap[distinct], initial=0.0))

  rng = np.random.default_rng(seed)
  rho = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
  hermiticity = float(np.max(np.abs(M.apply(rho.conj().T) - M.apply(rho).conj().T)))

  steady = modes.steady_indices()
  identity = np.eye(D, dtype=np.complex128).reshape(D * D) / np.sqrt(D)
  if steady.size == 1:
    v = modes.right_modes[:, steady[0]]
    overlap_ss = np.vdot(identity, v)
    steady_violation = float(np.linalg.norm(v - overlap_ss / abs(overlap_ss) * identity)) if abs(overlap_ss) > 0 else 1.0
  else:
    steady_violation = float("inf")

  return SpectralInvariantsReport(
    max_real_part=max_real,
    conjugation_violation=conjugation,
    max_nonzero_trace=max_trace,
    biorthogonality_violation=biorthogonality,
    hermiticity_violation=hermiticity,
    steady_state_violation=steady_violation,
    n_steady=int(steady.size),
    real_parts_ok=max_real <= POSITIVE_REAL_TOL,
    conjugation_ok=conjugation <= CONJUGATION_TOL * scale,
    traceless_ok=max_trace <= 1e-8,
    biorthogonal_ok=biorthogonality <= 1e-8,
    hermiticity_ok=hermiticity <= 1e-12 * max(1.0, modes.frobenius_norm),
    steady_state_ok=steady.size == 1 and steady_violation <= 1e-8,
  )


def classify_modes(modes: EigenmodeSet) -> list[ModeMetrics]:
  """ModeMetrics for every eigenmode, in eigenvalue order"""
  return mode_metrics(modes).to_models()
