"""
Hamiltonians, dephasing jump operators and the vectorized Liouvillian
The density matrix is vectorized ket-major: flat = ket * D + bra
"""

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .basis import SectorBasis, enumerate_sector, hop_apply
from .config import get_dense_limit
from .constants import HERMITIAN_TOL, LSOP_MAGIC, LSOP_ORDERING_KET_MAJOR, LSOP_VERSION, PSD_TOL
from .exceptions import DimensionMismatchError, InvalidArgumentsError, SizeLimitError
from .models import ModelParams
from .utils.logging import get_logger

logger = get_logger(__name__)

_LSOP_HEADER = struct.Struct("<4sIQI")


@dataclass(frozen=True)
class OperatorMatrix:
  """D x D operator on a sector basis"""

  matrix: np.ndarray
  basis: SectorBasis

  @property
  def dim(self) -> int:
    return int(self.matrix.shape[0])

  def hermiticity_error(self) -> float:
    return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

  def is_diagonal(self) -> bool:
    return bool(np.count_nonzero(self.matrix - np.diag(np.diagonal(self.matrix))) == 0)


@dataclass(frozen=True)
class Superoperator:
  """D^2 x D^2 ladder-space generator acting on ket-major vectorized density matrices"""

  matrix: np.ndarray
  basis: SectorBasis
  params: Optional[ModelParams] = None

  @property
  def dim(self) -> int:
    """Hilbert-space dimension D"""
    return self.basis.dimension

  def apply(self, rho: np.ndarray) -> np.ndarray:
    D = self.dim
    return np.asarray(self.matrix @ rho.reshape(D * D)).reshape(D, D)

  def trace_violation(self) -> float:
    """Largest |sum_i M[(i,i), c]| over columns c"""
    D = self.dim
    diagonal_rows = np.arange(D) * (D + 1)
    return float(np.max(np.abs(self.matrix[diagonal_rows, :].sum(axis=0)), initial=0.0))


@dataclass(frozen=True)
class DensityMatrix:
  """Density matrix on a sector basis"""

  matrix: np.ndarray
  basis: SectorBasis

  @property
  def dim(self) -> int:
    return int(self.matrix.shape[0])

  @property
  def trace(self) -> complex:
    return complex(np.trace(self.matrix))

  def hermiticity_error(self) -> float:
    return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

  def min_eigenvalue(self) -> float:
    hermitian = 0.5 * (self.matrix + self.matrix.conj().T)
    return float(np.linalg.eigvalsh(hermitian)[0])

  def purity(self) -> float:
    return float(np.real(np.vdot(self.matrix.conj().T, self.matrix)))

  def vec(self) -> np.ndarray:
    return self.matrix.reshape(self.dim * self.dim)

  def validate(self, check_psd: bool = False) -> None:
    """
    Check Hermiticity, unit trace and optionally positivity

    Raises:
        InvalidArgumentsError: On any violation
    """
    if self.hermiticity_error() > HERMITIAN_TOL:
      raise InvalidArgumentsError(f"density matrix not Hermitian (error {self.hermiticity_error():.3g})")
    if abs(self.trace - 1.0) > HERMITIAN_TOL:
      raise InvalidArgumentsError(f"density matrix trace {self.trace} != 1")
    if check_psd and self.min_eigenvalue() < -PSD_TOL:
      raise InvalidArgumentsError(f"density matrix has negative eigenvalue {self.min_eigenvalue():.3g}")

  @classmethod
  def from_vec(cls, vec: np.ndarray, basis: SectorBasis) -> "DensityMatrix":
    D = basis.dimension
    return cls(matrix=np.asarray(vec).reshape(D, D), basis=basis)

  @classmethod
  def steady(cls, basis: SectorBasis) -> "DensityMatrix":
    """Infinite-temperature state I/D"""
    D = basis.dimension
    return cls(matrix=np.eye(D, dtype=np.complex128) / D, basis=basis)


def _check_basis(params: ModelParams, basis: SectorBasis) -> None:
  if basis.L != params.L or basis.N != params.N or basis.n_max != params.n_max:
    raise DimensionMismatchError(f"basis (L={basis.L}, N={basis.N}, n_max={basis.n_max}) does not match params (L={params.L}, N={params.N}, n_max={params.n_max})")


def sector_for(params: ModelParams) -> SectorBasis:
  """Sector basis matching a set of model parameters"""
  return enumerate_sector(params.L, params.N, params.n_max)


def build_hamiltonian(params: ModelParams, basis: SectorBasis) -> OperatorMatrix:
  """
  Hopping on a periodic ring plus on-site interaction for soft-core bosons

  H = -J sum_l (b_l^dag b_{l+1} + h.c.) + (U/2) sum_l n_l (n_l - 1)

  Every bond (l, l+1 mod L) contributes, so for L = 2 the pair is coupled twice.

  Args:
      params: Model parameters
      basis: Matching sector basis

  Returns:
      Hermitian OperatorMatrix
  """
  _check_basis(params, basis)
  D, L = basis.dimension, basis.L
  H = np.zeros((D, D), dtype=np.complex128)
  if params.J != 0.0:
    for i, state in enumerate(basis):
      for site in range(L):
        neighbour = (site + 1) % L
        for src, dst in ((neighbour, site), (site, neighbour)):
          image, amplitude = hop_apply(state, src, dst, basis.n_max)
          if amplitude != 0.0:
            H[basis.lookup(image), i] += -params.J * amplitude
  if not params.hardcore and params.U != 0.0:
    occ = basis.occupations.astype(np.float64)
    H[np.diag_indices(D)] += 0.5 * params.U * np.sum(occ * (occ - 1.0), axis=1)
  return OperatorMatrix(matrix=H, basis=basis)


def build_lindblads(params: ModelParams, basis: SectorBasis) -> list[OperatorMatrix]:
  """On-site dephasing L_l = sqrt(gamma) n_l, one diagonal operator per site"""
  _check_basis(params, basis)
  if params.gamma < 0:
    raise InvalidArgumentsError("gamma must be non-negative")
  root = np.sqrt(params.gamma)
  occ = basis.occupations.astype(np.float64)
  return [OperatorMatrix(matrix=np.diag(root * occ[:, site]).astype(np.complex128), basis=basis) for site in range(basis.L)]


def effective_hamiltonian(H: OperatorMatrix, lindblads: list[OperatorMatrix]) -> np.ndarray:  # noqa: N803
  """H_eff = H - (i/2) sum_nu L_nu^dag L_nu"""
  heff = H.matrix.astype(np.complex128, copy=True)
  for op in lindblads:
    if op.dim != H.dim:
      raise DimensionMismatchError(f"Lindblad of dimension {op.dim} does not match H of dimension {H.dim}")
    heff -= 0.5j * (op.matrix.conj().T @ op.matrix)
  return heff


def build_superoperator(H: OperatorMatrix, lindblads: list[OperatorMatrix], params: Optional[ModelParams] = None, dense_limit: Optional[int] = None) -> Superoperator:  # noqa: N803
  """
  Assemble the dense ladder generator

  M = -i (H_eff (x) I - I (x) H_eff^*) + sum_nu L_nu (x) L_nu^*

  Args:
      H: Hamiltonian
      lindblads: Jump operators
      params: Parameters recorded on the result
      dense_limit: Cap on D^2 (defaults to INCOH_DENSE_LIMIT)

  Returns:
      Superoperator

  Raises:
      DimensionMismatchError: If operator dimensions disagree
      SizeLimitError: If D^2 exceeds the dense limit
  """
  D = H.dim
  limit = dense_limit if dense_limit is not None else get_dense_limit()
  if D * D > limit:
    raise SizeLimitError(f"D^2 = {D * D} exceeds the dense limit {limit}; use the matrix-free path", size=D * D, limit=limit)

  heff = effective_hamiltonian(H, lindblads)
  M4 = np.zeros((D, D, D, D), dtype=np.complex128)
  for b in range(D):
    M4[:, b, :, b] -= 1j * heff
  for a in range(D):
    M4[a, :, a, :] += 1j * heff.conj()
  M = M4.reshape(D * D, D * D)

  diagonal = [op for op in lindblads if op.is_diagonal()]
  if diagonal:
    d = np.array([np.diagonal(op.matrix) for op in diagonal])
    kernel = np.einsum("ni,nj->ij", d, d.conj())
    M[np.diag_indices(D * D)] += kernel.reshape(D * D)
  for op in lindblads:
    if not op.is_diagonal():
      M4 += np.einsum("ac,bd->abcd", op.matrix, op.matrix.conj())

  logger.debug("Assembled superoperator D=%d (D^2=%d)", D, D * D)
  return Superoperator(matrix=M, basis=H.basis, params=params)


class MatrixFreeLiouvillian:
  """
  Liouvillian applied directly to D x D matrices

  L(rho) = -i (H_eff rho - rho H_eff^dag) + sum_nu L_nu rho L_nu^dag

  Diagonal jump operators collapse into an elementwise kernel.
  """

  def __init__(self, H: OperatorMatrix, lindblads: list[OperatorMatrix], params: Optional[ModelParams] = None):  # noqa: N803
    self.basis = H.basis
    self.params = params
    self._heff = effective_hamiltonian(H, lindblads)
    self._heff_dag = self._heff.conj().T
    diagonal = [op for op in lindblads if op.is_diagonal()]
    self._general = [op.matrix for op in lindblads if not op.is_diagonal()]
    if diagonal:
      d = np.array([np.diagonal(op.matrix) for op in diagonal])
      self._kernel: Optional[np.ndarray] = np.einsum("ni,nj->ij", d, d.conj())
    else:
      self._kernel = None

  @property
  def dim(self) -> int:
    return self.basis.dimension

  def apply(self, rho: np.ndarray) -> np.ndarray:
    out = -1j * (self._heff @ rho - rho @ self._heff_dag)
    if self._kernel is not None:
      out += self._kernel * rho
    for op in self._general:
      out += op @ rho @ op.conj().T
    return np.asarray(out)

  @classmethod
  def from_params(cls, params: ModelParams, basis: Optional[SectorBasis] = None) -> "MatrixFreeLiouvillian":
    basis = basis or sector_for(params)
    return cls(build_hamiltonian(params, basis), build_lindblads(params, basis), params)


Generator = Union[Superoperator, MatrixFreeLiouvillian]


def apply_liouvillian(generator: Generator, rho: Union[DensityMatrix, np.ndarray]) -> np.ndarray:
  """
  Evaluate L(rho) with either the dense or the matrix-free generator

  Raises:
      DimensionMismatchError: If rho does not match the generator
  """
  matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
  D = generator.dim
  if matrix.shape != (D, D):
    raise DimensionMismatchError(f"rho of shape {matrix.shape} does not match generator dimension {D}")
  return generator.apply(matrix.astype(np.complex128, copy=False))


def build_generator(params: ModelParams, dense: bool = True, dense_limit: Optional[int] = None) -> Generator:
  """Basis, operators and generator for a parameter set in one call"""
  basis = sector_for(params)
  H = build_hamiltonian(params, basis)
  lindblads = build_lindblads(params, basis)
  if dense:
    return build_superoperator(H, lindblads, params=params, dense_limit=dense_limit)
  return MatrixFreeLiouvillian(H, lindblads, params)


def total_number_operator(basis: SectorBasis) -> np.ndarray:
  return np.diag(basis.occupations.sum(axis=1).astype(np.complex128))


def dump_superoperator(M: Superoperator, path: Union[str, Path]) -> None:  # noqa: N803
  """
  Write the binary LSOP file

  Header: magic "LSOP", u32 version, u64 D, u32 ordering tag; then the matrix
  row-major as little-endian complex128.
  """
  with open(path, "wb") as f:
    f.write(_LSOP_HEADER.pack(LSOP_MAGIC, LSOP_VERSION, M.dim, LSOP_ORDERING_KET_MAJOR))
    f.write(np.ascontiguousarray(M.matrix, dtype="<c16").tobytes())


def load_superoperator(path: Union[str, Path], basis: SectorBasis, params: Optional[ModelParams] = None) -> Superoperator:
  """Read a binary LSOP file written by dump_superoperator"""
  data = Path(path).read_bytes()
  if len(data) < _LSOP_HEADER.size:
    raise InvalidArgumentsError("truncated LSOP file")
  magic, version, D, ordering = _LSOP_HEADER.unpack_from(data)
  if magic != LSOP_MAGIC or version != LSOP_VERSION or ordering != LSOP_ORDERING_KET_MAJOR:
    raise InvalidArgumentsError(f"unsupported LSOP header (magic={magic!r}, version={version}, ordering={ordering})")
  if D != basis.dimension:
    raise DimensionMismatchError(f"LSOP file has D={D}, basis has D={basis.dimension}")
  body = np.frombuffer(data, dtype="<c16", offset=_LSOP_HEADER.size)
  if body.size != D**4:
    raise InvalidArgumentsError(f"LSOP body holds {body.size} entries, expected {D**4}")
  return Superoperator(matrix=body.astype(np.complex128).reshape(D * D, D * D), basis=basis, params=params)
