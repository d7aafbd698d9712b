"""
Occupation-number bases for fixed-particle-number sectors
Hard-core and soft-core bosons on a periodic ring, plus ladder (ket, bra) indexing
"""

import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.special import comb

from .exceptions import InvalidArgumentsError
from .utils.logging import get_logger

logger = get_logger(__name__)


class FockState(BaseModel):
  """Occupation vector |n_0, ..., n_{L-1}>"""

  occupations: tuple[int, ...]

  model_config = ConfigDict(frozen=True)

  @field_validator("occupations")
  @classmethod
  def validate_occupations(cls, v: tuple[int, ...]) -> tuple[int, ...]:
    if len(v) == 0:
      raise ValueError("a Fock state needs at least one site")
    if any(n < 0 for n in v):
      raise ValueError("occupations must be non-negative")
    return v

  @property
  def L(self) -> int:  # noqa: N802
    return len(self.occupations)

  @property
  def N(self) -> int:  # noqa: N802
    return sum(self.occupations)

  @classmethod
  def of(cls, *occupations: int) -> "FockState":
    """Shorthand: FockState.of(1, 0, 1)"""
    return cls(occupations=tuple(occupations))


@dataclass(frozen=True)
class LadderIndex:
  """Position of a (ket, bra) pair in the vectorized density matrix"""

  ket: int
  bra: int
  dim: int

  def __post_init__(self) -> None:
    if not (0 <= self.ket < self.dim and 0 <= self.bra < self.dim):
      raise InvalidArgumentsError(f"ladder index ({self.ket}, {self.bra}) outside 0..{self.dim - 1}")

  @property
  def flat(self) -> int:
    return self.ket * self.dim + self.bra

  @classmethod
  def from_flat(cls, flat: int, dim: int) -> "LadderIndex":
    if not 0 <= flat < dim * dim:
      raise InvalidArgumentsError(f"flat index {flat} outside 0..{dim * dim - 1}")
    ket, bra = divmod(flat, dim)
    return cls(ket=ket, bra=bra, dim=dim)


def _compositions(L: int, N: int, n_max: int) -> Iterator[tuple[int, ...]]:  # noqa: N803
  """Occupation vectors in descending lexicographic order"""
  if L == 1:
    if N <= n_max:
      yield (N,)
    return
  for first in range(min(n_max, N), -1, -1):
    rest = N - first
    if rest > (L - 1) * n_max:
      continue
    for tail in _compositions(L - 1, rest, n_max):
      yield (first, *tail)


def sector_dimension(L: int, N: int, n_max: int) -> int:  # noqa: N803
  """Number of occupation vectors with sum N and entries <= n_max"""
  if n_max == 1:
    return int(comb(L, N, exact=True))
  # inclusion-exclusion over sites exceeding the cap
  total = 0
  for j in range(0, L + 1):
    rest = N - j * (n_max + 1)
    if rest < 0:
      break
    total += (-1) ** j * int(comb(L, j, exact=True)) * int(comb(rest + L - 1, L - 1, exact=True))
  return total


@dataclass(frozen=True)
class SectorBasis:
  """
  Fixed-particle-number sector of L sites

  States are ordered descending lexicographically on occupation vectors.
  Hard-core states are additionally keyed by L-bit masks (site 0 is the
  most significant bit).
  """

  L: int
  N: int
  n_max: int
  occupations: np.ndarray = field(repr=False)
  _index: dict[Union[int, bytes], int] = field(repr=False, compare=False)

  @property
  def dimension(self) -> int:
    return int(self.occupations.shape[0])

  @property
  def hardcore(self) -> bool:
    return self.n_max == 1

  @property
  def masks(self) -> np.ndarray:
    """Bit masks of hard-core states"""
    weights = 1 << np.arange(self.L - 1, -1, -1, dtype=np.int64)
    return np.asarray(self.occupations.astype(np.int64) @ weights)

  def _key(self, occupations: tuple[int, ...]) -> Union[int, bytes]:
    if self.hardcore:
      mask = 0
      for n in occupations:
        mask = (mask << 1) | n
      return mask
    return bytes(occupations)

  def state_at(self, index: int) -> FockState:
    if not 0 <= index < self.dimension:
      raise InvalidArgumentsError(f"state index {index} outside 0..{self.dimension - 1}")
    return FockState(occupations=tuple(int(n) for n in self.occupations[index]))

  def lookup(self, state: Union[FockState, tuple[int, ...]]) -> int:
    """Index of a state; raises InvalidArgumentsError when it is not in the sector"""
    occupations = state.occupations if isinstance(state, FockState) else tuple(state)
    if len(occupations) != self.L or any(n > self.n_max or n < 0 for n in occupations) or sum(occupations) != self.N:
      raise InvalidArgumentsError(f"state {occupations} is not in sector L={self.L}, N={self.N}, n_max={self.n_max}")
    return self._index[self._key(occupations)]

  def __len__(self) -> int:
    return self.dimension

  def __iter__(self) -> Iterator[FockState]:
    for i in range(self.dimension):
      yield self.state_at(i)


def enumerate_sector(L: int, N: int, n_max: int) -> SectorBasis:  # noqa: N803
  """
  Enumerate every occupation configuration of a sector

  Args:
      L: Number of sites
      N: Particle number
      n_max: Occupancy cap (1 for hard-core bosons)

  Returns:
      SectorBasis in descending lexicographic order

  Raises:
      InvalidArgumentsError: If L < 1, n_max < 1, N < 0 or N > L * n_max
  """
  if L < 1:
    raise InvalidArgumentsError(f"L must be >= 1, got {L}")
  if n_max < 1:
    raise InvalidArgumentsError(f"n_max must be >= 1, got {n_max}")
  if N < 0 or N > L * n_max:
    raise InvalidArgumentsError(f"N={N} outside 0..{L * n_max} for L={L}, n_max={n_max}")
  if n_max > 255:
    raise InvalidArgumentsError("occupancy cap above 255 is not supported")

  states = list(_compositions(L, N, n_max))
  occupations = np.array(states, dtype=np.uint8).reshape(len(states), L)
  basis = SectorBasis(L=L, N=N, n_max=n_max, occupations=occupations, _index={})
  for i, state in enumerate(states):
    basis._index[basis._key(state)] = i

  expected = sector_dimension(L, N, n_max)
  if basis.dimension != expected:
    raise AssertionError(f"enumerated {basis.dimension} states, expected {expected}")
  logger.debug("Enumerated sector L=%d N=%d n_max=%d: D=%d", L, N, n_max, basis.dimension)
  return basis


def sites_adjacent(L: int, a: int, b: int) -> bool:  # noqa: N803
  """Nearest neighbours on a periodic ring"""
  return a != b and ((b - a) % L == 1 or (a - b) % L == 1)


def hop_apply(state: FockState, src: int, dst: int, n_max: int) -> tuple[FockState, float]:
  """
  Apply b_dst^dagger b_src to a Fock state

  Args:
      state: Input configuration
      src: Site losing a particle
      dst: Site gaining a particle
      n_max: Occupancy cap

  Returns:
      Image state and matrix element sqrt(n_src) * sqrt(n_dst + 1); the
      amplitude is 0 (and the state returned unchanged) for forbidden moves

  Raises:
      InvalidArgumentsError: If the sites are not neighbours on the ring
  """
  L = state.L
  if not (0 <= src < L and 0 <= dst < L) or not sites_adjacent(L, src, dst):
    raise InvalidArgumentsError(f"sites {src} and {dst} are not adjacent on a ring of {L}")
  occ = list(state.occupations)
  n_src, n_dst = occ[src], occ[dst]
  if n_src == 0 or n_dst + 1 > n_max:
    return state, 0.0
  occ[src] -= 1
  occ[dst] += 1
  return FockState(occupations=tuple(occ)), math.sqrt(n_src) * math.sqrt(n_dst + 1)


def number_operators(basis: SectorBasis) -> np.ndarray:
  """Diagonals of n_l for every site, shape (L, D)"""
  return np.ascontiguousarray(basis.occupations.T.astype(np.float64))


def annihilation_stack(source: SectorBasis, target: SectorBasis) -> np.ndarray:
  """
  Matrices of b_l mapping sector N to sector N-1

  Args:
      source: Sector with N particles
      target: Sector with N-1 particles on the same lattice

  Returns:
      Array of shape (L, D_target, D_source)
  """
  if source.L != target.L or target.N != source.N - 1 or source.n_max < target.n_max:
    raise InvalidArgumentsError("annihilation needs sectors N and N-1 on the same lattice")
  stack = np.zeros((source.L, target.dimension, source.dimension), dtype=np.complex128)
  for j, occ in enumerate(source.occupations):
    for site in np.nonzero(occ)[0]:
      image = occ.astype(np.int64)
      image[site] -= 1
      i = target._index[target._key(tuple(int(n) for n in image))]
      stack[site, i, j] = math.sqrt(int(occ[site]))
  return stack


def lower_sector(basis: SectorBasis, by: int = 1) -> SectorBasis:
  """Sector with `by` fewer particles on the same lattice and cap"""
  return enumerate_sector(basis.L, basis.N - by, basis.n_max)
