"""
Tests for Fock bases and ladder indexing
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from incoherenton_lab.basis import (
  FockState,
  LadderIndex,
  annihilation_stack,
  enumerate_sector,
  hop_apply,
  lower_sector,
  number_operators,
  sector_dimension,
  sites_adjacent,
)
from incoherenton_lab.exceptions import InvalidArgumentsError


def test_enumerate_sector_descending_order():
  """Test hard-core sector states come out in descending lexicographic order"""
  basis = enumerate_sector(4, 2, 1)
  states = [s.occupations for s in basis]
  assert basis.dimension == 6
  assert states == [(1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1), (0, 0, 1, 1)]
  assert basis.hardcore


def test_enumerate_sector_soft_core_dimension():
  """Test Bose-Hubbard sector dimension for two particles"""
  basis = enumerate_sector(5, 2, 2)
  assert basis.dimension == 15
  assert not basis.hardcore
  assert basis.state_at(0).occupations == (2, 0, 0, 0, 0)


def test_lookup_inverts_state_at():
  """Test lookup returns the index of every enumerated state"""
  basis = enumerate_sector(6, 3, 1)
  for i in range(basis.dimension):
    assert basis.lookup(basis.state_at(i)) == i
    assert basis.lookup(basis.state_at(i).occupations) == i


def test_enumerate_sector_invalid_arguments():
  """Test enumerate_sector rejects impossible sectors"""
  with pytest.raises(InvalidArgumentsError):
    enumerate_sector(0, 0, 1)
  with pytest.raises(InvalidArgumentsError):
    enumerate_sector(4, 1, 0)
  with pytest.raises(InvalidArgumentsError):
    enumerate_sector(4, 5, 1)
  with pytest.raises(InvalidArgumentsError):
    enumerate_sector(4, -1, 1)


def test_empty_sector_has_one_state():
  """Test the vacuum sector"""
  basis = enumerate_sector(3, 0, 1)
  assert basis.dimension == 1
  assert basis.state_at(0).N == 0


def test_fock_state_validation():
  """Test FockState rejects negative and empty occupations"""
  with pytest.raises(ValidationError):
    FockState.of(1, -1)
  with pytest.raises(ValidationError):
    FockState(occupations=())
  state = FockState.of(1, 0, 2)
  assert state.L == 3
  assert state.N == 3


def test_ladder_index_flat_round_trip():
  """Test ket-major flattening of (ket, bra) pairs"""
  index = LadderIndex(ket=2, bra=1, dim=4)
  assert index.flat == 9
  assert LadderIndex.from_flat(9, 4) == index


def test_ladder_index_out_of_range():
  """Test LadderIndex bounds checks"""
  with pytest.raises(InvalidArgumentsError):
    LadderIndex(ket=4, bra=0, dim=4)
  with pytest.raises(InvalidArgumentsError):
    LadderIndex.from_flat(16, 4)


def test_sites_adjacent_on_ring():
  """Test periodic adjacency, including the wrap-around bond"""
  assert sites_adjacent(4, 0, 1)
  assert sites_adjacent(4, 3, 0)
  assert not sites_adjacent(4, 0, 2)
  assert not sites_adjacent(4, 1, 1)


def test_hop_apply_hard_core():
  """Test hopping into an empty site and blocking on an occupied one"""
  image, amplitude = hop_apply(FockState.of(1, 0, 1), 0, 1, 1)
  assert image.occupations == (0, 1, 1)
  assert amplitude == 1.0

  blocked, amplitude = hop_apply(FockState.of(1, 0, 1), 0, 2, 1)
  assert blocked.occupations == (1, 0, 1)
  assert amplitude == 0.0


def test_hop_apply_soft_core_amplitude():
  """Test bosonic enhancement sqrt(n_src) sqrt(n_dst + 1)"""
  image, amplitude = hop_apply(FockState.of(2, 1, 0), 0, 1, 3)
  assert image.occupations == (1, 2, 0)
  assert amplitude == pytest.approx(2.0)


def test_hop_apply_empty_source():
  """Test hopping out of an empty site gives zero amplitude"""
  _, amplitude = hop_apply(FockState.of(0, 1, 0), 0, 1, 2)
  assert amplitude == 0.0


def test_hop_apply_rejects_distant_sites():
  """Test hop_apply raises for non-neighbouring sites"""
  with pytest.raises(InvalidArgumentsError):
    hop_apply(FockState.of(1, 0, 0, 0), 0, 2, 1)


def test_number_operators_shape():
  """Test site occupation diagonals sum to N"""
  basis = enumerate_sector(5, 2, 1)
  numbers = number_operators(basis)
  assert numbers.shape == (5, basis.dimension)
  assert np.allclose(numbers.sum(axis=0), 2.0)


def test_annihilation_stack_number_identity():
  """Test sum_l b_l^dag b_l equals N on the source sector"""
  source = enumerate_sector(4, 2, 2)
  target = lower_sector(source)
  b = annihilation_stack(source, target)
  assert b.shape == (4, target.dimension, source.dimension)
  total = np.einsum("lij,lik->jk", b.conj(), b)
  assert np.allclose(total, 2.0 * np.eye(source.dimension))


def test_annihilation_stack_requires_adjacent_sectors():
  """Test mismatched sectors are rejected"""
  with pytest.raises(InvalidArgumentsError):
    annihilation_stack(enumerate_sector(4, 2, 1), enumerate_sector(4, 2, 1))


@given(st.integers(min_value=2, max_value=9), st.data())
def test_hard_core_dimension_is_binomial(L, data):
  """Test hard-core sector dimension is C(L, N)"""
  N = data.draw(st.integers(min_value=0, max_value=L))
  assert sector_dimension(L, N, 1) == math.comb(L, N)
  assert enumerate_sector(L, N, 1).dimension == math.comb(L, N)


@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=4))
def test_soft_core_dimension_is_stars_and_bars(L, N):
  """Test an uncapped sector has C(N + L - 1, N) states"""
  assert sector_dimension(L, N, max(N, 1)) == math.comb(N + L - 1, N)
