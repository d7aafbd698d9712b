"""
Tests for k-Lambda strings and the Hubbard ladder
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from incoherenton_lab.analytic import lambda_inc
from incoherenton_lab.bethe import (
  bethe_residual,
  build_hubbard_ladder,
  eigenvalue_closed,
  eigenvalue_sum,
  eta_tower_residual,
  hermitian_string_kappa,
  j_crit_m,
  locate_deconfinement,
  no_solution_interval,
  scan_strings,
  solve_string,
  string_p_grid,
  validate_string,
)
from incoherenton_lab.exceptions import InvalidArgumentsError, NoStringSolutionError, SizeLimitError
from incoherenton_lab.models import BetheParams


def test_j_crit_m():
  """Test order-m thresholds m gamma / 4"""
  assert j_crit_m(1, 1.0) == 0.25
  assert j_crit_m(3, 2.0) == 1.5
  with pytest.raises(InvalidArgumentsError):
    j_crit_m(0, 1.0)


def test_bethe_params():
  """Test the imaginary interaction and the flux convention"""
  params = BetheParams(J=0.25, gamma=1.0, L=4, N=1)
  assert params.u == complex(0.0, 1.0)
  assert params.phi == 0.0
  assert BetheParams(J=0.25, gamma=1.0, L=4, N=2).phi == math.pi


def test_single_string_at_quarter_momentum():
  """Test the m=1 string at p=-pi/2: kappa = ln 2, mu = 0, lambda = lambda_inc(pi)"""
  s = solve_string(1, -math.pi / 2, 0.2, 1.0)
  assert s.confined
  assert s.kappa == pytest.approx(math.log(2.0), abs=1e-12)
  assert s.mu == pytest.approx(0.0, abs=1e-15)
  assert s.K == pytest.approx(-math.pi)
  assert s.q == pytest.approx(math.pi / 2)
  assert len(s.quasimomenta) == 2
  assert len(s.rapidities) == 1
  assert s.lam == pytest.approx(lambda_inc(math.pi, 0.2, 1.0), abs=1e-12)


@pytest.mark.parametrize(("m", "p", "J"), [(2, -math.pi / 3, 0.3), (3, -2.0, 0.5), (2, -0.4, 0.9)])
def test_string_eigenvalue_forms_agree(m, p, J):
  """Test the quasimomentum sum equals the closed form"""
  s = solve_string(m, p, J, 1.0)
  validate_string(s)
  assert len(s.quasimomenta) == 2 * m
  assert len(s.rapidities) == m
  assert eigenvalue_sum(s) == pytest.approx(eigenvalue_closed(m, s.K, J, 1.0), abs=1e-10)
  assert abs(sum(s.quasimomenta).imag) < 1e-12


def test_deconfined_string():
  """Test no string exists once cosh(kappa) would drop to 1"""
  with pytest.raises(NoStringSolutionError):
    solve_string(1, -math.pi / 2, 0.3, 1.0)
  with pytest.raises(NoStringSolutionError):
    solve_string(1, -math.pi / 2, 0.25, 1.0)
  trial = solve_string(1, -math.pi / 2, 0.3, 1.0, allow_deconfined=True)
  assert not trial.confined
  assert trial.kappa == 0.0


def test_solve_string_invalid_arguments():
  """Test order, hopping and momentum bounds"""
  with pytest.raises(InvalidArgumentsError):
    solve_string(0, -1.0, 0.2, 1.0)
  with pytest.raises(InvalidArgumentsError):
    solve_string(1, -1.0, 0.0, 1.0)
  with pytest.raises(InvalidArgumentsError):
    solve_string(1, 0.5, 0.2, 1.0)


def test_hermitian_string_kappa():
  """Test the Hermitian string exists for every p with cos p != 0"""
  assert hermitian_string_kappa(1, -math.pi / 3, 0.5) == pytest.approx(math.asinh(-1.0))
  with pytest.raises(InvalidArgumentsError):
    hermitian_string_kappa(1, -math.pi / 2, 0.5)


def test_bethe_residual_decays_with_length():
  """Test residuals shrink like e^{-kappa L}"""
  s = solve_string(1, -math.pi / 2, 0.2, 1.0)
  r16, r32 = bethe_residual(s, 16), bethe_residual(s, 32)
  assert r32 < r16
  assert r32 / r16 == pytest.approx(2.0**-16, rel=1e-6)
  with pytest.raises(InvalidArgumentsError):
    bethe_residual(s, 1)


def test_bethe_residual_deconfined_stays_finite():
  """Test a deconfined trial string keeps an O(1) residual at every length"""
  s = solve_string(1, -math.pi / 2, 0.3, 1.0, allow_deconfined=True)
  assert not s.confined
  residuals = [bethe_residual(s, L) for L in (16, 32, 64)]
  assert all(r > 0.5 for r in residuals)


def test_bethe_residual_second_order_string():
  """Test an order-2 string decays with L and the flux phase leaves it unchanged"""
  s = solve_string(2, -math.pi / 2, 0.2, 1.0)
  r16, r32 = bethe_residual(s, 16), bethe_residual(s, 32)
  assert r32 < r16
  assert r32 < 1e-15
  assert bethe_residual(s, 32, phi=0.0) == pytest.approx(r32)


def test_bethe_residual_sees_interior_momenta():
  """Test that moving an interior quasimomentum breaks the equations at any length"""
  s = solve_string(2, -math.pi / 2, 0.2, 1.0)
  k = list(s.quasimomenta)
  k[1] += 0.1
  broken = replace(s, quasimomenta=tuple(k))
  assert bethe_residual(broken, 32) > 1e-2
  assert bethe_residual(broken, 64) > 1e-2


def test_string_p_grid():
  """Test the open interior grid of (-pi, 0)"""
  assert np.allclose(string_p_grid(4), [-3 * math.pi / 4, -math.pi / 2, -math.pi / 4])


def test_scan_strings_no_solution_interval():
  """Test strings vanish around p = -pi/2 above threshold"""
  rows = scan_strings(1, 0.3, 1.0, n_p=8, residual_L=[16])
  assert len(rows) == 7
  interval = no_solution_interval(rows)
  assert interval == pytest.approx((-5 * math.pi / 8, -3 * math.pi / 8))
  present = [row for row in rows if row.exists]
  assert all(16 in row.residuals for row in present)
  assert all(row.residuals == {} for row in rows if not row.exists)


def test_scan_strings_below_threshold():
  """Test every grid point carries a string below m gamma / 4"""
  assert no_solution_interval(scan_strings(1, 0.2, 1.0, n_p=16)) is None


def test_locate_deconfinement():
  """Test the first J with a missing string is found"""
  assert locate_deconfinement(1, 1.0, [0.3, 0.2, 0.24, 0.26]) == 0.26
  assert locate_deconfinement(1, 1.0, [0.1, 0.2]) is None


@pytest.fixture
def ladder_one_pair():
  return build_hubbard_ladder(BetheParams(J=0.3, gamma=1.0, L=4, N=1))


def test_ladder_dimensions(ladder_one_pair):
  """Test the 4^L Fock space and its sector labels"""
  assert ladder_one_pair.dim == 256
  assert ladder_one_pair.sector_indices(1, 1).size == 16
  assert ladder_one_pair.sector_indices(2, 2).size == 36
  assert ladder_one_pair.phi == 0.0


def test_ladder_symmetry_generators_commute(ladder_one_pair):
  """Test eta and spin generators commute with H"""
  norms = ladder_one_pair.commutator_norms()
  assert set(norms) == {"eta_plus", "eta_minus", "eta_z", "s_plus", "s_minus", "s_z"}
  assert max(norms.values()) < 1e-10


def test_eta_pair_state_is_steady(ladder_one_pair):
  """Test H (eta^+)^n |vac> = 0"""
  assert ladder_one_pair.steady_state_residual(1) < 1e-12
  assert ladder_one_pair.steady_state_residual(2) < 1e-12
  assert np.linalg.norm(ladder_one_pair.pair_state(1)) > 0


def test_eta_tower_residual(ladder_one_pair):
  """Test eta^+ maps (1, 1) eigenstates to (2, 2) eigenstates with the same eigenvalue"""
  eigenvalue, residual = eta_tower_residual(ladder_one_pair, -1.0 + 0j)
  assert residual < 1e-10
  assert np.min(np.abs(ladder_one_pair.sector_spectrum(1, 1) - eigenvalue)) < 1e-10


def test_ladder_size_limits():
  """Test ladders beyond L=6 or the dense cap are refused"""
  with pytest.raises(SizeLimitError):
    build_hubbard_ladder(BetheParams(J=0.3, gamma=1.0, L=7, N=1))
  with pytest.raises(SizeLimitError):
    build_hubbard_ladder(BetheParams(J=0.3, gamma=1.0, L=4, N=1), dense_limit=100)
