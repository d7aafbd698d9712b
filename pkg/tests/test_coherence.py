"""
Tests for reduced density matrices, coherence measures and the toy model
"""

import math

import numpy as np
import pytest

from incoherenton_lab.analytic import lambda_inc
from incoherenton_lab.basis import enumerate_sector
from incoherenton_lab.coherence import (
  CoherenceOperators,
  average_series,
  chi_measures,
  coherence_series,
  estimate_crossovers,
  gamma_s,
  incoherent_band_edge,
  plateau_window,
  reduced_g1,
  reduced_g2,
  series_from_chi,
  toy_dos_chi,
  toy_dos_gamma,
  toy_dos_series,
)
from incoherenton_lab.dynamics import evolve_integrate, make_initial
from incoherenton_lab.exceptions import InvalidArgumentsError
from incoherenton_lab.liouvillian import DensityMatrix, build_generator
from incoherenton_lab.models import InitialState, ToyDosParams


def test_g1_of_uniform_one_particle_state():
  """Test G1[a, b] = psi_a psi_b^* and the chi amplitudes it gives"""
  basis = enumerate_sector(4, 1, 1)
  psi = np.full(4, 0.5, dtype=complex)
  rho = np.outer(psi, psi.conj())
  assert np.allclose(reduced_g1(rho, basis), 0.25)
  chi1, chi2, chi1_tilde = chi_measures(rho, basis)
  assert chi1 == pytest.approx(3.0)
  assert chi2 == 0.0
  assert chi1_tilde == pytest.approx(2 * math.exp(-1) + math.exp(-2))


def test_infinite_temperature_has_no_coherence():
  """Test chi1 and chi2 vanish for I/D"""
  basis = enumerate_sector(4, 2, 1)
  chi1, chi2, chi1_tilde = chi_measures(DensityMatrix.steady(basis), basis)
  assert chi1 == pytest.approx(0.0, abs=1e-15)
  assert chi2 == pytest.approx(0.0, abs=1e-15)
  assert chi1_tilde == pytest.approx(0.0, abs=1e-15)


def test_reduced_matrices_traces():
  """Test Tr G1 = N and Tr G2 = N (N - 1) for a random state"""
  basis = enumerate_sector(4, 2, 2)
  rho = make_initial(InitialState(kind="random-pure", seed=11), basis)
  g1 = reduced_g1(rho, basis)
  g2 = reduced_g2(rho, basis)
  assert np.trace(g1) == pytest.approx(2.0)
  assert np.allclose(g1, g1.conj().T)
  assert g2.shape == (16, 16)
  assert np.trace(g2) == pytest.approx(2.0)


def test_chi_tilde_weighting():
  """Test larger c suppresses long-range coherence"""
  basis = enumerate_sector(6, 1, 1)
  psi = np.full(6, 1 / math.sqrt(6), dtype=complex)
  rho = np.outer(psi, psi.conj())
  near = CoherenceOperators(basis, c=0.5).chi(rho)[2]
  far = CoherenceOperators(basis, c=3.0).chi(rho)[2]
  assert near > far > 0


def test_gamma_s_of_exponential():
  """Test Gamma_s is the logarithmic derivative"""
  t = np.linspace(0.0, 5.0, 51)
  assert np.allclose(gamma_s(t, np.exp(-0.5 * t)), 0.5)


def test_gamma_s_errors():
  """Test non-positive chi and mismatched grids"""
  t = np.linspace(0.0, 1.0, 5)
  with pytest.raises(InvalidArgumentsError):
    gamma_s(t, np.zeros(5))
  with pytest.raises(InvalidArgumentsError):
    gamma_s(t, np.ones(4))


def test_series_from_chi_marks_vanishing_chi():
  """Test Gamma_2 is NaN when chi_2 is identically zero"""
  t = np.linspace(0.0, 1.0, 5)
  series = series_from_chi(t, np.exp(-t), np.zeros(5), np.exp(-t))
  assert np.allclose(series.gamma1, 1.0)
  assert np.all(np.isnan(series.gamma2))


def test_average_series_differentiates_the_mean():
  """Test ensemble averaging happens on chi before the log-derivative"""
  t = np.linspace(0.0, 2.0, 21)
  fast = series_from_chi(t, np.exp(-3 * t), np.exp(-3 * t), np.exp(-3 * t))
  slow = series_from_chi(t, np.exp(-t), np.exp(-t), np.exp(-t))
  mean = average_series([fast, slow])
  expected = gamma_s(t, 0.5 * (np.exp(-3 * t) + np.exp(-t)))
  assert np.allclose(mean.gamma1, expected)
  assert not np.allclose(mean.gamma1, 0.5 * (fast.gamma1 + slow.gamma1))
  with pytest.raises(InvalidArgumentsError):
    average_series([])


def test_coherence_series_along_trajectory(two_particle_params):
  """Test chi_s decays from a random pure state"""
  M = build_generator(two_particle_params)
  rho0 = make_initial(InitialState(kind="random-pure", seed=6), M.basis)
  trajectory = evolve_integrate(rho0, M, np.linspace(0.0, 4.0, 9))
  series = coherence_series(trajectory)
  assert series.chi1.shape == (9,)
  assert series.chi1[0] > 0
  assert series.chi1[-1] < series.chi1[0]
  assert np.all(np.isfinite(series.gamma1))


def test_toy_dos_initial_values():
  """Test chi_1(0) and Gamma_1(0) of the two-band density of states"""
  params = ToyDosParams(a0=0.1, a1=1.0, delta0=0.1, delta1=0.1, gamma=1.0, eta=1.0)
  assert toy_dos_chi(params, 0.0) == pytest.approx(0.11)
  assert toy_dos_gamma(params, 0.0) == pytest.approx(0.1055 / 0.11)


def test_toy_dos_long_time_limit():
  """Test Gamma_1 t -> eta at late times"""
  params = ToyDosParams(delta0=0.1, eta=1.0)
  assert toy_dos_gamma(params, 1e4) * 1e4 == pytest.approx(1.0, rel=1e-3)
  assert toy_dos_gamma(params.model_copy(update={"eta": 2.0}), 1e4) * 1e4 == pytest.approx(2.0, rel=1e-3)


def test_toy_dos_fractional_exponent():
  """Test the quadrature path for non-integer eta"""
  params = ToyDosParams(a0=1.0, a1=0.0, delta0=0.25, eta=0.5)
  assert toy_dos_chi(params, 0.0) == pytest.approx(2.0 * math.sqrt(0.25))
  assert toy_dos_gamma(params, 0.0) == pytest.approx((0.25**1.5 / 1.5) / (2.0 * 0.5))


def test_toy_dos_rejects_negative_time():
  """Test t < 0 is invalid"""
  with pytest.raises(InvalidArgumentsError):
    toy_dos_chi(ToyDosParams(), -1.0)
  with pytest.raises(InvalidArgumentsError):
    toy_dos_gamma(ToyDosParams(), -1.0)


def test_toy_dos_series_shapes():
  """Test series evaluation over a time grid"""
  chi, rates = toy_dos_series(ToyDosParams(), np.array([0.0, 1.0, 10.0]))
  assert chi.shape == rates.shape == (3,)
  assert np.all(np.diff(chi) < 0)


def test_plateau_window():
  """Test the longest window near a level spanning a factor 2 in time"""
  times = np.array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0])
  rates = np.array([1.0, 1.05, 0.97, 0.5, 0.52, 0.5])
  assert plateau_window(times, rates, 1.0, rel_tol=0.1) == (1.0, 4.0)
  assert plateau_window(times, rates, 0.5, rel_tol=0.1) == (8.0, 32.0)
  assert plateau_window(times, rates, 2.0) is None


def test_estimate_crossovers():
  """Test tau1 = ln(L gamma / J) / gamma and tau2 = 1 / |Re lambda*|"""
  tau1, tau2 = estimate_crossovers(0.1, 1.0, 8, complex(-0.05, 0.0))
  assert tau1 == pytest.approx(math.log(80.0))
  assert tau2 == pytest.approx(20.0)
  with pytest.raises(InvalidArgumentsError):
    estimate_crossovers(0.0, 1.0, 8, -0.05)


def test_incoherent_band_edge(one_particle_lab):
  """Test the band edge of the one-particle incoherent branch is lambda_inc(pi)"""
  edge = incoherent_band_edge(one_particle_lab.modes, one_particle_lab.table)
  assert edge == pytest.approx(lambda_inc(math.pi, 0.1, 1.0), abs=1e-4)
