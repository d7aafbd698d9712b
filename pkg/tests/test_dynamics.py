"""
Tests for initial states, time evolution and relaxation fits
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from incoherenton_lab.basis import enumerate_sector
from incoherenton_lab.dynamics import (
  classify_fit_kind,
  convergence_gate,
  decay_window,
  default_dt,
  evolve_expansion,
  evolve_integrate,
  expand,
  expansion_trajectory,
  fit_critical,
  fit_decay,
  fit_oscillation,
  fit_power_law,
  fit_relaxation,
  locate_relaxation_transition,
  make_initial,
  n_of_k,
  output_grid,
  site_densities,
  stability_limit,
)
from incoherenton_lab.exceptions import FitError, InvalidArgumentsError, StepSizeError
from incoherenton_lab.liouvillian import build_generator
from incoherenton_lab.models import FitResult, InitialState, ModelParams
from incoherenton_lab.spectrum import diagonalize


@pytest.fixture
def decay_series():
  t = np.linspace(0.0, 40.0, 801)
  return t, 0.5 * np.exp(-0.4 * t)


def test_stability_limit_and_default_dt():
  """Test the RK4 step cap 0.1 / max(gamma, 4J, |U|, 1)"""
  params = ModelParams(model="hardcore", L=4, N=1, J=0.5, gamma=1.0)
  assert stability_limit(params) == pytest.approx(0.05)
  assert default_dt(params) == pytest.approx(0.005)
  assert stability_limit(ModelParams(model="bose-hubbard", L=3, N=2, U=5.0)) == pytest.approx(0.02)


def test_density_modulated_initial_state():
  """Test diagonal weights 1 + delta_n cos(k l) for one particle"""
  basis = enumerate_sector(6, 1, 1)
  rho = make_initial(InitialState(k=math.pi, delta_n=0.5), basis)
  expected = (1.0 + 0.5 * np.cos(math.pi * np.arange(6))) / 6.0
  assert np.allclose(np.diagonal(rho.matrix).real, expected)
  assert rho.trace == pytest.approx(1.0)
  assert n_of_k(rho, basis, math.pi) == pytest.approx(0.5)


def test_density_modulated_needs_particles():
  """Test the empty sector has no density modulation"""
  with pytest.raises(InvalidArgumentsError):
    make_initial(InitialState(), enumerate_sector(4, 0, 1))


def test_random_pure_initial_state():
  """Test random pure states are normalized, pure and reproducible"""
  basis = enumerate_sector(5, 2, 1)
  rho = make_initial(InitialState(kind="random-pure", seed=7), basis)
  again = make_initial(InitialState(kind="random-pure", seed=7), basis)
  other = make_initial(InitialState(kind="random-pure", seed=8), basis)
  assert rho.purity() == pytest.approx(1.0)
  assert np.array_equal(rho.matrix, again.matrix)
  assert not np.allclose(rho.matrix, other.matrix)


def test_custom_initial_state_validation():
  """Test custom matrices must be present, sized and physical"""
  basis = enumerate_sector(3, 1, 1)
  custom = InitialState(kind="custom")
  with pytest.raises(InvalidArgumentsError):
    make_initial(custom, basis)
  with pytest.raises(InvalidArgumentsError):
    make_initial(custom, basis, np.eye(2) / 2)
  with pytest.raises(InvalidArgumentsError):
    make_initial(custom, basis, np.diag([1.5, -0.5, 0.0]))
  assert make_initial(custom, basis, np.eye(3) / 3).purity() == pytest.approx(1 / 3)


def test_delta_n_bounded():
  """Test |delta_n| > 1 is rejected"""
  with pytest.raises(ValidationError):
    InitialState(delta_n=1.5)


def test_integration_preserves_trace_and_hermiticity(two_particle_params):
  """Test RK4 keeps rho a unit-trace Hermitian positive matrix"""
  M = build_generator(two_particle_params)
  rho0 = make_initial(InitialState(kind="random-pure", seed=1), M.basis)
  trajectory = evolve_integrate(rho0, M, np.linspace(0.0, 2.0, 5))
  assert len(trajectory) == 5
  assert np.max(trajectory.trace_errors()) < 1e-10
  assert np.max(trajectory.hermiticity_errors()) < 1e-10
  assert np.min(trajectory.min_eigenvalues()) > -1e-8


def test_integration_and_expansion_agree(two_particle_params):
  """Test both evolution methods give the same states"""
  M = build_generator(two_particle_params)
  modes = diagonalize(M)
  rho0 = make_initial(InitialState(kind="random-pure", seed=2), M.basis)
  times = np.linspace(0.0, 3.0, 7)
  integrated = evolve_integrate(rho0, M, times)
  expanded = expansion_trajectory(rho0, modes, times)
  assert expanded.method == "expansion"
  assert np.max(np.abs(integrated.states - expanded.states)) < 1e-6
  single = evolve_expansion(rho0, modes, 3.0)
  assert np.allclose(single.matrix, expanded.states[-1])


def test_expansion_reconstructs_initial_state(two_particle_params):
  """Test the eigenmode coefficients reproduce rho(0)"""
  M = build_generator(two_particle_params)
  rho0 = make_initial(InitialState(kind="random-pure", seed=3), M.basis)
  expansion = expand(rho0, diagonalize(M))
  assert np.allclose(expansion.reconstruct(), rho0.matrix)
  assert expansion.condition >= 1.0
  assert sum(expansion.group_weights(np.zeros(36, dtype=int)).values()) > 0


def test_steady_state_is_reached(one_particle_params):
  """Test long-time relaxation towards I/D"""
  M = build_generator(one_particle_params)
  rho0 = make_initial(InitialState(k=math.pi), M.basis)
  state = evolve_expansion(rho0, diagonalize(M), 400.0)
  assert np.allclose(state.matrix, np.eye(8) / 8, atol=1e-8)


def test_step_size_limit(two_particle_params):
  """Test dt above the stability limit raises StepSizeError"""
  M = build_generator(two_particle_params)
  rho0 = make_initial(InitialState(kind="random-pure"), M.basis)
  with pytest.raises(StepSizeError):
    evolve_integrate(rho0, M, np.array([0.0, 1.0]), dt=1.0)
  with pytest.raises(InvalidArgumentsError):
    evolve_integrate(rho0, M, np.array([1.0, 0.0]))


def test_convergence_gate(two_particle_params):
  """Test halving the RK4 step changes the result negligibly"""
  M = build_generator(two_particle_params)
  rho0 = make_initial(InitialState(kind="random-pure", seed=4), M.basis)
  assert convergence_gate(rho0, M, np.array([0.0, 1.0]), dt=0.002) < 1e-9


def test_site_densities_sum_to_n(two_particle_params):
  """Test <n_l> summed over sites equals N"""
  M = build_generator(two_particle_params)
  rho0 = make_initial(InitialState(kind="random-pure", seed=5), M.basis)
  trajectory = evolve_integrate(rho0, M, np.array([0.0, 0.5]))
  densities = site_densities(trajectory.states, M.basis)
  assert densities.shape == (2, 4)
  assert np.allclose(densities.sum(axis=1), 2.0)
  assert np.allclose(n_of_k(trajectory.states, M.basis, 0.0), 2.0)


def test_decay_window():
  """Test the default decay window [1/gamma, 5/gamma]"""
  assert decay_window(1.0) == (1.0, 5.0)
  assert decay_window(2.0) == (0.5, 2.5)


def test_fit_decay(decay_series):
  """Test exponential rate extraction"""
  t, y = decay_series
  rate, r2 = fit_decay(t, y, (3.0, 10.0))
  assert rate == pytest.approx(0.4)
  assert r2 == pytest.approx(1.0)


def test_fit_decay_errors(decay_series):
  """Test negative samples and empty windows"""
  t, y = decay_series
  with pytest.raises(FitError):
    fit_decay(t, -y, (3.0, 10.0))
  with pytest.raises(FitError):
    fit_decay(t, y, (50.0, 60.0))


def test_fit_oscillation():
  """Test sine fitting seeded from the Fourier peak"""
  t = np.linspace(0.0, 40.0, 801)
  z = 0.3 * np.sin(0.663 * t + 0.2)
  omega, phase, amplitude, r2, window = fit_oscillation(t, z, start=1.0)
  assert omega == pytest.approx(0.663, rel=1e-6)
  assert phase == pytest.approx(0.2, abs=1e-6)
  assert amplitude == pytest.approx(0.3, rel=1e-6)
  assert r2 == pytest.approx(1.0)
  assert window[0] == 1.0


def test_fit_oscillation_too_short():
  """Test a series shorter than two periods is rejected"""
  t = np.linspace(0.0, 5.0, 101)
  with pytest.raises(FitError):
    fit_oscillation(t, np.sin(0.663 * t), start=1.0)


def test_fit_power_law():
  """Test log-log fitting of a t^b"""
  t = np.linspace(0.0, 10.0, 201)
  a, b, r2 = fit_power_law(t, 2.0 * t**1.5, (1.0, 4.0))
  assert a == pytest.approx(2.0)
  assert b == pytest.approx(1.5)
  assert r2 == pytest.approx(1.0)


def test_classify_fit_kind(decay_series):
  """Test sign changes of e^{gamma t} y mark oscillations"""
  t, y = decay_series
  assert classify_fit_kind(t, y, 1.0) == "decay"
  assert classify_fit_kind(t, np.exp(-t) * np.sin(0.663 * t), 1.0) == "oscillation"


def test_fit_relaxation(decay_series):
  """Test classification and fitting together"""
  t, y = decay_series
  result = fit_relaxation(t, y, math.pi, 0.2, 1.0)
  assert result.fit_kind == "decay"
  assert result.rate_or_omega == pytest.approx(0.4)
  assert result.window == (1.0, 5.0)

  oscillating = fit_relaxation(t, 0.5 * np.exp(-t) * np.sin(0.663 * t + 1.0), math.pi, 0.3, 1.0)
  assert oscillating.fit_kind == "oscillation"
  assert oscillating.rate_or_omega == pytest.approx(0.663, rel=1e-6)


def test_fit_critical():
  """Test the early-window power law at the transition"""
  t = np.linspace(0.0, 40.0, 801)
  result = fit_critical(t, 0.25 * t * np.exp(-t), math.pi, 0.25, 1.0)
  assert result.fit_kind == "power-law"
  assert result.rate_or_omega == pytest.approx(1.0)
  assert result.window == (1.0, 4.0)


def test_locate_relaxation_transition():
  """Test the first oscillating J is reported"""

  def result(J, kind):
    return FitResult(k=math.pi, J=J, gamma=1.0, fit_kind=kind, rate_or_omega=0.1, r2=1.0, window=(0.0, 1.0))

  results = [result(0.27, "oscillation"), result(0.24, "decay"), result(0.26, "oscillation"), result(0.25, "decay")]
  assert locate_relaxation_transition(results) == 0.26
  assert locate_relaxation_transition(results[1:2]) is None


def test_output_grid():
  """Test the default grid up to 40/gamma in steps of 0.05/gamma"""
  grid = output_grid(1.0)
  assert grid.size == 801
  assert grid[-1] == pytest.approx(40.0)
  assert output_grid(1.0, tmax=2.0, dt_out=0.5).tolist() == [0.0, 0.5, 1.0, 1.5, 2.0]
