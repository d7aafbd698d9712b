"""
Tests for typed data models
"""

import math

import pytest
from pydantic import ValidationError

from incoherenton_lab.models import BetheParams, CheckResult, InitialState, Manifest, ModelParams, QcGapReport, RunConfig, SweepSpec, ToyDosParams


def test_model_params_from_dict():
  """Test ModelParams creation from a flat dict with aliases and unset keys"""
  params = ModelParams.from_dict({"model": "bh", "L": 5, "N": 2, "J": 0.1, "U": 1.0, "gamma": None, "jobs": 4})
  assert params.model == "bose-hubbard-dephasing"
  assert params.gamma == 1.0
  assert not params.hardcore
  assert params.n_max == 2


def test_model_params_hardcore_rules():
  """Test hard-core constraints on U and N"""
  params = ModelParams(model="hard-core", L=4, N=4)
  assert params.hardcore
  assert params.n_max == 1
  with pytest.raises(ValidationError):
    ModelParams(model="hardcore", L=4, N=2, U=0.5)
  with pytest.raises(ValidationError):
    ModelParams(model="hardcore", L=4, N=5)


def test_model_params_soft_core_allows_overfull():
  """Test that Bose-Hubbard sectors may hold more bosons than sites"""
  params = ModelParams(model="bose-hubbard", L=2, N=3, U=1.0)
  assert params.n_max == 3


def test_model_params_bounds():
  """Test field bounds and immutability"""
  with pytest.raises(ValidationError):
    ModelParams(L=1, N=0)
  with pytest.raises(ValidationError):
    ModelParams(L=4, N=1, gamma=-0.1)
  with pytest.raises(ValidationError):
    ModelParams(model="ising", L=4, N=1)
  params = ModelParams(L=4, N=1)
  with pytest.raises(ValidationError):
    params.L = 6  # type: ignore[misc]


def test_initial_state_defaults():
  """Test the density-modulated default recipe"""
  state = InitialState()
  assert state.kind == "density-modulated"
  assert state.k == pytest.approx(math.pi)
  assert state.delta_n == 0.5
  with pytest.raises(ValidationError):
    InitialState(delta_n=1.5)


def test_bethe_params_derived():
  """Test the dimensionless interaction and flux"""
  params = BetheParams(J=0.25, gamma=1.0, N=2)
  assert params.u == pytest.approx(1j)
  assert params.phi == pytest.approx(math.pi)
  assert BetheParams(J=0.25, gamma=1.0, N=3).phi == 0.0
  with pytest.raises(ValidationError):
    BetheParams(J=0.0, gamma=1.0)


def test_toy_dos_params_from_dict():
  """Test ToyDosParams defaults and bounds"""
  params = ToyDosParams.from_dict({"eta": 2.0})
  assert params.delta0 == 0.1
  assert params.eta == 2.0
  with pytest.raises(ValidationError):
    ToyDosParams(eta=0.0)


def test_qc_gap_report_rejects_negative_gaps():
  """Test that QC gaps are non-negative"""
  report = QcGapReport(N=2, gaps=[0.5, 0.0], gaps_real=[0.5, 0.0], bins=[0.67, 1.33], gap_closed=[False, True], threshold=0.25)
  assert not report.all_closed
  assert report.model_copy(update={"gap_closed": [True, True]}).all_closed
  with pytest.raises(ValidationError):
    QcGapReport(N=1, gaps=[-0.1], gaps_real=[0.0], bins=[0.5], gap_closed=[True], threshold=0.25)


def test_sweep_spec_values():
  """Test inclusive decimal sweeps"""
  sweep = SweepSpec.from_string("J:0.20:0.30:0.01")
  values = sweep.values()
  assert len(values) == 11
  assert values[0] == 0.2
  assert values[-1] == 0.3
  assert values[5] == 0.25


def test_sweep_spec_errors():
  """Test malformed sweeps"""
  with pytest.raises(ValueError):
    SweepSpec.from_string("J:0.1:0.3")
  with pytest.raises(ValidationError):
    SweepSpec(parameter="J", start=0.3, stop=0.1, step=0.1)
  with pytest.raises(ValidationError):
    SweepSpec(parameter="J", start=0.1, stop=0.3, step=0.0)
  with pytest.raises(ValidationError):
    SweepSpec.from_string("alpha:0:1:0.5")


def test_run_config_parsing():
  """Test string forms accepted from config files"""
  config = RunConfig.from_dict({"subcommand": "bethe", "model": "bh", "sweep": "U:0:1:0.5", "residual_L": "16, 32,64"})
  assert config.model == "bose-hubbard-dephasing"
  assert config.sweep is not None and config.sweep.values() == [0.0, 0.5, 1.0]
  assert config.residual_L == [16, 32, 64]
  assert RunConfig.from_dict({"subcommand": "spectrum", "sweep": ""}).sweep is None


def test_run_config_model_params():
  """Test ModelParams built from a run configuration with overrides"""
  config = RunConfig(subcommand="spectrum", L=6, N=2, J=0.1)
  params = config.model_params(J=0.2, L=8.0, k=1.0)
  assert params.J == 0.2
  assert params.L == 8
  assert params.N == 2


def test_manifest_dump_safe():
  """Test that None fields are dropped from the manifest dump"""
  manifest = Manifest(version="0.1.0", subcommand="toydos", config={"eta": 1.0}, config_hash="abc")
  data = manifest.model_dump_safe()
  assert data["tool"] == "incoherenton-lab"
  assert data["files"] == {}


def test_check_result_defaults():
  """Test CheckResult defaults"""
  result = CheckResult(name="toy_dos", passed=True)
  assert result.detail == ""
  assert result.measured is None
  assert result.slow is False
