"""
Pytest configuration and shared fixtures
"""

import numpy as np
import pytest

from incoherenton_lab import IncoherentonLab
from incoherenton_lab.models import ModelParams


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
  """Point the user config file at an empty temporary location"""
  monkeypatch.setattr("incoherenton_lab.config.CONFIG_PATH", tmp_path / "user-config" / "config.toml")
  monkeypatch.delenv("INCOH_DENSE_LIMIT", raising=False)


@pytest.fixture
def two_particle_params():
  """Hard-core ring L=4, N=2 at J=0.3"""
  return ModelParams(model="hardcore", L=4, N=2, J=0.3, gamma=1.0)


@pytest.fixture
def one_particle_params():
  """Hard-core ring L=8, N=1 at J=0.1"""
  return ModelParams(model="hardcore", L=8, N=1, J=0.1, gamma=1.0)


@pytest.fixture
def two_particle_lab(two_particle_params):
  with IncoherentonLab(two_particle_params) as lab:
    yield lab


@pytest.fixture
def one_particle_lab(one_particle_params):
  with IncoherentonLab(one_particle_params) as lab:
    yield lab


@pytest.fixture
def rng():
  return np.random.default_rng(1234)
