"""
Tests for result files and run manifests
"""

import json
import math

import numpy as np
import pytest

from incoherenton_lab.exceptions import InvalidArgumentsError
from incoherenton_lab.models import FitResult
from incoherenton_lab.utils.output import config_hash, file_sha256, format_cell, validate_csv, write_csv, write_json, write_manifest, write_rows


def test_format_cell():
  """Test cell rendering per column type"""
  assert format_cell(0.1, "float") == "0.10000000000000001"
  assert format_cell(math.nan, "float") == "nan"
  assert format_cell(-math.inf, "float") == "-inf"
  assert format_cell(np.float64(2.0), "float") == "2"
  assert format_cell(True, "bool") == "true"
  assert format_cell(np.bool_(False), "bool") == "false"
  assert format_cell(3.0, "int") == "3"
  assert format_cell("coherent", "str") == "coherent"


def test_write_and_validate_csv(tmp_path):
  """Test that written rows validate against their schema"""
  rows = [{"t": 0.0, "chi1": 0.11, "gamma1": 0.959, "extra": "ignored"}, {"t": 1.0, "chi1": math.nan, "gamma1": 0.5}]
  path = write_csv(tmp_path / "sub" / "toydos.csv", "toydos", rows)
  lines = path.read_text(encoding="utf-8").splitlines()
  assert lines[0] == "t,chi1,gamma1"
  assert lines[2] == "1,nan,0.5"
  assert validate_csv(path, "toydos") == []


def test_write_csv_missing_column(tmp_path):
  """Test that a row missing a schema column is rejected"""
  with pytest.raises(InvalidArgumentsError, match="gamma1"):
    write_csv(tmp_path / "toydos.csv", "toydos", [{"t": 0.0, "chi1": 1.0}])


def test_validate_csv_problems(tmp_path):
  """Test header, width and type problems"""
  path = tmp_path / "bad.csv"
  path.write_text("t,chi1,gamma1\n0,1\nx,1,2\n", encoding="utf-8")
  problems = validate_csv(path, "toydos")
  assert len(problems) == 2
  assert "2 cells" in problems[0]
  assert "t='x'" in problems[1]

  path.write_text("t,chi1\n", encoding="utf-8")
  assert "header" in validate_csv(path, "toydos")[0]


def test_validate_csv_bool_cells(tmp_path):
  """Test that booleans must be written as true/false"""
  path = tmp_path / "qc.csv"
  path.write_text("param,n,gap,gap_real,closed\n0.1,1,0.5,0.5,True\n", encoding="utf-8")
  assert validate_csv(path, "qc_sweep") == ["line 2: closed='True' is not bool"]


def test_write_json_models_and_arrays(tmp_path):
  """Test JSON encoding of models, arrays and complex numbers"""
  fit = FitResult(k=math.pi, J=0.2, gamma=1.0, fit_kind="decay", rate_or_omega=0.4, r2=0.999, window=(3.0, 10.0))
  path = write_json(tmp_path / "report.json", {"fit": fit, "values": np.arange(3), "lam": complex(-1.0, 0.5), "n": np.int64(2)})
  data = json.loads(path.read_text(encoding="utf-8"))
  assert data["fit"]["fit_kind"] == "decay"
  assert data["fit"]["window"] == [3.0, 10.0]
  assert data["values"] == [0, 1, 2]
  assert data["lam"] == {"re": -1.0, "im": 0.5}
  assert data["n"] == 2


def test_write_rows_formats(tmp_path):
  """Test CSV and JSON row products"""
  rows = [{"t": 0.0, "chi1": 1.0, "gamma1": 0.5}]
  assert write_rows(tmp_path, "toydos", "toydos", rows).name == "toydos.csv"
  json_path = write_rows(tmp_path, "toydos", "toydos", rows, fmt="json")
  assert json.loads(json_path.read_text(encoding="utf-8")) == rows


def test_config_hash_is_order_independent():
  """Test the canonical configuration hash"""
  assert config_hash({"J": 0.2, "L": 8}) == config_hash({"L": 8, "J": 0.2})
  assert config_hash({"J": 0.2}) != config_hash({"J": 0.3})


def test_write_manifest(tmp_path):
  """Test that the manifest records config, versions and file hashes"""
  product = write_rows(tmp_path, "toydos", "toydos", [{"t": 0.0, "chi1": 1.0, "gamma1": 0.5}])
  path = write_manifest(tmp_path, "toydos", {"eta": 1.0}, [product], "0.1.0")
  manifest = json.loads(path.read_text(encoding="utf-8"))
  assert path.name == "manifest.json"
  assert manifest["subcommand"] == "toydos"
  assert manifest["config_hash"] == config_hash({"eta": 1.0})
  assert manifest["files"] == {"toydos.csv": file_sha256(product)}
  assert manifest["numpy_version"] == np.__version__
