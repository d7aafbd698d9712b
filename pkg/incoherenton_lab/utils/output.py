"""
Result files for incoherenton-lab runs
Schema-bound CSV, JSON reports and the run manifest
"""

import csv
import hashlib
import json
import math
import platform
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Union

import numpy as np
import scipy
from pydantic import BaseModel

from ..constants import get_csv_schema
from ..exceptions import InvalidArgumentsError
from ..models import Manifest
from .logging import get_logger

logger = get_logger(__name__)

Schema = Union[str, dict[str, str]]


def _columns(schema: Schema) -> dict[str, str]:
  return get_csv_schema(schema) if isinstance(schema, str) else schema


def format_cell(value: Any, kind: str) -> str:
  """Render one CSV cell: floats with 17 significant digits, booleans as true/false"""
  if kind == "bool":
    return "true" if bool(value) else "false"
  if kind == "int":
    return str(int(value))
  if kind == "float":
    number = float(value)
    if math.isnan(number):
      return "nan"
    if math.isinf(number):
      return "inf" if number > 0 else "-inf"
    return f"{number:.17g}"
  return str(value)


def write_csv(path: Union[str, Path], schema: Schema, rows: Sequence[dict[str, Any]]) -> Path:
  """
  Write rows under a named schema

  Raises:
      InvalidArgumentsError: If a row misses a schema column
  """
  columns = _columns(schema)
  path = Path(path)
  path.parent.mkdir(parents=True, exist_ok=True)
  with open(path, "w", newline="", encoding="utf-8") as f:
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(list(columns))
    for i, row in enumerate(rows):
      missing = [name for name in columns if name not in row]
      if missing:
        raise InvalidArgumentsError(f"row {i} of {path.name} misses columns {missing}")
      writer.writerow([format_cell(row[name], kind) for name, kind in columns.items()])
  logger.info("Wrote %d rows to %s", len(rows), path)
  return path


def _valid_cell(text: str, kind: str) -> bool:
  if kind == "bool":
    return text in ("true", "false")
  if kind == "int":
    try:
      int(text)
    except ValueError:
      return False
    return True
  if kind == "float":
    try:
      float(text)
    except ValueError:
      return False
    return True
  return True


def validate_csv(path: Union[str, Path], schema: Schema) -> list[str]:
  """
  Check a CSV file against a named schema

  Returns:
      Problems found; empty when the file is valid
  """
  columns = _columns(schema)
  problems: list[str] = []
  with open(path, newline="", encoding="utf-8") as f:
    reader = csv.reader(f)
    header = next(reader, None)
    if header != list(columns):
      return [f"header {header} does not match {list(columns)}"]
    for line, row in enumerate(reader, start=2):
      if len(row) != len(columns):
        problems.append(f"line {line}: {len(row)} cells, expected {len(columns)}")
        continue
      for text, (name, kind) in zip(row, columns.items()):
        if not _valid_cell(text, kind):
          problems.append(f"line {line}: {name}={text!r} is not {kind}")
  return problems


def _json_default(value: Any) -> Any:
  if isinstance(value, BaseModel):
    return value.model_dump(mode="json")
  if isinstance(value, np.ndarray):
    return value.tolist()
  if isinstance(value, (np.floating, np.integer, np.bool_)):
    return value.item()
  if isinstance(value, complex):
    return {"re": value.real, "im": value.imag}
  return str(value)


def write_json(path: Union[str, Path], payload: Any) -> Path:
  """Write a report, model or row list as indented JSON"""
  path = Path(path)
  path.parent.mkdir(parents=True, exist_ok=True)
  if isinstance(payload, BaseModel):
    payload = payload.model_dump(mode="json")
  path.write_text(json.dumps(payload, indent=2, default=_json_default, sort_keys=False) + "\n", encoding="utf-8")
  logger.info("Wrote %s", path)
  return path


def write_rows(out_dir: Union[str, Path], stem: str, schema: Schema, rows: Sequence[dict[str, Any]], fmt: str = "csv") -> Path:
  """Write a row product as CSV or JSON"""
  out_dir = Path(out_dir)
  if fmt == "json":
    return write_json(out_dir / f"{stem}.json", list(rows))
  return write_csv(out_dir / f"{stem}.csv", schema, rows)


def file_sha256(path: Union[str, Path]) -> str:
  return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def config_hash(config: dict[str, Any]) -> str:
  """SHA-256 of the canonical JSON form of a resolved configuration"""
  canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_json_default)
  return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(out_dir: Union[str, Path], subcommand: str, config: dict[str, Any], files: Sequence[Path], version: str) -> Path:
  """Record resolved parameters, versions and output hashes in manifest.json"""
  out_dir = Path(out_dir)
  manifest = Manifest(
    version=version,
    subcommand=subcommand,
    config=json.loads(json.dumps(config, default=_json_default)),
    config_hash=config_hash(config),
    files={Path(f).name: file_sha256(f) for f in files},
    python_version=platform.python_version(),
    numpy_version=np.__version__,
    scipy_version=scipy.__version__,
  )
  return write_json(out_dir / "manifest.json", manifest.model_dump_safe())
