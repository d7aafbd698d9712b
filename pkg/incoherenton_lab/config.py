"""
Configuration management for incoherenton-lab
Flat key = value TOML files with CLI override precedence
"""

import os
from pathlib import Path
from typing import TYPE_CHECKING, Any, Optional, Union

from platformdirs import user_config_dir

from .constants import DEFAULT_DENSE_LIMIT, DENSE_LIMIT_ENV
from .exceptions import ConfigError

if TYPE_CHECKING:
  import tomli
  import tomli_w
else:
  try:
    import tomli as _tomli
    import tomli_w as _tomli_w

    tomli = _tomli  # type: ignore[assignment]
    tomli_w = _tomli_w  # type: ignore[assignment]
  except ImportError:
    tomli = None  # type: ignore[assignment]
    tomli_w = None  # type: ignore[assignment]

# Use platformdirs for cross-platform config directory (XDG compliant)
CONFIG_DIR = Path(user_config_dir("incoherenton-lab", "incoherenton-lab"))
CONFIG_PATH = CONFIG_DIR / "config.toml"
CONFIG_TABLE = "incoherenton"

ConfigValue = Union[str, int, float, bool, list[Any]]


def _flatten(data: dict[str, Any]) -> dict[str, ConfigValue]:
  """Accept both a bare flat file and one wrapped in the [incoherenton] table"""
  table = data.get(CONFIG_TABLE)
  if isinstance(table, dict):
    data = {**{k: v for k, v in data.items() if k != CONFIG_TABLE}, **table}
  flat: dict[str, ConfigValue] = {}
  for key, value in data.items():
    if isinstance(value, dict):
      raise ConfigError(f"Config key {key!r} must be a flat value, got a table")
    flat[key.replace("-", "_")] = value
  return flat


def read_config_file(path: Union[str, Path]) -> dict[str, ConfigValue]:
  """
  Read a run configuration file

  Args:
      path: Path of a flat TOML file

  Returns:
      Flat configuration dictionary

  Raises:
      ConfigError: If the file is missing or malformed
  """
  path = Path(path)
  if not path.exists():
    raise ConfigError(f"Config file not found: {path}")
  if tomli is None:
    raise ConfigError("tomli is required for reading config files. Install with: pip install tomli")
  try:
    with open(path, "rb") as f:
      return _flatten(tomli.load(f))
  except tomli.TOMLDecodeError as e:
    raise ConfigError(f"Malformed config file {path}: {e}") from e


def load_config() -> dict[str, ConfigValue]:
  """
  Load user defaults from the platform config directory

  Returns:
      Flat configuration dictionary (empty when no file exists)
  """
  if not CONFIG_PATH.exists() or tomli is None:
    return {}
  try:
    return read_config_file(CONFIG_PATH)
  except ConfigError:
    return {}


def save_config(values: dict[str, ConfigValue], path: Optional[Path] = None) -> Path:
  """
  Merge values into the user config file

  Args:
      values: Flat key/value pairs to store
      path: Override target (defaults to the platform config path)

  Returns:
      Path written
  """
  if tomli_w is None:
    raise ImportError("tomli-w is required for saving config. Install with: pip install tomli-w")

  target = path or CONFIG_PATH
  target.parent.mkdir(parents=True, exist_ok=True)
  current = read_config_file(target) if target.exists() else {}
  current.update(values)

  try:
    with open(target, "wb") as f:
      tomli_w.dump({CONFIG_TABLE: current}, f)
  except OSError as e:
    raise ConfigError(f"Failed to save config: {e}") from e
  return target


def parse_assignment(text: str) -> tuple[str, ConfigValue]:
  """Parse a 'key=value' assignment, typing the value like TOML would"""
  if "=" not in text:
    raise ConfigError(f"Expected key=value, got {text!r}")
  key, raw = (part.strip() for part in text.split("=", 1))
  if tomli is None:
    return key, raw
  try:
    value = tomli.loads(f"v = {raw}")["v"]
  except tomli.TOMLDecodeError:
    value = raw
  return key.replace("-", "_"), value


def resolve_run_config(cli_values: dict[str, Any], config_file: Optional[Union[str, Path]] = None) -> dict[str, Any]:
  """
  Merge configuration layers

  Precedence: user config < --config file < explicit CLI flags.

  Args:
      cli_values: Options given on the command line (None means unset)
      config_file: Optional run config file

  Returns:
      Merged flat dictionary
  """
  merged: dict[str, Any] = dict(load_config())
  if config_file is not None:
    merged.update(read_config_file(config_file))
  merged.update({key: value for key, value in cli_values.items() if value is not None})
  return merged


def get_dense_limit() -> int:
  """Dense diagonalization cap on D^2 from INCOH_DENSE_LIMIT or the default"""
  raw = os.environ.get(DENSE_LIMIT_ENV)
  if raw is None or raw.strip() == "":
    return DEFAULT_DENSE_LIMIT
  try:
    limit = int(raw)
  except ValueError:
    raise ConfigError(f"{DENSE_LIMIT_ENV} must be an integer, got {raw!r}") from None
  if limit <= 0:
    raise ConfigError(f"{DENSE_LIMIT_ENV} must be positive, got {limit}")
  return limit
