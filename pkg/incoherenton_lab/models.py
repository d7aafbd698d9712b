"""
Pydantic models for incoherenton-lab parameters and reports
Validated records shared by the library, the pipelines and the CLI
"""

import math
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .constants import DEFAULT_CHI_TILDE_C, DEFAULT_DELTA_N, DEFAULT_ENSEMBLE, MAX_SWEEP_POINTS, get_model_name

ModelName = Literal["hardcore-dephasing", "bose-hubbard-dephasing"]


class ModelParams(BaseModel):
  """Lattice model: site count, particle number, hopping, dephasing and interaction"""

  model: ModelName = Field(default="hardcore-dephasing")
  L: int = Field(ge=2)
  N: int = Field(ge=0)
  J: float = Field(default=0.0)
  gamma: float = Field(default=1.0, ge=0.0)
  U: float = Field(default=0.0)

  model_config = ConfigDict(frozen=True)

  @field_validator("model", mode="before")
  @classmethod
  def resolve_alias(cls, v: Any) -> Any:
    """Accept CLI aliases such as 'hardcore' and 'bose-hubbard'"""
    if isinstance(v, str):
      return get_model_name(v)
    return v

  @model_validator(mode="after")
  def check_sector(self) -> "ModelParams":
    """Reject interactions on the hard-core model and overfull sectors"""
    if self.model == "hardcore-dephasing":
      if self.U != 0.0:
        raise ValueError("U must be 0 for the hard-core model")
      if self.N > self.L:
        raise ValueError(f"N={self.N} exceeds L={self.L} for hard-core bosons")
    return self

  @property
  def hardcore(self) -> bool:
    return self.model == "hardcore-dephasing"

  @property
  def n_max(self) -> int:
    """Occupancy cap: 1 for hard-core, N for the Bose-Hubbard sector"""
    return 1 if self.hardcore else max(self.N, 1)

  @classmethod
  def from_dict(cls, data: dict[str, Any]) -> "ModelParams":
    """Create ModelParams from a flat configuration dict"""
    return cls.model_validate({key: data[key] for key in ("model", "L", "N", "J", "gamma", "U") if key in data and data[key] is not None})


class InitialState(BaseModel):
  """Initial density matrix recipe"""

  kind: Literal["density-modulated", "random-pure", "custom"] = "density-modulated"
  k: float = Field(default=math.pi)
  delta_n: float = Field(default=DEFAULT_DELTA_N)
  seed: int = Field(default=0, ge=0)

  @field_validator("delta_n")
  @classmethod
  def validate_delta_n(cls, v: float) -> float:
    """Diagonal entries stay non-negative only for |delta_n| <= 1"""
    if abs(v) > 1.0:
      raise ValueError(f"|delta_n| must be <= 1, got {v}")
    return v


class ToyDosParams(BaseModel):
  """Two-band density of states for the coherence decay toy model"""

  a0: float = Field(default=0.1, ge=0.0)
  a1: float = Field(default=1.0, ge=0.0)
  delta0: float = Field(default=0.1, ge=0.0)
  delta1: float = Field(default=0.1, ge=0.0)
  gamma: float = Field(default=1.0, ge=0.0)
  eta: float = Field(default=1.0, gt=0.0)

  @classmethod
  def from_dict(cls, data: dict[str, Any]) -> "ToyDosParams":
    return cls.model_validate(data)


class BetheParams(BaseModel):
  """Hubbard-ladder parameters for the exact-solution layer"""

  J: float = Field(gt=0.0)
  gamma: float = Field(ge=0.0)
  L: int = Field(default=4, ge=2)
  N: int = Field(default=1, ge=0)

  model_config = ConfigDict(frozen=True)

  @property
  def u(self) -> complex:
    """Pure-imaginary dimensionless interaction i*gamma/(4J)"""
    return complex(0.0, self.gamma / (4.0 * self.J))

  @property
  def phi(self) -> float:
    """Flux: 0 for odd N, pi for even N"""
    return 0.0 if self.N % 2 == 1 else math.pi


class ModeMetrics(BaseModel):
  """Per-eigenmode classification metrics"""

  n_b: float
  s_diag: Optional[float] = None
  s_off: Optional[float] = None
  trace_abs: float = 0.0
  mode_class: Literal["incoherent", "intermediate", "coherent"] = "intermediate"
  group: int = 0


class QcGapReport(BaseModel):
  """Quantum-coherence gaps between neighbouring unbound-pair groups"""

  N: int
  gaps: list[float]
  gaps_real: list[float]
  bins: list[float]
  gap_closed: list[bool]
  threshold: float
  ambiguous: bool = False
  n_ambiguous: int = 0

  @field_validator("gaps", "gaps_real")
  @classmethod
  def validate_non_negative(cls, v: list[float]) -> list[float]:
    if any(g < 0 for g in v):
      raise ValueError("QC gaps must be non-negative")
    return v

  @property
  def all_closed(self) -> bool:
    return bool(self.gap_closed) and all(self.gap_closed)


class SpectralInvariantsReport(BaseModel):
  """Measured violations of the general Liouvillian spectral invariants"""

  max_real_part: float
  conjugation_violation: float
  max_nonzero_trace: float
  biorthogonality_violation: Optional[float] = None
  hermiticity_violation: float
  steady_state_violation: float
  n_steady: int

  real_parts_ok: bool
  conjugation_ok: bool
  traceless_ok: bool
  biorthogonal_ok: bool
  hermiticity_ok: bool
  steady_state_ok: bool

  @property
  def passed(self) -> bool:
    return all((self.real_parts_ok, self.conjugation_ok, self.traceless_ok, self.biorthogonal_ok, self.hermiticity_ok, self.steady_state_ok))


class FitResult(BaseModel):
  """Relaxation fit of a density-modulation amplitude"""

  k: float
  J: float
  gamma: float
  fit_kind: Literal["decay", "oscillation", "power-law"]
  rate_or_omega: float
  r2: float
  window: tuple[float, float]
  phase: Optional[float] = None
  amplitude: Optional[float] = None


class SweepSpec(BaseModel):
  """Inclusive linear sweep of one model parameter"""

  parameter: Literal["J", "gamma", "U", "L", "N", "k"] = "J"
  start: float
  stop: float
  step: float = Field(gt=0.0)

  @model_validator(mode="after")
  def check_order(self) -> "SweepSpec":
    if not (math.isfinite(self.start) and math.isfinite(self.stop) and math.isfinite(self.step)):
      raise ValueError("sweep bounds and step must be finite")
    if self.stop < self.start:
      raise ValueError("sweep stop must not be below start")
    if (self.stop - self.start) / self.step >= MAX_SWEEP_POINTS:
      raise ValueError(f"sweep has more than {MAX_SWEEP_POINTS} points")
    return self

  def values(self) -> list[float]:
    """Sweep points, rounded so that decimal steps land on decimal values"""
    count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
    return [round(self.start + i * self.step, 12) for i in range(count)]

  @classmethod
  def from_string(cls, text: str) -> "SweepSpec":
    """Parse 'J:0.20:0.30:0.01'"""
    parts = text.split(":")
    if len(parts) != 4:
      raise ValueError(f"Sweep must look like 'param:start:stop:step', got {text!r}")
    return cls(parameter=parts[0], start=float(parts[1]), stop=float(parts[2]), step=float(parts[3]))  # type: ignore[arg-type]


class RunConfig(BaseModel):
  """Fully resolved configuration of one CLI run"""

  subcommand: str
  model: ModelName = "hardcore-dephasing"
  L: int = Field(default=20, ge=2)
  N: int = Field(default=1, ge=0)
  J: float = 0.15
  gamma: float = Field(default=1.0, ge=0.0)
  U: float = 0.0
  sweep: Optional[SweepSpec] = None
  # dynamics
  initial: Literal["density-modulated", "random-pure"] = "density-modulated"
  method: Literal["integrate", "expansion"] = "integrate"
  k: float = math.pi
  delta_n: float = DEFAULT_DELTA_N
  tmax: Optional[float] = Field(default=None, gt=0.0)
  dt: Optional[float] = Field(default=None, gt=0.0)
  seed: int = Field(default=0, ge=0)
  ensemble: int = Field(default=DEFAULT_ENSEMBLE, ge=1)
  chi_c: float = DEFAULT_CHI_TILDE_C
  # bethe
  m: int = Field(default=1, ge=1)
  scan_p: int = Field(default=200, ge=2)
  residual_L: list[int] = Field(default_factory=lambda: [16, 32])
  # toydos
  eta: float = Field(default=1.0, gt=0.0)
  delta: float = Field(default=0.1, ge=0.0)
  a0: float = Field(default=0.1, ge=0.0)
  a1: float = Field(default=1.0, ge=0.0)
  # output
  out: str = "incoh-out"
  format: Literal["csv", "json"] = "csv"
  jobs: int = Field(default=1, ge=1)

  @field_validator("model", mode="before")
  @classmethod
  def resolve_alias(cls, v: Any) -> Any:
    if isinstance(v, str):
      return get_model_name(v)
    return v

  @field_validator("sweep", mode="before")
  @classmethod
  def parse_sweep(cls, v: Any) -> Any:
    """Allow sweeps written as strings in config files"""
    if isinstance(v, str):
      return SweepSpec.from_string(v) if v else None
    return v

  @field_validator("residual_L", mode="before")
  @classmethod
  def parse_int_list(cls, v: Any) -> Any:
    if isinstance(v, str):
      return [int(item) for item in v.split(",") if item.strip()]
    return v

  def model_params(self, **overrides: Union[int, float]) -> ModelParams:
    """Build the ModelParams of this run, optionally overriding swept fields"""
    data: dict[str, Any] = {"model": self.model, "L": self.L, "N": self.N, "J": self.J, "gamma": self.gamma, "U": self.U}
    data.update({key: value for key, value in overrides.items() if key in data})
    for key in ("L", "N"):
      data[key] = int(round(data[key]))
    return ModelParams.model_validate(data)

  @classmethod
  def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
    return cls.model_validate(data)


class Manifest(BaseModel):
  """Record of one run: resolved parameters, tool version and output hashes"""

  tool: str = "incoherenton-lab"
  version: str
  subcommand: str
  config: dict[str, Any]
  config_hash: str
  files: dict[str, str] = Field(default_factory=dict)
  python_version: str = ""
  numpy_version: str = ""
  scipy_version: str = ""

  def model_dump_safe(self) -> dict[str, Any]:
    """JSON-compatible dump with None fields removed"""
    return self.model_dump(mode="json", exclude_none=True)


class CheckResult(BaseModel):
  """Outcome of one acceptance check"""

  name: str
  passed: bool
  detail: str = ""
  measured: Optional[float] = None
  slow: bool = False
