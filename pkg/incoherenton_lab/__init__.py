"""
incoherenton-lab - Liouvillian laboratory for dephasing lattice bosons
Spectra, incoherenton classification, dynamics, coherence decay and exact string solutions
"""

from .basis import FockState, SectorBasis, enumerate_sector
from .exceptions import (
  CheckFailedError,
  ConfigError,
  DimensionMismatchError,
  FitDegenerateError,
  FitError,
  IllConditionedBasisError,
  IncoherentonError,
  InvalidArgumentsError,
  NoStringSolutionError,
  QuadratureError,
  SizeLimitError,
  SolverFailureError,
  StepSizeError,
  StringValidationError,
)
from .lab import IncoherentonLab
from .liouvillian import DensityMatrix, MatrixFreeLiouvillian, Superoperator, build_generator
from .models import (
  BetheParams,
  CheckResult,
  FitResult,
  InitialState,
  Manifest,
  ModeMetrics,
  ModelParams,
  QcGapReport,
  RunConfig,
  SpectralInvariantsReport,
  SweepSpec,
  ToyDosParams,
)
from .pipelines import BethePipeline, DynamicsPipeline, SingleParticlePipeline, SpectrumPipeline, ToyDosPipeline
from .spectrum import EigenmodeSet, ModeTable, diagonalize

__version__ = "0.1.0"

__all__ = [
  # Main facade
  "IncoherentonLab",
  # Pipelines
  "SpectrumPipeline",
  "SingleParticlePipeline",
  "DynamicsPipeline",
  "BethePipeline",
  "ToyDosPipeline",
  # Core objects
  "FockState",
  "SectorBasis",
  "enumerate_sector",
  "DensityMatrix",
  "Superoperator",
  "MatrixFreeLiouvillian",
  "build_generator",
  "EigenmodeSet",
  "ModeTable",
  "diagonalize",
  # Exceptions
  "IncoherentonError",
  "ConfigError",
  "InvalidArgumentsError",
  "DimensionMismatchError",
  "SizeLimitError",
  "SolverFailureError",
  "FitError",
  "FitDegenerateError",
  "StepSizeError",
  "IllConditionedBasisError",
  "NoStringSolutionError",
  "StringValidationError",
  "QuadratureError",
  "CheckFailedError",
  # Models
  "ModelParams",
  "InitialState",
  "ToyDosParams",
  "BetheParams",
  "ModeMetrics",
  "QcGapReport",
  "SpectralInvariantsReport",
  "FitResult",
  "SweepSpec",
  "RunConfig",
  "Manifest",
  "CheckResult",
]
