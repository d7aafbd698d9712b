"""
Exception classes for incoherenton-lab
Every error carries the process exit code the CLI reports for it
"""

from typing import Optional


class IncoherentonError(Exception):
  """Base exception for all incoherenton-lab errors"""

  exit_code: int = 3


class ConfigError(IncoherentonError):
  """Raised when a configuration file or option cannot be resolved"""

  exit_code = 2


class InvalidArgumentsError(IncoherentonError):
  """Raised when arguments fall outside an operation's preconditions"""

  exit_code = 2


class DimensionMismatchError(IncoherentonError):
  """Raised when operator, basis or density-matrix shapes disagree"""

  pass


class SizeLimitError(IncoherentonError):
  """Raised when a dense object would exceed the configured size limit"""

  def __init__(self, message: str, size: int, limit: int):
    """
    Initialize size limit error

    Args:
        message: Error message
        size: Requested size
        limit: Configured limit
    """
    super().__init__(message)
    self.size = size
    self.limit = limit


class SolverFailureError(IncoherentonError):
  """Raised when a numerical backend fails to converge"""

  def __init__(self, message: str, residual: Optional[float] = None):
    """
    Initialize solver failure

    Args:
        message: Error message
        residual: Residual at the point of failure, when known
    """
    super().__init__(message)
    self.residual = residual


class FitError(IncoherentonError):
  """Raised when a fit cannot be performed on the given series"""

  pass


class FitDegenerateError(FitError):
  """Raised when too few usable samples remain for a fit"""

  pass


class StepSizeError(IncoherentonError):
  """Raised when an integrator step exceeds the stability bound"""

  exit_code = 2


class IllConditionedBasisError(IncoherentonError):
  """Raised when the right-eigenmode basis is numerically singular"""

  def __init__(self, message: str, condition: float):
    super().__init__(message)
    self.condition = condition


class NoStringSolutionError(IncoherentonError):
  """Raised when no confined k-Lambda string exists (deconfinement)"""

  pass


class StringValidationError(IncoherentonError):
  """Raised when a string fails its pattern or eigenvalue consistency checks"""

  pass


class QuadratureError(IncoherentonError):
  """Raised when adaptive quadrature does not converge"""

  pass


class CheckFailedError(IncoherentonError):
  """Raised when an acceptance check fails"""

  exit_code = 4
