"""
Library facade for incoherenton-lab
Owns the sector basis, generators and eigenmodes of one parameter set
"""

from typing import Any, Literal, Optional, Union, cast

from .basis import SectorBasis
from .config import get_dense_limit
from .liouvillian import MatrixFreeLiouvillian, Superoperator, build_generator, sector_for
from .models import ModelParams
from .spectrum import EigenmodeSet, ModeTable, diagonalize, mode_metrics
from .utils.logging import get_logger

logger = get_logger(__name__)


class IncoherentonLab:
  """
  Laboratory for one dephasing lattice model

  Builds its objects lazily and caches them, so pipelines that share a
  parameter set diagonalize once. Sweeps create one lab per point.
  """

  def __init__(
    self,
    params: Union[ModelParams, dict[str, Any]],
    dense_limit: Optional[int] = None,
    jobs: int = 1,
  ):
    """
    Initialize the laboratory

    Args:
        params: Model parameters (or a flat dict accepted by ModelParams)
        dense_limit: Cap on D^2 for dense objects (default: INCOH_DENSE_LIMIT or 20000)
        jobs: Worker count for sweeps and ensembles (default: 1)
    """
    self.params = params if isinstance(params, ModelParams) else ModelParams.from_dict(params)
    self.dense_limit = dense_limit if dense_limit is not None else get_dense_limit()
    self.jobs = max(1, jobs)

    self._basis: Optional[SectorBasis] = None
    self._superoperator: Optional[Superoperator] = None
    self._matrix_free: Optional[MatrixFreeLiouvillian] = None
    self._modes: Optional[EigenmodeSet] = None
    self._table: Optional[ModeTable] = None

    # Initialize pipeline namespaces
    from .pipelines.bethe import BethePipeline
    from .pipelines.dynamics import DynamicsPipeline
    from .pipelines.single_particle import SingleParticlePipeline
    from .pipelines.spectrum import SpectrumPipeline
    from .pipelines.toydos import ToyDosPipeline

    self.spectrum = SpectrumPipeline(self)
    self.single_particle = SingleParticlePipeline(self)
    self.dynamics = DynamicsPipeline(self)
    self.bethe = BethePipeline(self)
    self.toydos = ToyDosPipeline(self)

  def __repr__(self) -> str:
    p = self.params
    return f"IncoherentonLab(model={p.model!r}, L={p.L}, N={p.N}, J={p.J}, gamma={p.gamma}, U={p.U})"

  @property
  def basis(self) -> SectorBasis:
    if self._basis is None:
      self._basis = sector_for(self.params)
    return self._basis

  @property
  def superoperator(self) -> Superoperator:
    """Dense Liouvillian (raises SizeLimitError above the dense limit)"""
    if self._superoperator is None:
      self._superoperator = cast(Superoperator, build_generator(self.params, dense=True, dense_limit=self.dense_limit))
    return self._superoperator

  @property
  def matrix_free(self) -> MatrixFreeLiouvillian:
    if self._matrix_free is None:
      self._matrix_free = cast(MatrixFreeLiouvillian, build_generator(self.params, dense=False))
    return self._matrix_free

  def generator(self, kind: Literal["dense", "matrix-free"] = "matrix-free") -> Union[Superoperator, MatrixFreeLiouvillian]:
    return self.superoperator if kind == "dense" else self.matrix_free

  @property
  def modes(self) -> EigenmodeSet:
    """Right and left eigenmodes of the dense Liouvillian"""
    if self._modes is None:
      logger.info("Diagonalizing %s (D^2=%d)", self, self.basis.dimension**2)
      self._modes = diagonalize(self.superoperator, left=True, dense_limit=self.dense_limit)
    return self._modes

  @property
  def table(self) -> ModeTable:
    if self._table is None:
      self._table = mode_metrics(self.modes)
    return self._table

  def with_params(self, **overrides: Union[int, float, str]) -> "IncoherentonLab":
    """New lab with some parameters replaced; caches are not shared"""
    data = self.params.model_dump()
    data.update(overrides)
    for key in ("L", "N"):
      data[key] = int(round(float(data[key])))
    return IncoherentonLab(ModelParams.model_validate(data), dense_limit=self.dense_limit, jobs=1)

  def close(self) -> None:
    """Drop cached operators and eigenmodes"""
    self._basis = None
    self._superoperator = None
    self._matrix_free = None
    self._modes = None
    self._table = None

  def __enter__(self) -> "IncoherentonLab":
    return self

  def __exit__(self, exc_type: Any, exc_value: Any, traceback: Any) -> Literal[False]:
    self.close()
    return False
