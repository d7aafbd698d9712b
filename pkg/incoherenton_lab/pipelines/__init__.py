"""
Pipeline namespaces for incoherenton-lab
"""

from .bethe import BethePipeline
from .dynamics import DynamicsPipeline, SweepPoint
from .single_particle import SingleParticlePipeline
from .spectrum import SpectrumPipeline
from .toydos import ToyDosPipeline, log_time_grid

__all__ = [
  "SpectrumPipeline",
  "SingleParticlePipeline",
  "DynamicsPipeline",
  "BethePipeline",
  "ToyDosPipeline",
  "SweepPoint",
  "log_time_grid",
]
