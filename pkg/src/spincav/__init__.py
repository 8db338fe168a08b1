"""Steady-state photon statistics of two coupled spinning whispering-gallery cavities."""

from .params import Direction, ModelParams, PhysicalParams, derive_model, model_from_kappa
from .fock import FockDims
from .dynamics import DensityMatrix, solve
from .observables import g2_cavity, g2_output, transmission

__version__ = "0.1.0"

__all__ = [
    "Direction",
    "ModelParams",
    "PhysicalParams",
    "derive_model",
    "model_from_kappa",
    "FockDims",
    "DensityMatrix",
    "solve",
    "g2_cavity",
    "g2_output",
    "transmission",
]
