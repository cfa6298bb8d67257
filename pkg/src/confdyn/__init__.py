"""Numerical laboratory for relativistic particle dynamics in scalar
background fields: conformal symmetry charges, superintegrability
certification, closed-form orbits, and Klein-Gordon exact-solution checks."""

from . import (analytic, backgrounds, cli, conformal, dynamics, geometry,
               integrability, kgverify)
from .errors import (ConfdynError, ConfigError, DomainError,
                     ReconstructionError, RealityError, SingularityError)
from .geometry import FourVector, LightFrontCoords

__all__ = [
    "analytic", "backgrounds", "cli", "conformal", "dynamics", "geometry",
    "integrability", "kgverify",
    "ConfdynError", "ConfigError", "DomainError", "ReconstructionError",
    "RealityError", "SingularityError",
    "FourVector", "LightFrontCoords",
]

__version__ = "0.1.0"
