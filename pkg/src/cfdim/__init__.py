"""Certified Hausdorff dimension brackets for complex continued-fraction sets."""

from .errors import (
    CertificateFailure,
    CFDimError,
    CorrectionTooLarge,
    NoBracket,
    NoConvergence,
    OscillationDetected,
    OutOfDomain,
    SymmetryViolation,
)
from .maps import Alphabet
from .mesh import Region, build_mesh_domain
from .solver import SolveConfig, bracket_dimension, radius_bounds, solve_uncorrected

__all__ = [
    "Alphabet",
    "CFDimError",
    "CertificateFailure",
    "CorrectionTooLarge",
    "NoBracket",
    "NoConvergence",
    "OscillationDetected",
    "OutOfDomain",
    "Region",
    "SolveConfig",
    "SymmetryViolation",
    "bracket_dimension",
    "build_mesh_domain",
    "radius_bounds",
    "solve_uncorrected",
]
