"""Numerical laboratory for the non-self-adjoint shifted harmonic oscillator.

Builds pseudo-bosonic ladder operators, their biorthogonal eigenfamilies and the
metric operator on a truncated Fock space, and checks the properties they are
expected to have (or to lack).
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ConstructionError,
    DimensionError,
    InvariantViolation,
    NumericalError,
    PblabError,
    RangeError,
    TruncationError,
)
from .fock import REFERENCE, FockVector, Params  # noqa: E402
from .families import FamilyPair, build_family_pair, build_ladder_family  # noqa: E402
from .metric import MetricOperator, build_theta  # noqa: E402
