"""Sign statistics of Hecke eigenvalues: exact coefficient tables, B-free lower
bounds, truncated Voronoi sums and short-interval counts."""

from .errors import (HeckeError, InvalidLevelError, InvariantViolation, LoadError,
                     SearchExhaustedError, UnsupportedWeightError, UsageError)
from .forms import EigenForm, from_elliptic_curve, from_file, from_level1

__version__ = "0.1.0"

__all__ = [
    "EigenForm", "from_level1", "from_elliptic_curve", "from_file",
    "HeckeError", "UsageError", "UnsupportedWeightError", "InvalidLevelError",
    "LoadError", "SearchExhaustedError", "InvariantViolation",
]
