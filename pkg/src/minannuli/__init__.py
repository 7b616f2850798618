"""Numerical laboratory for minimal annuli and minimal graphs in H^2 x R."""
__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import (DomainError, IndeterminateError, NonConvergence, NoWitness, NumericsError,
                     SingularLinearization)

__all__ = [
    "__version__",
    "BACKEND",
    "DomainError",
    "NumericsError",
    "NonConvergence",
    "SingularLinearization",
    "IndeterminateError",
    "NoWitness",
]
