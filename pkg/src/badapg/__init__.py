"""Adaptive Bregman proximal gradient methods with locally estimated stepsizes."""

from . import estimates, harness, kernels, problems, solvers, validation
from .errors import (
    BadapgError,
    ConfigurationError,
    DegeneratePairError,
    DomainError,
    InitializationError,
    LinesearchStall,
    NumericalError,
    ParseError,
    ProxError,
)
from .kernels import make_kernel
from .problems import make_instance
from .solvers import run

__version__ = "0.1.0"

__all__ = [
    "estimates", "harness", "kernels", "problems", "solvers", "validation",
    "BadapgError", "ConfigurationError", "DegeneratePairError", "DomainError", "InitializationError",
    "LinesearchStall", "NumericalError", "ParseError", "ProxError",
    "make_kernel", "make_instance", "run", "__version__",
]
