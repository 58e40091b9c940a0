"""Exception hierarchy shared by all subpackages."""


class BadapgError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BadapgError, ValueError):
    """A point lies outside the region where an operation is defined."""


class DegeneratePairError(BadapgError, ArithmeticError):
    """Two consecutive iterates are numerically indistinguishable."""


class ConfigurationError(BadapgError, ValueError):
    """Incompatible combination of kernel, problem and controller."""


class InitializationError(BadapgError, RuntimeError):
    """The stepsize initialization did not settle within its round cap."""

    def __init__(self, message, gamma0=None):
        super().__init__(message)
        self.gamma0 = gamma0


class LinesearchStall(BadapgError, RuntimeError):
    """Backtracking shrank the stepsize below the underflow threshold."""

    def __init__(self, message, gamma=None, iteration=None):
        super().__init__(message)
        self.gamma = gamma
        self.iteration = iteration


class NumericalError(BadapgError, ArithmeticError):
    """A scalar solve or evaluation failed to converge or overflowed."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ProxError(NumericalError):
    """The Bregman proximal oracle failed."""


class ParseError(BadapgError, ValueError):
    """Malformed input file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
