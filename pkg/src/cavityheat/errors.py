"""Exception types raised by the solvers and the config parser."""


class CavityHeatError(Exception):
    """Base class for all package errors."""


class ConfigError(CavityHeatError, ValueError):
    """Malformed or invalid run configuration."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SolverError(CavityHeatError, RuntimeError):
    """A numerical solve could not produce a valid result."""


class ConvergenceError(SolverError):
    """An iterative scheme stopped before reaching its tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)


class SingularSystemError(SolverError):
    """The impedance matrix is numerically singular at some frequency."""

    def __init__(self, message, omega=None):
        self.omega = omega
        super().__init__(message)
