"""
Custom exceptions for the force-sensor noise library.
"""

from typing import Optional


class SensorError(Exception):
    """Base exception for all sensor-model errors."""
    pass


class ParameterError(SensorError):
    """Exception raised when an operation is called outside its physical domain."""

    def __init__(self, parameter: str, message: str):
        self.parameter = parameter
        super().__init__(f"Invalid '{parameter}': {message}")


class ConfigurationError(SensorError):
    """Exception raised when a configuration file cannot be parsed or validated."""

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
        source: Optional[str] = None,
    ):
        self.field = field
        self.line = line
        self.source = source
        location = []
        if source:
            location.append(str(source))
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")


class EngineNotFoundError(SensorError):
    """Exception raised when a requested engine is not registered."""

    def __init__(self, engine_name: str):
        self.engine_name = engine_name
        super().__init__(f"Engine '{engine_name}' not found in registry")


class EngineMismatchError(SensorError):
    """Exception raised when an engine cannot evaluate the requested sweep."""

    def __init__(self, engine_name: str, reason: str):
        self.engine_name = engine_name
        self.reason = reason
        super().__init__(f"Engine '{engine_name}' is incompatible with the sweep: {reason}")


class NumericalError(SensorError):
    """Base exception for numerical failures (exit code 2 in the CLI)."""
    pass


class ConvergenceError(NumericalError):
    """Exception raised when an iterative solver does not converge."""

    def __init__(self, solver: str, residual: float, iterations: int):
        self.solver = solver
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"Solver '{solver}' did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )


class SingularSystemError(NumericalError):
    """Exception raised when the frequency-domain system cannot be solved."""

    def __init__(self, omega: float, condition_number: float):
        self.omega = omega
        self.condition_number = condition_number
        super().__init__(
            f"Linear system is singular at omega={omega:.17g} rad/s "
            f"(condition number {condition_number:.3e})"
        )


class ComparisonError(SensorError):
    """Exception raised when two results cannot be compared."""
    pass


class OutputError(SensorError):
    """Exception raised when a result cannot be written or read."""

    def __init__(self, path: str, original_error: Optional[Exception] = None):
        self.path = path
        self.original_error = original_error
        detail = f": {original_error}" if original_error else ""
        super().__init__(f"Could not access '{path}'{detail}")
