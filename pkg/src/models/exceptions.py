"""
Error types raised by the inverse-problem pipeline.
Each error carries the process exit code the CLI maps it to.
"""
from typing import Optional


class PipelineError(Exception):
    """Base class for all pipeline failures."""
    exit_code: int = 1


class SchemaError(PipelineError):
    """Input document or flag value does not match the expected schema."""
    exit_code = 2


class DimensionError(PipelineError, ValueError):
    """Non-conformable, non-square or non-finite matrix input."""
    exit_code = 2


class DomainError(PipelineError, ValueError):
    """Argument outside the operation's domain (x < 0, z = 0, h <= 0, ...)."""
    exit_code = 2


class NonMinimalError(PipelineError):
    """Realization is not minimal and no reduction was requested."""
    exit_code = 3

    def __init__(self, message: str, controllable_rank: Optional[int] = None,
                 observable_rank: Optional[int] = None, order: Optional[int] = None):
        super().__init__(message)
        self.controllable_rank = controllable_rank
        self.observable_rank = observable_rank
        self.order = order


class SolverError(PipelineError):
    """Numerical solver failure."""
    exit_code = 4


class SingularMatrixError(SolverError):
    """Linear system is singular to working precision."""

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


class ConvergenceError(SolverError):
    """Iteration did not reach the requested residual."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class PositivityError(SolverError):
    """A matrix that must be positive definite is not."""


class PoleProximityError(PipelineError, ValueError):
    """Evaluation point lies at or numerically near a pole."""
    exit_code = 4

    def __init__(self, message: str, distance: float):
        super().__init__(f"{message} (distance {distance:.3e})")
        self.distance = distance


class SpectrumConditionError(PipelineError):
    """Recovered alpha violates the spectral condition of discrete synthesis."""
    exit_code = 5
