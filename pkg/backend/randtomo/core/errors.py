"""Exception hierarchy shared across randtomo."""

from __future__ import annotations

from typing import Any


class RandtomoError(Exception):
    """Base class for all randtomo errors."""


class DimensionError(RandtomoError, ValueError):
    """Shapes or lengths of the operands do not agree."""


class InvalidArgumentError(RandtomoError, ValueError):
    """An argument lies outside its admissible range."""


class CapabilityError(RandtomoError):
    """The requested computation is not supported for this configuration."""


class ConvergenceError(RandtomoError):
    """An iterative solve stopped before reaching its tolerance."""

    def __init__(self, message: str, residual: float, iterations: int) -> None:
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class DivergenceError(RandtomoError):
    """The objective of an iterative solve blew up."""

    def __init__(self, message: str, tau: float, objective: float) -> None:
        super().__init__(f"{message} (tau={tau:.3e}, objective={objective:.3e})")
        self.tau = tau
        self.objective = objective


class SweepFailedError(RandtomoError):
    """Too many realizations of a sweep failed; carries the partial record table."""

    def __init__(self, message: str, records: Any, failures: int) -> None:
        super().__init__(message)
        self.records = records
        self.failures = failures


USER_ERRORS: tuple[type[BaseException], ...] = (
    DimensionError,
    InvalidArgumentError,
    CapabilityError,
    FileNotFoundError,
)
NUMERICAL_ERRORS: tuple[type[BaseException], ...] = (
    ConvergenceError,
    DivergenceError,
    SweepFailedError,
)


__all__ = [
    "RandtomoError",
    "DimensionError",
    "InvalidArgumentError",
    "CapabilityError",
    "ConvergenceError",
    "DivergenceError",
    "SweepFailedError",
    "USER_ERRORS",
    "NUMERICAL_ERRORS",
]
