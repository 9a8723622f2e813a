from __future__ import annotations

from enum import Enum


class ParamsFault(Enum):
    ODD_N = "odd_n"
    TOO_FEW_VERTICES = "too_few_vertices"
    NO_COLORS = "no_colors"
    LENGTH_MISMATCH = "length_mismatch"
    NON_POSITIVE_RATE = "non_positive_rate"
    NON_FINITE_RATE = "non_finite_rate"
    WITHIN_MASS = "within_mass"
    CROSS_MASS = "cross_mass"
    INDISTINGUISHABLE = "indistinguishable"
    MALFORMED = "malformed"


class CsbmError(Exception):
    """Base exception for all csbm_lab errors."""


class ValidationError(CsbmError):
    """Raised when caller-supplied input is rejected."""


class ParamsError(ValidationError):
    """Raised when model parameters violate the model's constraints."""

    def __init__(self, fault: ParamsFault, message: str) -> None:
        super().__init__(message)
        self.fault = fault


class PartitionError(ValidationError):
    """Raised on unbalanced partitions or size mismatches."""


class GraphFormatError(ValidationError):
    """Raised on malformed graph or partition text."""

    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DecoderCapError(ValidationError):
    """Raised when exhaustive decoding is requested above the vertex cap."""


class BoundInputError(ValidationError):
    """Raised when a bound evaluator receives out-of-range inputs."""


class SweepConfigError(ValidationError):
    """Raised when a sweep configuration fails validation.

    `problems` lists one "field: reason" entry per failure.
    """

    def __init__(self, problems: list[str]) -> None:
        super().__init__("; ".join(problems))
        self.problems = list(problems)


class UsageError(ValidationError):
    """Raised when command-line arguments cannot be parsed."""


class LawError(ValidationError):
    """Raised when a finite-support law is malformed."""


class NumericalRangeError(CsbmError):
    """Raised when a computation leaves the supported floating-point range."""


class OracleCapacityError(CsbmError):
    """Raised when an exact oracle would exceed its atom cap."""
