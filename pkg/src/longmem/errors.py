"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: invalid input (including domain,
degenerate-data and bandwidth problems) exits 2, numeric failures exit 3,
and I/O problems exit 4.
"""


class LongmemError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(LongmemError, ValueError):
    """Input violates a documented precondition."""


class DomainError(InvalidInputError):
    """Argument falls outside the mathematical domain of an operation."""


class DegenerateInputError(InvalidInputError):
    """Input is technically valid but degenerate (e.g. a zero pooled sum)."""


class InvalidBandwidthError(InvalidInputError):
    """Pooling/trim/bandwidth selection produces an empty or illegal grid."""


class NumericError(LongmemError, ArithmeticError):
    """A computation produced a non-finite result or a pathological state."""
