"""Exception hierarchy.

``InvalidInput`` maps to CLI exit code 2 and ``BudgetExceeded`` to 3.
"""


class ToeplitzError(Exception):
    """Base class for errors raised by this package."""


class InvalidInput(ToeplitzError, ValueError):
    """Malformed or out-of-domain input."""


class DimensionMismatch(InvalidInput):
    """Operands live on tori of different dimension."""


class BudgetExceeded(ToeplitzError):
    """A requested accuracy cannot be met within the configured expansion size."""


class PreconditionError(InvalidInput):
    """The input violates a mathematical precondition of the operation."""


class NotPartialIsometry(PreconditionError):
    """The symbol or matrix is not (power) partially isometric within tolerance."""


class ChainOrthogonalityError(ToeplitzError):
    """Truncated-shift chains fail to be orthonormal beyond the rank tolerance."""

    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair
