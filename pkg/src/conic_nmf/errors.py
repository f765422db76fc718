"""Exception hierarchy.

Input problems derive from :class:`InputError` (a ``ValueError``); numerical
failures derive from :class:`NumericalError`. The CLI maps the first family to
exit code 2 and the second to exit code 3.
"""


class ConicNMFError(Exception):
    """Base class for every error raised by this package."""


class InputError(ConicNMFError, ValueError):
    pass


class NumericalError(ConicNMFError, ArithmeticError):
    pass


class ZeroColumn(InputError):
    """A column is exactly zero, so it has no direction."""

    def __init__(self, index):
        self.index = int(index)
        super().__init__(f"column {self.index} is identically zero")


class ZeroVector(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class KTooLarge(InputError):
    pass


class KExceedsN(InputError):
    pass


class SingleCone(InputError):
    pass


class NonPositiveBasis(InputError):
    pass


class DimensionTooSmall(InputError):
    pass


class RangeInvalid(InputError):
    pass


class RankDeficient(InputError):
    pass


class NegativeEntries(InputError):
    pass


class NoConvergence(NumericalError):
    """Power iteration did not reach the requested tolerance."""

    def __init__(self, message, iterations=None, residual=None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)


class Infeasible(NumericalError):
    pass
