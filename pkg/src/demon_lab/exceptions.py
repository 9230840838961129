"""Exception types shared across the package."""


class InvalidParameter(ValueError):
    """A caller-supplied argument violates an operation's precondition."""


class InsufficientData(ValueError):
    """Too few usable data points for a fit or estimate."""


class ParameterRangeError(OverflowError):
    """A parameter computation left the double-precision range.

    ``level`` carries the first level at which the overflow occurred.
    """

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level
