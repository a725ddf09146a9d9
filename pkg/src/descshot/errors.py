"""Exception types shared across the package."""


class DescshotError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DescshotError):
    """An input violates a documented contract or invariant."""


class ParseError(ValidationError):
    """A file does not conform to its format.

    Messages name the offending row/column (1-based, header = line 1)
    whenever the location is known.
    """


class MaskError(ValidationError):
    """A binary mask cannot support the requested operation."""


class UndefinedStatisticError(DescshotError):
    """The requested statistic is undefined for this input (degenerate data)."""
