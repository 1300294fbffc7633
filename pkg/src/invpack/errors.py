"""Exception types shared across the package."""


class PackError(Exception):
    """Base class for all invpack errors."""


class DomainError(PackError, ValueError):
    """Input lies outside the open domain of an operation."""


class RangeError(PackError, OverflowError):
    """A quantity left the numeric range of double precision."""


class PathError(PackError):
    """An integration segment left the admissible domain."""


class BracketError(PackError):
    """Internal root-find failed to bracket; should not occur on valid input."""


class FeasibilityError(PackError, ValueError):
    """Target cone angles violate a feasibility constraint."""


class FormatError(PackError, ValueError):
    """Surface file failed to parse or violated its schema."""
