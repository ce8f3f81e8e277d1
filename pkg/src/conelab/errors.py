"""Exception hierarchy shared by all conelab modules."""


class ConelabError(Exception):
    """Base class for library errors."""


class DimensionMismatch(ConelabError, ValueError):
    pass


class ModeMismatch(ConelabError, ValueError):
    pass


class DegenerateMeasure(ConelabError, ValueError):
    """Raised where a non-degenerate (non-zero) measure is required."""


class ZeroDirection(ConelabError, ValueError):
    pass


class GridOverflow(ConelabError, MemoryError):
    """A grid computation would exceed the configured sample budget."""


class MeasureFormatError(ConelabError, ValueError):
    """Malformed measure or report file; the message carries the location."""
