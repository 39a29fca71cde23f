"""Exception hierarchy shared across the simulator."""


class NeseError(Exception):
    """Base class for all simulator errors."""


class ValidationError(NeseError):
    """A parameter or configuration field is out of its allowed range."""


class DimensionMismatchError(NeseError):
    """Two grids/frames/masks that must share dimensions do not."""


class PgmParseError(NeseError):
    """A PGM header could not be parsed; the message names the bad token."""


class UnsupportedFormatError(NeseError):
    """The file is a recognized format but outside the supported subset."""


class EmptySequenceError(NeseError):
    """A frame-sequence load matched no files."""


class PowerFaultError(NeseError):
    """An MRAM access was attempted while the array was powered down."""
