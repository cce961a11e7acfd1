"""Exception taxonomy shared by the library and the CLI exit codes."""


class PolarFBError(Exception):
    """Base class for all polarfb errors."""


class InvalidArgumentError(PolarFBError, ValueError):
    """Bad parameter or malformed input (CLI exit code 2)."""


class ResourceLimitError(PolarFBError):
    """Request exceeds a documented size/memory cap (CLI exit code 3)."""


class InsufficientDataError(PolarFBError):
    """Not enough samples for the requested statistic (CLI exit code 4)."""
