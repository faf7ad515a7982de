"""Exception types shared across the package."""


class XTypesError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(XTypesError):
    """Invalid configuration or parameters (CLI exit code 2)."""


class DataError(XTypesError):
    """Malformed or inconsistent input data (CLI exit code 3)."""


class StageError(XTypesError):
    """A pipeline stage failed (CLI exit code 4)."""
