"""Exception hierarchy shared by every module and mapped onto CLI exit codes."""


class SubfeketeError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SubfeketeError, ValueError):
    """Invalid input, configuration, or a hard cap exceeded (CLI exit code 1)."""


class CapExceeded(ConfigError):
    """A word-length or word-count cap would be exceeded by the requested search."""


class EmptyLanguageError(ConfigError):
    """The subshift admits no word of the requested length."""


class InvariantViolation(SubfeketeError, RuntimeError):
    """A checked contract failed at run time (CLI exit code 2)."""
