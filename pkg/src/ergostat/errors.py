"""Exception types shared across the package."""


class ErgostatError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(ErgostatError, ValueError):
    """Invalid configuration: bad parameters, malformed specs, bad CLI input."""


class CapabilityError(ErgostatError, RuntimeError):
    """A process model cannot provide the requested oracle operation."""


class SampleFormatError(ErgostatError, ValueError):
    """A data file could not be parsed; carries the offending line number."""

    def __init__(self, path, line_no, message):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")
