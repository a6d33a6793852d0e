"""Exception types shared across the package."""


class SdgnnError(Exception):
    """Base class for all package errors."""


class FormatError(SdgnnError, ValueError):
    """A file or byte stream does not match the expected format."""


class EdgeListParseError(FormatError):
    """Malformed edge-list input; carries the offending line number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ConfigError(SdgnnError, ValueError):
    """Invalid configuration value or combination."""


class ShapeError(SdgnnError, ValueError):
    """Array dimensions do not agree."""
