"""Exception types shared across the package."""


class CdsimError(Exception):
    """Base class for all package-specific errors."""


class ParseError(CdsimError):
    """Malformed input document (carries a 1-based line number)."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(CdsimError):
    """Argument outside the operation's mathematical domain."""


class NormalizationError(CdsimError):
    """A row of the weight matrix cannot be normalized."""


class IterationError(CdsimError):
    """An iterative solver failed to converge within its budget."""


class SizeError(CdsimError):
    """Problem instance exceeds an enumeration guard."""


class ConfigError(CdsimError):
    """Inconsistent or malformed run configuration."""


class InvariantError(CdsimError):
    """A runtime invariant the implementation relies on was violated."""
