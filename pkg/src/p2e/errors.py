"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """A truncation or bound request is inconsistent with available data."""


class ConvergenceError(RuntimeError):
    """An iterative solve failed to reach its tolerance."""


class CacheFormatError(ValueError):
    """A coefficient cache file is malformed or violates structural limits."""
